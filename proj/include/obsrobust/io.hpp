#pragma once

#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "obsrobust/core.hpp"

namespace obsrobust {

using LoadedSystem = std::variant<DenseSystem, StructuredSystem>;

/// Parses the canonical JSON system document. Dense documents yield a
/// DenseSystem (whose induced pattern is available via pattern()).
LoadedSystem load_system(std::string_view json_text);

/// Reads A and C from a pair of Matrix Market files (coordinate or array).
/// If either file is a `pattern` matrix the result is structured.
LoadedSystem load_matrix_market_pair(std::string_view a_text, std::string_view c_text);

/// Parses one Matrix Market document. Pattern entries are stored as 1.0;
/// `is_pattern` reports whether the header declared a pattern field.
Matrix parse_matrix_market(std::string_view text, bool* is_pattern = nullptr);
std::string write_matrix_market(const Matrix& m);

nlohmann::json to_json(const DenseSystem& sys);
nlohmann::json to_json(const StructuredSystem& sys);
std::string save_system(const DenseSystem& sys);
std::string save_system(const StructuredSystem& sys);

/// Costs document: either a bare array or {"costs": [...]}.
CostVector load_costs(std::string_view json_text);

/// The structured view of any loaded system (dense inputs are patternized
/// by the exact-zero test).
StructuredSystem as_structured(const LoadedSystem& sys);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace obsrobust
