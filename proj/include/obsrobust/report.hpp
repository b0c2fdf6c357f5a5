#pragma once

#include <json.hpp>

#include "obsrobust/core.hpp"
#include "obsrobust/spectral.hpp"
#include "obsrobust/structural.hpp"

namespace obsrobust {

nlohmann::json to_json(const Tolerances& tol);

/// Report body. When `es` is given, each eigenvalue row also carries the
/// singular values on either side of the rank cut.
nlohmann::json to_json(const RobustnessReport& rep, const EigenStructure* es = nullptr);
nlohmann::json to_json(const StructuralReport& rep);

const char* branch_name(Branch b);

}  // namespace obsrobust
