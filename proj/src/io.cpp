#include "obsrobust/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace obsrobust {

using nlohmann::json;

namespace {

int get_int(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  if (!it->is_number_integer()) throw ParseError(std::string("field \"") + key + "\" must be an integer");
  return it->get<int>();
}

Matrix get_matrix(const json& doc, const char* key, int rows, int cols) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  const json& m = *it;
  if (!m.is_array()) throw ParseError(std::string("field \"") + key + "\" must be an array of rows");
  if (static_cast<int>(m.size()) != rows)
    throw ValidationError(std::string("dimension mismatch: ") + key + " has " +
                          std::to_string(m.size()) + " rows, expected " + std::to_string(rows));
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& row = m[i];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ValidationError(std::string("dimension mismatch: ") + key + " row " +
                            std::to_string(i + 1) + " must have " + std::to_string(cols) + " entries");
    for (int j = 0; j < cols; ++j) {
      if (row[j].is_null()) throw ValidationError("non-finite entry");
      if (!row[j].is_number()) throw ParseError(std::string(key) + " entries must be numbers");
      out(i, j) = row[j].get<double>();
    }
  }
  return out;
}

PatternMatrix get_support(const json& doc, const char* key, int rows, int cols) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  if (!it->is_array()) throw ParseError(std::string("field \"") + key + "\" must be an array");
  std::vector<std::pair<int, int>> s;
  for (const json& e : *it) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw ParseError(std::string(key) + " entries must be [i, j] integer pairs");
    s.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1);
  }
  return PatternMatrix(rows, cols, std::move(s));
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json support_json(const PatternMatrix& p) {
  json s = json::array();
  for (auto [i, j] : p.support()) s.push_back({i + 1, j + 1});
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_number(const std::string& tok) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError("bad Matrix Market number \"" + tok + "\"");
  }
  if (pos != tok.size()) throw ParseError("bad Matrix Market number \"" + tok + "\"");
  return v;
}

}  // namespace

LoadedSystem load_system(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("system document must be a JSON object");
  std::string kind = doc.value("kind", std::string{});
  int n = get_int(doc, "n");
  int r = get_int(doc, "r");
  if (n < 1 || r < 1) throw ValidationError("n and r must be positive");

  if (kind == "dense") {
    Matrix a = get_matrix(doc, "A", n, n);
    Matrix c = get_matrix(doc, "C", r, n);
    std::vector<std::string> labels;
    if (auto it = doc.find("sensor_labels"); it != doc.end() && !it->is_null()) {
      for (const json& l : *it) labels.push_back(l.is_string() ? l.get<std::string>() : l.dump());
    }
    return DenseSystem(std::move(a), std::move(c), std::move(labels));
  }
  if (kind == "structured") {
    return StructuredSystem(get_support(doc, "A_support", n, n), get_support(doc, "C_support", r, n));
  }
  throw ParseError("field \"kind\" must be \"dense\" or \"structured\"");
}

Matrix parse_matrix_market(std::string_view text, bool* is_pattern) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty Matrix Market file");
  std::istringstream header(lower(line));
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix")
    throw ParseError("missing %%MatrixMarket matrix header");
  if (format != "coordinate" && format != "array")
    throw ParseError("unsupported Matrix Market format \"" + format + "\"");
  if (field != "real" && field != "integer" && field != "double" && field != "pattern")
    throw ParseError("unsupported Matrix Market field \"" + field + "\"");
  if (symmetry.empty()) symmetry = "general";
  if (symmetry != "general" && symmetry != "symmetric")
    throw ParseError("unsupported Matrix Market symmetry \"" + symmetry + "\"");
  const bool pattern = field == "pattern";
  const bool symmetric = symmetry == "symmetric";
  if (pattern && format == "array") throw ParseError("pattern field requires coordinate format");
  if (is_pattern) *is_pattern = pattern;

  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      auto first = out.find_first_not_of(" \t\r");
      if (first == std::string::npos || out[first] == '%') continue;
      return true;
    }
    return false;
  };

  if (!next_data_line(line)) throw ParseError("missing Matrix Market size line");
  std::istringstream size_line(line);
  long rows = 0, cols = 0, entries = 0;
  size_line >> rows >> cols;
  if (format == "coordinate") size_line >> entries;
  if (!size_line || rows < 1 || cols < 1) throw ParseError("bad Matrix Market size line");

  Matrix m = Matrix::Zero(rows, cols);
  std::string tok;
  if (format == "array") {
    // column-major, one value per line
    for (long j = 0; j < cols; ++j) {
      for (long i = symmetric ? j : 0; i < rows; ++i) {
        if (!next_data_line(line)) throw ParseError("truncated Matrix Market array");
        std::istringstream ls(line);
        ls >> tok;
        m(i, j) = parse_number(tok);
        if (symmetric) m(j, i) = m(i, j);
      }
    }
  } else {
    for (long k = 0; k < entries; ++k) {
      if (!next_data_line(line)) throw ParseError("truncated Matrix Market coordinate list");
      std::istringstream ls(line);
      long i = 0, j = 0;
      ls >> i >> j;
      if (!ls || i < 1 || j < 1 || i > rows || j > cols)
        throw ParseError("Matrix Market entry index out of range");
      double v = 1.0;
      if (!pattern) {
        ls >> tok;
        v = parse_number(tok);
      }
      m(i - 1, j - 1) = v;
      if (symmetric) m(j - 1, i - 1) = v;
    }
  }
  return m;
}

std::string write_matrix_market(const Matrix& m) {
  std::ostringstream out;
  out.precision(17);
  out << "%%MatrixMarket matrix coordinate real general\n";
  long nnz = (m.array() != 0.0).count();
  out << m.rows() << " " << m.cols() << " " << nnz << "\n";
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) out << i + 1 << " " << j + 1 << " " << m(i, j) << "\n";
  return out.str();
}

LoadedSystem load_matrix_market_pair(std::string_view a_text, std::string_view c_text) {
  bool a_pattern = false, c_pattern = false;
  Matrix a = parse_matrix_market(a_text, &a_pattern);
  Matrix c = parse_matrix_market(c_text, &c_pattern);
  if (a.rows() != a.cols()) throw ValidationError("dimension mismatch: A must be square");
  if (c.cols() != a.rows()) throw ValidationError("dimension mismatch: C must have n columns");
  if (a_pattern || c_pattern) {
    if (!a.allFinite() || !c.allFinite()) throw ValidationError("non-finite entry");
    return StructuredSystem(PatternMatrix::from_dense(a), PatternMatrix::from_dense(c));
  }
  return DenseSystem(std::move(a), std::move(c));
}

json to_json(const DenseSystem& sys) {
  json doc = {{"kind", "dense"}, {"n", sys.n()}, {"r", sys.r()},
              {"A", matrix_json(sys.a())}, {"C", matrix_json(sys.c())}};
  if (!sys.sensor_labels().empty()) doc["sensor_labels"] = sys.sensor_labels();
  return doc;
}

json to_json(const StructuredSystem& sys) {
  return {{"kind", "structured"}, {"n", sys.n()}, {"r", sys.r()},
          {"A_support", support_json(sys.a())}, {"C_support", support_json(sys.c())}};
}

std::string save_system(const DenseSystem& sys) { return to_json(sys).dump(2) + "\n"; }
std::string save_system(const StructuredSystem& sys) { return to_json(sys).dump(2) + "\n"; }

CostVector load_costs(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("JSON parse error: ") + e.what());
  }
  if (doc.is_object() && doc.contains("costs")) doc = doc["costs"];
  if (!doc.is_array()) throw ParseError("costs document must be an array of numbers");
  std::vector<double> costs;
  for (const json& v : doc) {
    if (!v.is_number()) throw ParseError("costs must be numbers");
    costs.push_back(v.get<double>());
  }
  return CostVector(std::move(costs));
}

StructuredSystem as_structured(const LoadedSystem& sys) {
  if (const auto* d = std::get_if<DenseSystem>(&sys)) return d->pattern();
  return std::get<StructuredSystem>(sys);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << contents;
  if (!out) throw Error("write failed for " + path);
}

}  // namespace obsrobust
