#include "obsrobust/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace obsrobust {

SensorSubset::SensorSubset(std::vector<int> zero_based) : idx_(std::move(zero_based)) {
  std::sort(idx_.begin(), idx_.end());
  if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end())
    throw ValidationError("sensor subset contains duplicates");
  if (!idx_.empty() && idx_.front() < 0)
    throw ValidationError("sensor subset contains a negative index");
}

SensorSubset SensorSubset::from_one_based(const std::vector<int>& one_based) {
  std::vector<int> z;
  z.reserve(one_based.size());
  for (int i : one_based) {
    if (i < 1) throw ValidationError("sensor indices are 1-based");
    z.push_back(i - 1);
  }
  return SensorSubset(std::move(z));
}

std::vector<int> SensorSubset::one_based() const {
  std::vector<int> out(idx_);
  for (int& i : out) ++i;
  return out;
}

bool SensorSubset::contains(int i) const {
  return std::binary_search(idx_.begin(), idx_.end(), i);
}

SensorSubset SensorSubset::complement(int r) const {
  std::vector<int> out;
  for (int i = 0; i < r; ++i)
    if (!contains(i)) out.push_back(i);
  return SensorSubset(std::move(out));
}

PatternMatrix::PatternMatrix(int rows, int cols, std::vector<std::pair<int, int>> support)
    : rows_(rows), cols_(cols), support_(std::move(support)) {
  if (rows < 0 || cols < 0) throw ValidationError("negative pattern dimension");
  std::sort(support_.begin(), support_.end());
  if (std::adjacent_find(support_.begin(), support_.end()) != support_.end())
    throw ValidationError("pattern support contains duplicates");
  for (auto [i, j] : support_) {
    if (i < 0 || i >= rows || j < 0 || j >= cols) {
      std::ostringstream msg;
      msg << "pattern entry (" << i + 1 << "," << j + 1 << ") outside " << rows << "x" << cols;
      throw ValidationError(msg.str());
    }
  }
}

PatternMatrix PatternMatrix::from_dense(const Matrix& m) {
  std::vector<std::pair<int, int>> s;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) s.emplace_back(i, j);
  return PatternMatrix(static_cast<int>(m.rows()), static_cast<int>(m.cols()), std::move(s));
}

PatternMatrix PatternMatrix::full(int rows, int cols) {
  std::vector<std::pair<int, int>> s;
  s.reserve(static_cast<std::size_t>(rows) * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) s.emplace_back(i, j);
  return PatternMatrix(rows, cols, std::move(s));
}

bool PatternMatrix::contains(int i, int j) const {
  return std::binary_search(support_.begin(), support_.end(), std::make_pair(i, j));
}

std::vector<int> PatternMatrix::row(int i) const {
  auto lo = std::lower_bound(support_.begin(), support_.end(), std::make_pair(i, -1));
  std::vector<int> out;
  for (auto it = lo; it != support_.end() && it->first == i; ++it) out.push_back(it->second);
  return out;
}

std::vector<std::vector<int>> PatternMatrix::row_lists() const {
  std::vector<std::vector<int>> out(rows_);
  for (auto [i, j] : support_) out[i].push_back(j);
  return out;
}

PatternMatrix PatternMatrix::transpose() const {
  std::vector<std::pair<int, int>> s;
  s.reserve(support_.size());
  for (auto [i, j] : support_) s.emplace_back(j, i);
  return PatternMatrix(cols_, rows_, std::move(s));
}

PatternMatrix PatternMatrix::select_rows(const std::vector<int>& keep) const {
  std::vector<int> where(rows_, -1);
  for (std::size_t k = 0; k < keep.size(); ++k) where[keep[k]] = static_cast<int>(k);
  std::vector<std::pair<int, int>> s;
  for (auto [i, j] : support_)
    if (where[i] >= 0) s.emplace_back(where[i], j);
  return PatternMatrix(static_cast<int>(keep.size()), cols_, std::move(s));
}

StructuredSystem::StructuredSystem(PatternMatrix a, PatternMatrix c)
    : a_(std::move(a)), c_(std::move(c)) {
  if (a_.rows() != a_.cols()) throw ValidationError("A pattern must be square");
  if (a_.rows() < 1) throw ValidationError("state dimension must be positive");
  if (c_.cols() != a_.rows()) throw ValidationError("C pattern must have n columns");
  if (c_.rows() < 1) throw ValidationError("at least one sensor is required");
  std::vector<bool> seen(c_.rows(), false);
  for (auto [i, j] : c_.support()) seen[i] = true;
  for (int i = 0; i < c_.rows(); ++i)
    if (!seen[i]) throw ValidationError("zero sensor row " + std::to_string(i + 1));
}

namespace {

StructuredSystem checked_dense(const Matrix& a, const Matrix& c,
                               const std::vector<std::string>& labels) {
  if (a.rows() != a.cols()) throw ValidationError("A must be square");
  if (a.rows() < 1) throw ValidationError("state dimension must be positive");
  if (c.cols() != a.rows()) throw ValidationError("C must have n columns");
  if (c.rows() < 1) throw ValidationError("at least one sensor is required");
  if (!a.allFinite() || !c.allFinite()) throw ValidationError("non-finite entry");
  for (int i = 0; i < c.rows(); ++i)
    if ((c.row(i).array() == 0.0).all())
      throw ValidationError("zero sensor row " + std::to_string(i + 1));
  if (!labels.empty() && labels.size() != static_cast<std::size_t>(c.rows()))
    throw ValidationError("sensor_labels must have r entries");
  return StructuredSystem(PatternMatrix::from_dense(a), PatternMatrix::from_dense(c));
}

}  // namespace

DenseSystem::DenseSystem(Matrix a, Matrix c, std::vector<std::string> sensor_labels)
    : a_(std::move(a)),
      c_(std::move(c)),
      labels_(std::move(sensor_labels)),
      pattern_(checked_dense(a_, c_, labels_)) {}

DenseSystem DenseSystem::without(const SensorSubset& removed) const {
  SensorSubset keep = removed.complement(r());
  if (keep.empty()) throw ValidationError("cannot remove every sensor");
  Matrix c(keep.size(), n());
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    c.row(static_cast<Eigen::Index>(k)) = c_.row(keep.indices()[k]);
    if (!labels_.empty()) labels.push_back(labels_[keep.indices()[k]]);
  }
  return DenseSystem(a_, std::move(c), std::move(labels));
}

CostVector::CostVector(std::vector<double> costs) : costs_(std::move(costs)) {
  for (double c : costs_)
    if (!std::isfinite(c) || c < 0.0) throw ValidationError("sensor costs must be finite and >= 0");
}

double CostVector::total(const SensorSubset& s) const {
  double t = 0.0;
  for (int i : s.indices()) t += costs_.at(i);
  return t;
}

int s_robust_index(int r_min) { return r_min <= 0 ? -1 : r_min - 1; }

int attack_tolerance_index(int r_min) { return r_min <= 0 ? 0 : (r_min - 1) / 2; }

DenseSystem dualize(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols()) throw ValidationError("A must be square");
  if (b.rows() != a.rows()) throw ValidationError("B must have n rows");
  for (int j = 0; j < b.cols(); ++j)
    if ((b.col(j).array() == 0.0).all())
      throw ValidationError("zero actuator column " + std::to_string(j + 1));
  return DenseSystem(a.transpose(), b.transpose());
}

}  // namespace obsrobust
