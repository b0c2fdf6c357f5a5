#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "obsrobust/core.hpp"

namespace testing {

using obsrobust::CMatrix;
using obsrobust::Matrix;
using obsrobust::PatternMatrix;
using obsrobust::StructuredSystem;

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline CMatrix cmat(std::initializer_list<std::initializer_list<double>> rows) {
  return mat(rows).cast<std::complex<double>>();
}

/// Pattern from 1-based (row, col) pairs.
inline PatternMatrix pat(int rows, int cols, std::vector<std::pair<int, int>> one_based) {
  for (auto& [i, j] : one_based) {
    --i;
    --j;
  }
  return PatternMatrix(rows, cols, std::move(one_based));
}

inline PatternMatrix diag_pattern(int n) {
  std::vector<std::pair<int, int>> s;
  for (int i = 0; i < n; ++i) s.emplace_back(i, i);
  return PatternMatrix(n, n, s);
}

inline obsrobust::SensorSubset one_based(std::vector<int> v) {
  return obsrobust::SensorSubset::from_one_based(v);
}

/// Numeric column rank with Eigen's own rank-revealing QR.
inline int column_rank(const CMatrix& m, double tol = 1e-9) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<CMatrix> qr(m);
  qr.setThreshold(tol);
  return static_cast<int>(qr.rank());
}

/// Smallest number of rows whose removal leaves m column-rank deficient,
/// by enumeration over all row subsets.
inline int min_rows_to_break(const CMatrix& m, double tol = 1e-9) {
  const int r = static_cast<int>(m.rows());
  const int k = static_cast<int>(m.cols());
  int best = r;
  for (unsigned mask = 0; mask < (1u << r); ++mask) {
    const int removed = __builtin_popcount(mask);
    if (removed >= best) continue;
    CMatrix kept(r - removed, k);
    int t = 0;
    for (int j = 0; j < r; ++j)
      if (!(mask >> j & 1u)) kept.row(t++) = m.row(j);
    if (column_rank(kept, tol) < k) best = removed;
  }
  return best;
}

}  // namespace testing
