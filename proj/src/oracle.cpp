#include "obsrobust/oracle.hpp"

#include <functional>
#include <sstream>

namespace obsrobust {

namespace {

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LRow = Eigen::Matrix<long double, 1, Eigen::Dynamic>;

void check_cap(int r) {
  if (r > kOracleSensorCap) {
    std::ostringstream msg;
    msg << "brute force is limited to " << kOracleSensorCap << " sensors, got " << r;
    throw CapExceeded(msg.str());
  }
}

// Calls visit(subset) for every k-subset of {0..r-1} in lexicographic
// order until it returns true.
bool for_each_subset(int r, int k, const std::function<bool(const std::vector<int>&)>& visit) {
  std::vector<int> s(k);
  for (int i = 0; i < k; ++i) s[i] = i;
  while (true) {
    if (visit(s)) return true;
    int i = k - 1;
    while (i >= 0 && s[i] == r - k + i) --i;
    if (i < 0) return false;
    ++s[i];
    for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  }
}

Matrix keep_rows(const Matrix& c, const std::vector<int>& removed) {
  std::vector<bool> drop(c.rows(), false);
  for (int j : removed) drop[j] = true;
  Matrix out(c.rows() - static_cast<Eigen::Index>(removed.size()), c.cols());
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < c.rows(); ++j)
    if (!drop[j]) out.row(k++) = c.row(j);
  return out;
}

}  // namespace

bool kalman_observable(const Matrix& a, const Matrix& c, double tol) {
  const Eigen::Index n = a.rows();
  if (c.rows() == 0) return false;
  LMatrix al = a.cast<long double>();
  const long double scale = std::max<long double>(al.norm(), 1.0L);
  al /= scale;

  std::vector<LRow> basis;
  // v is either a unit C row or q A for a unit basis row q with ||A|| <= 1,
  // so an absolute cut on the projected remainder is relative to ||A||.
  auto absorb = [&](LRow v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const LRow& q : basis) v -= v.dot(q) * q;
    const long double rest = v.norm();
    if (rest <= tol) return false;
    basis.push_back(v / rest);
    return true;
  };

  std::vector<LRow> frontier;
  for (Eigen::Index j = 0; j < c.rows(); ++j) {
    LRow row = c.row(j).cast<long double>();
    if (row.norm() > 0 && absorb(row / row.norm())) frontier.push_back(basis.back());
  }
  while (!frontier.empty() && static_cast<Eigen::Index>(basis.size()) < n) {
    std::vector<LRow> next;
    for (const LRow& q : frontier)
      if (absorb(q * al)) next.push_back(basis.back());
    frontier = std::move(next);
  }
  return static_cast<Eigen::Index>(basis.size()) == n;
}

bool structural_check(const PatternMatrix& a, const PatternMatrix& c) {
  const int n = a.rows();
  auto arows = a.row_lists();
  auto crows = c.row_lists();

  // every state must reach a sensed state along A-edges (x_i -> x_j when A(j, i) is free)
  std::vector<bool> reach(n, false);
  std::vector<int> queue;
  for (const auto& row : crows)
    for (int j : row)
      if (!reach[j]) {
        reach[j] = true;
        queue.push_back(j);
      }
  for (std::size_t h = 0; h < queue.size(); ++h)
    for (int i : arows[queue[h]])
      if (!reach[i]) {
        reach[i] = true;
        queue.push_back(i);
      }
  for (bool b : reach)
    if (!b) return false;

  std::vector<std::vector<int>> rows = arows;
  rows.insert(rows.end(), crows.begin(), crows.end());
  std::vector<int> mate(n, -1);
  int size = 0;
  for (std::size_t u = 0; u < rows.size(); ++u) {
    std::vector<bool> seen(n, false);
    std::function<bool(int)> try_row = [&](int x) {
      for (int v : rows[x]) {
        if (seen[v]) continue;
        seen[v] = true;
        if (mate[v] < 0 || try_row(mate[v])) {
          mate[v] = x;
          return true;
        }
      }
      return false;
    };
    if (try_row(static_cast<int>(u))) ++size;
  }
  return size == n;
}

OracleResult brute_force_numeric(const DenseSystem& sys, double tol) {
  const int r = sys.r();
  check_cap(r);
  OracleResult out;
  if (!kalman_observable(sys.a(), sys.c(), tol)) {
    out.observable = false;
    return out;
  }
  for (int k = 1; k <= r; ++k) {
    bool hit = for_each_subset(r, k, [&](const std::vector<int>& s) {
      if (kalman_observable(sys.a(), keep_rows(sys.c(), s), tol)) return false;
      out.witness = SensorSubset(s);
      return true;
    });
    if (hit) {
      out.r_min = k;
      return out;
    }
  }
  throw Error("brute_force_numeric: no removal breaks observability");
}

OracleResult brute_force_structural(const StructuredSystem& sys) {
  const int r = sys.r();
  check_cap(r);
  OracleResult out;
  auto crows = sys.c().row_lists();
  auto without = [&](const std::vector<int>& s) {
    std::vector<bool> drop(r, false);
    for (int j : s) drop[j] = true;
    std::vector<std::pair<int, int>> sup;
    int k = 0;
    for (int j = 0; j < r; ++j) {
      if (drop[j]) continue;
      for (int col : crows[j]) sup.emplace_back(k, col);
      ++k;
    }
    return PatternMatrix(k, sys.n(), std::move(sup));
  };
  if (!structural_check(sys.a(), sys.c())) {
    out.observable = false;
    return out;
  }
  for (int k = 1; k <= r; ++k) {
    bool hit = for_each_subset(r, k, [&](const std::vector<int>& s) {
      if (structural_check(sys.a(), without(s))) return false;
      out.witness = SensorSubset(s);
      return true;
    });
    if (hit) {
      out.r_min = k;
      return out;
    }
  }
  throw Error("brute_force_structural: no removal breaks observability");
}

OracleResult brute_force_cost(const DenseSystem& sys, const CostVector& costs, double tol) {
  const int r = sys.r();
  check_cap(r);
  if (static_cast<int>(costs.size()) != r) throw ValidationError("cost vector must have r entries");
  OracleResult out;
  if (!kalman_observable(sys.a(), sys.c(), tol)) {
    out.observable = false;
    return out;
  }
  bool have = false;
  for (int k = 1; k <= r; ++k) {
    for_each_subset(r, k, [&](const std::vector<int>& s) {
      SensorSubset cand(s);
      const double cost = costs.total(cand);
      // sizes are visited in increasing order and subsets lexicographically,
      // so a strict improvement in cost is the only reason to replace
      if (have && cost >= out.cost) return false;
      if (kalman_observable(sys.a(), keep_rows(sys.c(), s), tol)) return false;
      out.witness = std::move(cand);
      out.cost = cost;
      out.r_min = k;
      have = true;
      return false;
    });
  }
  return out;
}

}  // namespace obsrobust
