#include "obsrobust/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "obsrobust/matching.hpp"
#include "obsrobust/oracle.hpp"
#include "obsrobust/structural.hpp"

namespace obsrobust {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

ErInstance gen_er_system(const ErParams& prm, const Tolerances& tol) {
  if (prm.n < 2) throw ValidationError("ER generator needs n >= 2");
  if (!(prm.c > 0.0 && prm.c < prm.n)) throw ValidationError("ER generator needs 0 < c < n");
  if (!(prm.sensor_fraction > 0.0 && prm.sensor_fraction <= 1.0))
    throw ValidationError("sensor fraction must lie in (0, 1]");
  if (prm.max_attempts < 1) throw ValidationError("max_attempts must be positive");

  const int n = prm.n;
  const int m = std::max(1, static_cast<int>(std::ceil(prm.sensor_fraction * n - 1e-9)));
  const double p_edge = prm.c / n;
  Rng rng(prm.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight(-1.0, 1.0);

  for (int attempt = 1; attempt <= prm.max_attempts; ++attempt) {
    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j && !prm.self_loops) continue;
        if (unit(rng) >= p_edge) continue;
        double w = 0.0;
        while (w == 0.0) w = weight(rng);
        a(j, i) = w;
      }
    std::vector<int> states(n);
    std::iota(states.begin(), states.end(), 0);
    std::shuffle(states.begin(), states.end(), rng);
    states.resize(m);
    std::sort(states.begin(), states.end());
    Matrix c = Matrix::Zero(m, n);
    for (int k = 0; k < m; ++k) c(k, states[k]) = 1.0;

    DenseSystem sys(std::move(a), std::move(c));
    if (!is_structurally_observable(sys.pattern())) continue;
    EigenStructure es;
    try {
      es = eigenstructure(sys.a(), tol);
    } catch (const NumericalError&) {
      continue;
    }
    if (es.max_multiplicity >= prm.multiplicity_cap) continue;
    if (!is_observable(sys.c(), es, tol)) continue;
    return ErInstance{std::move(sys), attempt, es.max_multiplicity};
  }
  std::ostringstream msg;
  msg << "ER generator gave up after " << prm.max_attempts << " attempts (n=" << n << ", c=" << prm.c << ")";
  throw Error(msg.str());
}

DegeneracyInstance gen_degeneracy_instance(const Matrix& x) {
  const Eigen::Index k = x.rows();
  const Eigen::Index n = x.cols();
  if (k < 1 || k >= n) throw ValidationError("degeneracy generator needs 1 <= k < n");
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (!std::isfinite(x(i, j)) || x(i, j) != std::round(x(i, j)))
        throw ValidationError("degeneracy generator needs an integral X");
  Eigen::FullPivLU<Matrix> lu(x);
  if (lu.rank() != k) throw ValidationError("X must have full row rank");
  Matrix null_basis = lu.kernel();

  const double alpha2 = null_basis.cwiseAbs().maxCoeff();
  auto h_of = [&](double eta) {
    Matrix h(n, n);
    h.leftCols(k) = x.transpose();
    h.rightCols(n - k) = null_basis + Matrix::Constant(n, n - k, eta);
    return h;
  };
  // det H(eta) is affine in eta, so one of two distinct candidates works.
  for (double eta : {std::ceil(alpha2) + 1.0, std::ceil(alpha2) + 2.0}) {
    Matrix h = h_of(eta);
    double scale = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) scale *= h.col(j).norm();
    if (std::abs(h.determinant()) <= 1e-10 * scale) continue;
    Eigen::VectorXd gamma(n);
    for (Eigen::Index i = 0; i < n; ++i) gamma(i) = i < k ? 1.0 : static_cast<double>(i - k + 2);
    Matrix a = h * gamma.asDiagonal() * h.inverse();
    return DegeneracyInstance{DenseSystem(std::move(a), Matrix::Identity(n, n)), std::move(h), eta};
  }
  throw NumericalError("no admissible eta: H(eta) is singular at both candidates");
}

StructuredSystem gen_clique_instance(const Graph& g, int k) {
  const int p = g.vertices;
  const int r = static_cast<int>(g.edges.size());
  if (k < 4) throw ValidationError("clique construction needs k >= 4");
  if (p <= k + 1) throw ValidationError("clique construction needs p > k + 1");
  if (r < 1) throw ValidationError("clique construction needs at least one edge");
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : g.edges) {
    if (u < 0 || v < 0 || u >= p || v >= p || u == v) throw ValidationError("invalid graph edge");
    if (!seen.insert({std::min(u, v), std::max(u, v)}).second) throw ValidationError("duplicate graph edge");
  }
  const int q = k * (k - 1) / 2;
  const int n = p + q - k - 1;

  std::vector<std::pair<int, int>> a_sup;
  for (int i = q; i < n; ++i)
    for (int j = 0; j < n; ++j) a_sup.emplace_back(i, j);
  std::vector<std::pair<int, int>> c_sup;
  for (int e = 0; e < r; ++e) {
    auto [u, v] = g.edges[e];
    c_sup.emplace_back(e, std::min(u, v));
    c_sup.emplace_back(e, std::max(u, v));
    for (int j = p; j < n; ++j) c_sup.emplace_back(e, j);
  }
  return StructuredSystem(PatternMatrix(n, n, std::move(a_sup)), PatternMatrix(r, n, std::move(c_sup)));
}

bool has_clique(const Graph& g, int k) {
  const int p = g.vertices;
  if (k > p) return false;
  std::vector<std::vector<bool>> adj(p, std::vector<bool>(p, false));
  for (auto [u, v] : g.edges) adj[u][v] = adj[v][u] = true;
  std::vector<int> s(k);
  std::iota(s.begin(), s.end(), 0);
  while (true) {
    bool clique = true;
    for (int a = 0; a < k && clique; ++a)
      for (int b = a + 1; b < k && clique; ++b) clique = adj[s[a]][s[b]];
    if (clique) return true;
    int i = k - 1;
    while (i >= 0 && s[i] == p - k + i) --i;
    if (i < 0) return false;
    ++s[i];
    for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  }
}

DenseSystem random_test_system(int n, int r, int max_mult, Rng& rng) {
  if (n < 1 || r < 1 || max_mult < 1) throw ValidationError("random_test_system: bad sizes");
  std::uniform_int_distribution<int> coin(0, 99);

  for (int attempt = 0; attempt < 1000; ++attempt) {
    // spectrum: distinct real values on a 0.5 grid and distinct complex pairs
    std::vector<double> reals;
    for (int v = -5; v <= 5; ++v) reals.push_back(0.5 * v);
    std::shuffle(reals.begin(), reals.end(), rng);
    std::vector<std::pair<double, double>> pairs;
    for (int a = -2; a <= 2; ++a)
      for (int b = 1; b <= 3; ++b) pairs.emplace_back(0.5 * a, 0.5 * b);
    std::shuffle(pairs.begin(), pairs.end(), rng);

    Matrix d = Matrix::Zero(n, n);
    int pos = 0;
    std::size_t next_real = 0, next_pair = 0;
    while (pos < n) {
      const int left = n - pos;
      const bool complex_block = left >= 2 && coin(rng) < 30;
      if (complex_block) {
        auto [re, im] = pairs[next_pair++];
        int reps = 1;
        while (reps < max_mult && 2 * (reps + 1) <= left && coin(rng) < 35) ++reps;
        for (int t = 0; t < reps; ++t) {
          d(pos, pos) = re;
          d(pos + 1, pos + 1) = re;
          d(pos, pos + 1) = im;
          d(pos + 1, pos) = -im;
          pos += 2;
        }
      } else {
        double v = reals[next_real++];
        int reps = 1;
        while (reps < max_mult && reps + 1 <= left && coin(rng) < 45) ++reps;
        for (int t = 0; t < reps; ++t) d(pos, pos) = v, ++pos;
      }
    }

    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = gauss(rng);
    Matrix p = Eigen::HouseholderQR<Matrix>(g).householderQ();

    Matrix z = Matrix::Zero(r, n);
    const int vals[] = {-2, -1, 1, 2};
    std::uniform_int_distribution<int> pick(0, 3);
    std::uniform_int_distribution<int> col(0, n - 1);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < n; ++j)
        if (coin(rng) < 35) z(i, j) = vals[pick(rng)];
      if (z.row(i).isZero()) z(i, col(rng)) = vals[pick(rng)];
    }
    Matrix a = p * d * p.transpose();
    Matrix c = z * p.transpose();
    if (!kalman_observable(a, c)) continue;
    return DenseSystem(std::move(a), std::move(c));
  }
  throw Error("random_test_system: no observable draw");
}

StructuredSystem random_structured_system(int n, int r, double density, int max_deficiency, Rng& rng) {
  if (n < 1 || r < 1) throw ValidationError("random_structured_system: bad sizes");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> state(0, n - 1);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<std::pair<int, int>> a_sup, c_sup;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (unit(rng) < density) a_sup.emplace_back(i, j);
    for (int i = 0; i < r; ++i) {
      std::set<int> cols{state(rng)};
      if (unit(rng) < 0.3) cols.insert(state(rng));
      for (int j : cols) c_sup.emplace_back(i, j);
    }
    PatternMatrix a(n, n, std::move(a_sup));
    PatternMatrix c(r, n, std::move(c_sup));
    if (n - grank(a) > max_deficiency) continue;
    if (!structural_check(a, c)) continue;
    return StructuredSystem(std::move(a), std::move(c));
  }
  throw Error("random_structured_system: no admissible draw");
}

}  // namespace obsrobust
