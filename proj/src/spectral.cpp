#include "obsrobust/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace obsrobust {

namespace {

// Largest allowed distance (per column) between a cluster's eigenvectors and
// the null space at a merged mean before a defect merge is refused.
constexpr double kDefectAngleTol = 1e-1;

// A member shift replaces the mean only below this fraction of its sigma.
constexpr double kMemberPreference = 1e-3;

struct Cluster {
  std::vector<Complex> members;
  std::vector<double> reach;  // per member, filled on first use
  int id = 0;
  Complex mean() const {
    Complex s = 0.0;
    for (const Complex& z : members) s += z;
    return s / static_cast<double>(members.size());
  }
};

// Singular values are cut relative to max(sigma_1, scale). The scale keeps a
// shifted matrix that is pure roundoff (A close to lambda I) from counting as
// full rank. The null dimension is capped at max_dim when set.
struct NullCut {
  double scale = 0.0;
  Eigen::Index max_dim = -1;
};

struct NullResult {
  CMatrix basis;
  Complex value;
  double sigma_null = 0.0;       // largest singular value counted as null
  double sigma_kept = 0.0;
  double sigma_dropped = 0.0;
};

template <typename Mat>
NullResult null_space_impl(const Mat& m, double tol_rank, const NullCut& cut = {}) {
  NullResult out;
  const Eigen::Index cols = m.cols();
  if (cols == 0) return out;
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double s1 = std::max(s.size() > 0 ? s(0) : 0.0, cut.scale);
  Eigen::Index rank = 0;
  if (s1 > 0.0)
    while (rank < s.size() && s(rank) > tol_rank * s1) ++rank;
  if (cut.max_dim >= 0) rank = std::max(rank, cols - cut.max_dim);
  out.sigma_null = rank < s.size() ? s(rank) : 0.0;
  out.sigma_kept = rank > 0 && s1 > 0.0 ? s(rank - 1) / s1 : 0.0;
  out.sigma_dropped = (rank < s.size() && s1 > 0.0) ? s(rank) / s1 : 0.0;
  out.basis = svd.matrixV().rightCols(cols - rank).template cast<Complex>();
  return out;
}

Complex snap_real(Complex z, double tol_eig) {
  if (std::abs(z.imag()) <= tol_eig * (1.0 + std::abs(z))) return {z.real(), 0.0};
  return z;
}

NullResult null_at(const Matrix& a, Complex lambda, double tol_rank, const NullCut& cut) {
  const Eigen::Index n = a.rows();
  NullResult r;
  if (lambda.imag() == 0.0) {
    Matrix shifted = lambda.real() * Matrix::Identity(n, n) - a;
    r = null_space_impl(shifted, tol_rank, cut);
  } else {
    CMatrix shifted = lambda * CMatrix::Identity(n, n) - a.cast<Complex>();
    r = null_space_impl(shifted, tol_rank, cut);
  }
  r.value = lambda;
  return r;
}

// Null space of lambda I - A for a cluster. The shift is the cluster mean
// unless some member gives more null directions or a far smaller singular
// value, as when a semisimple eigenvalue sits inside a defective scatter.
// With clamp the dimension is capped at the member count.
NullResult cluster_null(const Matrix& a, const Cluster& c, double tol_eig, double tol_rank,
                        bool clamp = true) {
  NullCut cut;
  cut.scale = a.norm();
  if (clamp) cut.max_dim = static_cast<Eigen::Index>(c.members.size());
  std::vector<Complex> shifts{snap_real(c.mean(), tol_eig)};
  if (c.members.size() > 1)
    for (const Complex& z : c.members) shifts.push_back(snap_real(z, tol_eig));
  NullResult best;
  bool have = false;
  for (const Complex& z : shifts) {
    NullResult r = null_at(a, z, tol_rank, cut);
    const bool better = !have || r.basis.cols() > best.basis.cols() ||
                        (r.basis.cols() == best.basis.cols() &&
                         r.sigma_null < kMemberPreference * best.sigma_null);
    if (better) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

// The mean of a scattered defective eigenvalue is accurate; the midpoint of two
// distinct eigenvalues is not.
bool mean_is_eigenvalue(const Matrix& a, const Cluster& c, double tol_eig, double tol_rank) {
  NullCut cut;
  cut.scale = a.norm();
  cut.max_dim = static_cast<Eigen::Index>(c.members.size());
  return null_at(a, snap_real(c.mean(), tol_eig), tol_rank, cut).basis.cols() > 0;
}

// Condition number of z as an eigenvalue, from the singular vectors of the
// smallest singular value of zI - A (approximate left and right eigenvectors).
double eig_condition(const Matrix& a, Complex z) {
  const Eigen::Index n = a.rows();
  CMatrix shifted = z * CMatrix::Identity(n, n) - a.cast<Complex>();
  Eigen::BDCSVD<CMatrix> svd(shifted, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Complex overlap = svd.matrixU().col(n - 1).dot(svd.matrixV().col(n - 1));
  return 1.0 / std::max(std::abs(overlap), 1e-300);
}

// First-order drift of each member under a perturbation of size tol_rank ||A||.
void fill_reach(const Matrix& a, Cluster& c, double tol_rank) {
  if (!c.reach.empty()) return;
  const double noise = tol_rank * a.norm();
  for (const Complex& z : c.members) c.reach.push_back(eig_condition(a, z) * noise);
}

// Every member of a merged cluster must be ill-conditioned enough to have
// drifted from the merged mean under noise.
bool within_reach(const Cluster& c, double tol_eig) {
  const Complex m = snap_real(c.mean(), tol_eig);
  for (std::size_t k = 0; k < c.members.size(); ++k)
    if (std::abs(c.members[k] - m) > c.reach[k]) return false;
  return true;
}

bool contained(const CMatrix& x, const CMatrix& basis) {
  if (x.cols() == 0) return true;
  if (basis.cols() == 0) return false;
  CMatrix resid = x - basis * (basis.adjoint() * x);
  for (Eigen::Index j = 0; j < resid.cols(); ++j)
    if (resid.col(j).norm() > kDefectAngleTol) return false;
  return true;
}

bool value_less(const Complex& x, const Complex& y) {
  if (x.real() != y.real()) return x.real() < y.real();
  return x.imag() < y.imag();
}

}  // namespace

void Tolerances::validate() const {
  if (!(tol_eig > 0.0) || !(tol_rank > 0.0) || !(residual_cap > 0.0) || !(tol_defect > 0.0))
    throw ValidationError("tolerances must be strictly positive");
}

int rank_tol(const CMatrix& m, double tol_rank) {
  if (m.size() == 0) return 0;
  if (!m.allFinite()) throw ValidationError("non-finite entry in rank computation");
  Eigen::BDCSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  while (rank < s.size() && s(rank) > tol_rank * s(0)) ++rank;
  return rank;
}

int rank_tol(const Matrix& m, double tol_rank) {
  if (m.size() == 0) return 0;
  if (!m.allFinite()) throw ValidationError("non-finite entry in rank computation");
  Eigen::BDCSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  while (rank < s.size() && s(rank) > tol_rank * s(0)) ++rank;
  return rank;
}

CMatrix null_space(const CMatrix& m, double tol_rank, double* sigma_kept, double* sigma_dropped) {
  NullResult r = null_space_impl(m, tol_rank);
  if (sigma_kept) *sigma_kept = r.sigma_kept;
  if (sigma_dropped) *sigma_dropped = r.sigma_dropped;
  return r.basis;
}

bool span_contains(const CMatrix& ys, const CMatrix& y, double tol_rank) {
  if (y.rows() != 1) throw ValidationError("span_contains expects a single row");
  if (ys.rows() > 0 && ys.cols() != y.cols()) throw ValidationError("column count mismatch");
  const double ynorm = y.norm();
  CVector z = y.adjoint();
  if (ys.rows() > 0) {
    Eigen::BDCSVD<CMatrix> svd(ys, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    if (s.size() > 0 && s(0) > 0.0)
      while (rank < s.size() && s(rank) > tol_rank * s(0)) ++rank;
    if (rank > 0) {
      const auto v = svd.matrixV().leftCols(rank);
      z -= v * (v.adjoint() * z);
    }
  }
  return z.norm() <= tol_rank * ynorm;
}

EigenStructure eigenstructure(const Matrix& a, const Tolerances& tol) {
  tol.validate();
  if (a.rows() != a.cols() || a.rows() == 0) throw ValidationError("A must be square and nonempty");
  if (!a.allFinite()) throw ValidationError("non-finite entry in A");
  const Eigen::Index n = a.rows();

  Eigen::EigenSolver<Matrix> solver(a, false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue solver did not converge");
  std::vector<Complex> values(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::sort(values.begin(), values.end(), value_less);

  // Single-linkage clustering at the relative radius tol_eig.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double radius = tol.tol_eig * (1.0 + std::max(std::abs(values[i]), std::abs(values[j])));
      if (std::abs(values[i] - values[j]) <= radius) parent[find(i)] = find(j);
    }
  std::vector<Cluster> clusters;
  {
    std::vector<int> slot(n, -1);
    for (int i = 0; i < n; ++i) {
      int root = find(i);
      if (slot[root] < 0) {
        slot[root] = static_cast<int>(clusters.size());
        clusters.emplace_back();
        clusters.back().id = slot[root];
      }
      clusters[slot[root]].members.push_back(values[i]);
    }
  }

  std::vector<NullResult> nulls;
  nulls.reserve(clusters.size());
  for (const Cluster& c : clusters) nulls.push_back(cluster_null(a, c, tol.tol_eig, tol.tol_rank));

  // Fold scattered defective eigenvalues back together. A pair that failed the
  // containment test stays rejected until one side changes.
  std::set<std::pair<int, int>> rejected;
  int next_id = static_cast<int>(clusters.size());
  for (bool merged = true; merged;) {
    merged = false;
    struct Candidate {
      double dist;
      std::size_t i, j;
    };
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        Complex mi = clusters[i].mean(), mj = clusters[j].mean();
        double d = std::abs(mi - mj);
        if (rejected.count(std::minmax(clusters[i].id, clusters[j].id))) continue;
        if (d <= tol.tol_defect * (1.0 + std::max(std::abs(mi), std::abs(mj))))
          cands.push_back({d, i, j});
      }
    std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
      return std::tie(x.dist, x.i, x.j) < std::tie(y.dist, y.i, y.j);
    });
    for (const Candidate& c : cands) {
      fill_reach(a, clusters[c.i], tol.tol_rank);
      fill_reach(a, clusters[c.j], tol.tol_rank);
      Cluster joined = clusters[c.i];
      joined.members.insert(joined.members.end(), clusters[c.j].members.begin(),
                            clusters[c.j].members.end());
      joined.reach.insert(joined.reach.end(), clusters[c.j].reach.begin(), clusters[c.j].reach.end());
      if (!within_reach(joined, tol.tol_eig)) {
        rejected.insert(std::minmax(clusters[c.i].id, clusters[c.j].id));
        continue;
      }
      // containment against the full null space: semisimple copies of the
      // same eigenvalue outside the pair may share it
      NullResult nr = cluster_null(a, joined, tol.tol_eig, tol.tol_rank, false);
      if (nr.basis.cols() == 0 || !mean_is_eigenvalue(a, joined, tol.tol_eig, tol.tol_rank) ||
          !contained(nulls[c.i].basis, nr.basis) ||
          !contained(nulls[c.j].basis, nr.basis)) {
        rejected.insert(std::minmax(clusters[c.i].id, clusters[c.j].id));
        continue;
      }
      joined.id = next_id++;
      clusters[c.i] = std::move(joined);
      nulls[c.i] = cluster_null(a, clusters[c.i], tol.tol_eig, tol.tol_rank);
      clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(c.j));
      nulls.erase(nulls.begin() + static_cast<std::ptrdiff_t>(c.j));
      merged = true;
      break;
    }
  }

  const double a_scale = std::max(1.0, a.norm());
  EigenStructure out;
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    EigenPair pair;
    pair.value = nulls[k].value;
    pair.algebraic_count = static_cast<int>(clusters[k].members.size());
    pair.basis = std::move(nulls[k].basis);
    pair.multiplicity = static_cast<int>(pair.basis.cols());
    pair.sigma_kept = nulls[k].sigma_kept;
    pair.sigma_dropped = nulls[k].sigma_dropped;
    if (pair.multiplicity == 0) {
      std::ostringstream msg;
      msg << "eigenvalue " << pair.value << " has no numerical null space at tol_rank="
          << tol.tol_rank << " (sigma_min/sigma_1=" << pair.sigma_dropped << "); A is too ill-conditioned";
      throw NumericalError(msg.str());
    }
    CMatrix res = a.cast<Complex>() * pair.basis - pair.value * pair.basis;
    pair.residual = res.norm();
    if (pair.residual > tol.residual_cap * a_scale) {
      std::ostringstream msg;
      msg << "eigenbasis residual " << pair.residual << " at eigenvalue " << pair.value
          << " exceeds the cap";
      throw NumericalError(msg.str());
    }
    out.pairs.push_back(std::move(pair));
  }
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const EigenPair& x, const EigenPair& y) { return value_less(x.value, y.value); });

  for (std::size_t i = 0; i < out.pairs.size(); ++i) {
    EigenPair& lower = out.pairs[i];
    if (lower.value.imag() >= 0.0) continue;
    const Complex target = std::conj(lower.value);
    double best = tol.tol_defect * (1.0 + std::abs(target));
    for (std::size_t j = 0; j < out.pairs.size(); ++j) {
      const EigenPair& upper = out.pairs[j];
      if (upper.value.imag() <= 0.0 || upper.multiplicity != lower.multiplicity) continue;
      double d = std::abs(upper.value - target);
      if (d <= best) {
        best = d;
        lower.conjugate_of = static_cast<int>(j);
      }
    }
  }
  for (const EigenPair& p : out.pairs) out.max_multiplicity = std::max(out.max_multiplicity, p.multiplicity);
  return out;
}

bool is_observable(const Matrix& c, const EigenStructure& es, const Tolerances& tol) {
  // Unit-norm sensor rows; the cutoff never drops below tol_rank so that a
  // product that is zero up to rounding counts as rank deficient.
  Matrix cn = c;
  for (Eigen::Index i = 0; i < cn.rows(); ++i) {
    double nrm = cn.row(i).norm();
    if (nrm > 0.0) cn.row(i) /= nrm;
  }
  const CMatrix cc = cn.cast<Complex>();
  for (const EigenPair& p : es.pairs) {
    CMatrix y = cc * p.basis;
    Eigen::BDCSVD<CMatrix> svd(y);
    const auto& s = svd.singularValues();
    const double cut = tol.tol_rank * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
    int rank = 0;
    while (rank < s.size() && s(rank) > cut) ++rank;
    if (rank < p.multiplicity) return false;
  }
  return true;
}

bool is_observable(const DenseSystem& sys, const Tolerances& tol) {
  return is_observable(sys.c(), eigenstructure(sys.a(), tol), tol);
}

}  // namespace obsrobust
