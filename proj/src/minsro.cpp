#include "obsrobust/minsro.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <sstream>
#include <thread>

namespace obsrobust {

SensorTable sensor_table(const Matrix& c, const CMatrix& x_kappa, int kappa) {
  if (c.cols() != x_kappa.rows()) throw ValidationError("sensor_table: C and X dimensions differ");
  SensorTable t;
  t.kappa = kappa;
  t.y = c.cast<Complex>() * x_kappa;
  t.row_scale.resize(c.rows());
  for (Eigen::Index j = 0; j < c.rows(); ++j) t.row_scale[j] = c.row(j).norm();
  return t;
}

RowSpace::RowSpace(const SensorTable& table, double tol_rank)
    : table_(&table), tol_(tol_rank), basis_(table.k(), 0) {}

CVector RowSpace::residual(int j) const {
  CVector u = table_->y.row(j).transpose();
  if (basis_.cols() > 0) {
    u -= basis_ * (basis_.adjoint() * u);
    u -= basis_ * (basis_.adjoint() * u);
  }
  return u;
}

bool RowSpace::increases(int j) const {
  const double unorm = table_->y.row(j).norm();
  if (unorm <= tol_ * table_->row_scale[j]) return false;
  if (basis_.cols() == table_->k()) return false;
  return residual(j).norm() > tol_ * unorm;
}

void RowSpace::add(int j) {
  CVector u = residual(j);
  basis_.conservativeResize(Eigen::NoChange, basis_.cols() + 1);
  basis_.col(basis_.cols() - 1) = u / u.norm();
}

SensorSubset closure(const SensorTable& table, const SensorSubset& t, double tol_rank) {
  RowSpace rs(table, tol_rank);
  for (int j : t.indices())
    if (rs.increases(j)) rs.add(j);
  std::vector<int> out(t.indices());
  for (int j = 0; j < table.r(); ++j)
    if (!t.contains(j) && !rs.increases(j)) out.push_back(j);
  return SensorSubset(std::move(out));
}

namespace {

// Orders candidate removal sets: lower cost, then fewer rows, then lexicographic.
bool better_removal(double cost_a, const SensorSubset& a, double cost_b, const SensorSubset& b) {
  if (cost_a != cost_b) return cost_a < cost_b;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

template <typename Fn>
void run_pool(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < count;) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

EigSearch minsro_eig(const SensorTable& table, int k, const Tolerances& tol, const SearchOptions& opts,
                     const CostVector* costs) {
  const int r = table.r();
  if (k != table.k()) throw ValidationError("minsro_eig: k must equal the column count of Y");
  if (costs && static_cast<int>(costs->size()) != r) throw ValidationError("cost vector must have r entries");
  if (k > opts.max_multiplicity_cap) {
    std::ostringstream msg;
    msg << "geometric multiplicity " << k << " exceeds the cap " << opts.max_multiplicity_cap;
    throw CapExceeded(msg.str());
  }

  EigSearch out;
  {
    RowSpace full(table, tol.tol_rank);
    for (int j = 0; j < r && full.rank() < k; ++j)
      if (full.increases(j)) full.add(j);
    if (full.rank() < k) {
      out.deficient = true;
      return out;
    }
  }

  TreeResult tree = grow_tree(RowSpace(table, tol.tol_rank), r, k, opts.dedup);
  out.layer_sizes = tree.layer_sizes;

  bool have = false;
  for (const SensorBits& leaf : tree.leaves) {
    SensorSubset removal(leaf.non_members());
    double cost = costs ? costs->total(removal) : static_cast<double>(removal.size());
    if (!have || better_removal(cost, removal, out.cost, out.removal)) {
      out.removal = std::move(removal);
      out.cost = cost;
      have = true;
    }
    if (opts.keep_leaves) out.leaves.emplace_back(leaf.members());
  }
  out.r_kappa = static_cast<int>(out.removal.size());
  return out;
}

namespace {

RobustnessReport run_search(const DenseSystem& sys, const EigenStructure& es, const Tolerances& tol,
                            const SearchOptions& opts, const CostVector* costs) {
  tol.validate();
  RobustnessReport rep;
  const std::size_t p = es.pairs.size();
  rep.per_eigenvalue.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    rep.per_eigenvalue[i].value = es.pairs[i].value;
    rep.per_eigenvalue[i].multiplicity = es.pairs[i].multiplicity;
    rep.per_eigenvalue[i].conjugate_of = opts.search_conjugates ? -1 : es.pairs[i].conjugate_of;
  }

  if (!is_observable(sys.c(), es, tol)) {
    rep.observable = false;
    rep.r_min = 0;
    rep.s_robust = s_robust_index(0);
    rep.attack_tolerance = attack_tolerance_index(0);
    if (costs) {
      rep.r_c_min = 0.0;
      rep.f_c_min = SensorSubset{};
    }
    return rep;
  }
  if (es.max_multiplicity > opts.max_multiplicity_cap) {
    std::ostringstream msg;
    msg << "maximum geometric multiplicity " << es.max_multiplicity << " exceeds the cap "
        << opts.max_multiplicity_cap << "; the search tree would be too large";
    throw CapExceeded(msg.str());
  }

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < p; ++i)
    if (rep.per_eigenvalue[i].conjugate_of < 0) todo.push_back(i);

  std::vector<EigSearch> found(p);
  run_pool(todo.size(), opts.threads, [&](std::size_t t) {
    const std::size_t i = todo[t];
    auto start = std::chrono::steady_clock::now();
    SensorTable table = sensor_table(sys.c(), es.pairs[i].basis, static_cast<int>(i));
    found[i] = minsro_eig(table, es.pairs[i].multiplicity, tol, opts, costs);
    rep.per_eigenvalue[i].wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  });
  for (std::size_t i = 0; i < p; ++i) {
    int src = rep.per_eigenvalue[i].conjugate_of;
    if (src >= 0) found[i] = found[src];
    if (found[i].deficient) {
      // borderline rank at the working tolerance: the Gram-Schmidt test
      // disagrees with the SVD test, so report the system as unobservable
      rep.observable = false;
      rep.r_min = 0;
      rep.s_robust = s_robust_index(0);
      rep.attack_tolerance = attack_tolerance_index(0);
      if (costs) {
        rep.r_c_min = 0.0;
        rep.f_c_min = SensorSubset{};
      }
      return rep;
    }
    EigenvalueResult& row = rep.per_eigenvalue[i];
    row.r_i = found[i].r_kappa;
    row.removal = found[i].removal;
    row.cost = found[i].cost;
    row.layer_sizes = found[i].layer_sizes;
  }

  // Earliest eigenvalue wins ties; the per-eigenvalue witness is already
  // the lexicographically smallest.
  int best = -1;
  for (std::size_t i = 0; i < p; ++i)
    if (best < 0 || found[i].r_kappa < found[best].r_kappa) best = static_cast<int>(i);
  rep.eigen_index = best;
  rep.r_min = found[best].r_kappa;
  rep.f_min = found[best].removal;
  if (costs) {
    int cbest = -1;
    for (std::size_t i = 0; i < p; ++i)
      if (cbest < 0 || found[i].cost < found[cbest].cost) cbest = static_cast<int>(i);
    rep.r_c_min = found[cbest].cost;
    rep.f_c_min = found[cbest].removal;
    rep.eigen_index = cbest;
  }
  rep.s_robust = s_robust_index(rep.r_min);
  rep.attack_tolerance = attack_tolerance_index(rep.r_min);
  return rep;
}

}  // namespace

RobustnessReport minsro(const DenseSystem& sys, const EigenStructure& es, const Tolerances& tol,
                        const SearchOptions& opts) {
  return run_search(sys, es, tol, opts, nullptr);
}

RobustnessReport minsro(const DenseSystem& sys, const Tolerances& tol, const SearchOptions& opts) {
  return run_search(sys, eigenstructure(sys.a(), tol), tol, opts, nullptr);
}

RobustnessReport minsro_cost(const DenseSystem& sys, const CostVector& costs, const Tolerances& tol,
                             const SearchOptions& opts) {
  return minsro_cost(sys, eigenstructure(sys.a(), tol), costs, tol, opts);
}

RobustnessReport minsro_cost(const DenseSystem& sys, const EigenStructure& es, const CostVector& costs,
                             const Tolerances& tol, const SearchOptions& opts) {
  if (static_cast<int>(costs.size()) != sys.r()) throw ValidationError("cost vector must have r entries");
  RobustnessReport card = run_search(sys, es, tol, opts, nullptr);
  if (!card.observable) {
    card.r_c_min = 0.0;
    card.f_c_min = SensorSubset{};
    return card;
  }
  RobustnessReport weighted = run_search(sys, es, tol, opts, &costs);
  card.r_c_min = weighted.r_c_min;
  card.f_c_min = weighted.f_c_min;
  for (std::size_t i = 0; i < card.per_eigenvalue.size(); ++i)
    card.per_eigenvalue[i].cost = weighted.per_eigenvalue[i].cost;
  return card;
}

int minsro_simple_spectrum(const DenseSystem& sys, const Tolerances& tol) {
  EigenStructure es = eigenstructure(sys.a(), tol);
  int best = sys.r();
  for (const EigenPair& p : es.pairs) {
    if (p.multiplicity != 1 || p.algebraic_count != 1)
      throw ValidationError("simple-spectrum shortcut requires distinct eigenvalues");
    int seen = 0;
    for (int j = 0; j < sys.r(); ++j) {
      Complex v = (sys.c().row(j).cast<Complex>() * p.basis)(0, 0);
      if (std::abs(v) > tol.tol_rank * sys.c().row(j).norm()) ++seen;
    }
    best = std::min(best, seen);
  }
  return best;
}

}  // namespace obsrobust
