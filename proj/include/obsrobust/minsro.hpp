#pragma once

#include <optional>
#include <vector>

#include "obsrobust/core.hpp"
#include "obsrobust/spectral.hpp"
#include "obsrobust/tree.hpp"

namespace obsrobust {

/// Rows c_j X for one eigenvalue, plus ||c_j|| so that rows orthogonal to
/// the eigenspace can be recognised relative to their sensor.
struct SensorTable {
  int kappa = 0;
  CMatrix y;                       // r x k
  std::vector<double> row_scale;   // ||c_j||

  int r() const { return static_cast<int>(y.rows()); }
  int k() const { return static_cast<int>(y.cols()); }
};

SensorTable sensor_table(const Matrix& c, const CMatrix& x_kappa, int kappa = 0);

/// Incremental orthonormal basis of the row space spanned by the chosen
/// rows of a SensorTable (Gram-Schmidt with one reorthogonalisation).
class RowSpace {
 public:
  RowSpace(const SensorTable& table, double tol_rank);

  bool increases(int j) const;
  void add(int j);
  int rank() const { return static_cast<int>(basis_.cols()); }

 private:
  CVector residual(int j) const;

  const SensorTable* table_;
  double tol_;
  CMatrix basis_;  // k x rank, orthonormal columns
};

/// T together with every row already in the span of T's rows.
SensorSubset closure(const SensorTable& table, const SensorSubset& t, double tol_rank);

struct SearchOptions {
  int max_multiplicity_cap = 8;
  DedupMode dedup = DedupMode::layer;
  bool search_conjugates = false;  // otherwise copy the partner's answer
  int threads = 1;
  bool keep_leaves = false;
};

struct EigSearch {
  bool deficient = false;          // rank(Y) < k on entry
  int r_kappa = 0;
  SensorSubset removal;            // F_kappa
  double cost = 0.0;
  std::vector<std::size_t> layer_sizes;
  std::vector<SensorSubset> leaves;  // only with keep_leaves
};

/// Smallest set of rows whose removal makes Y column-rank deficient. With
/// costs, the cheapest such set (ties: fewer rows, then lexicographic).
EigSearch minsro_eig(const SensorTable& table, int k, const Tolerances& tol,
                     const SearchOptions& opts = {}, const CostVector* costs = nullptr);

RobustnessReport minsro(const DenseSystem& sys, const Tolerances& tol = {},
                        const SearchOptions& opts = {});
RobustnessReport minsro(const DenseSystem& sys, const EigenStructure& es, const Tolerances& tol,
                        const SearchOptions& opts);

/// Cost-weighted variant; r_c_min / f_c_min hold the optimum and r_min /
/// f_min are filled from the same trees.
RobustnessReport minsro_cost(const DenseSystem& sys, const CostVector& costs,
                             const Tolerances& tol = {}, const SearchOptions& opts = {});
RobustnessReport minsro_cost(const DenseSystem& sys, const EigenStructure& es, const CostVector& costs,
                             const Tolerances& tol, const SearchOptions& opts);

/// Shortcut for simple spectra: r_min = min_i |{j : c_j x_i != 0}|.
/// Throws if some eigenvalue is not simple.
int minsro_simple_spectrum(const DenseSystem& sys, const Tolerances& tol = {});

}  // namespace obsrobust
