#pragma once

#include "obsrobust/core.hpp"

namespace obsrobust {

/// Exhaustive answers used to check the search algorithms. Nothing here
/// shares code with the eigenvalue or matching paths.
struct OracleResult {
  bool observable = true;  // the full sensor set passes
  int r_min = 0;
  SensorSubset witness;    // lexicographically first optimal set
  double cost = 0.0;       // only for the cost oracle
};

inline constexpr int kOracleSensorCap = 20;

/// Observability by the staircase reduction of the observability matrix
/// [C; CA; ...; CA^(n-1)], carried out in long double.
bool kalman_observable(const Matrix& a, const Matrix& c, double tol = 1e-9);

/// Generic observability by direct search: backward reachability from the
/// sensed states and a simple augmenting-path matching on [A; C].
bool structural_check(const PatternMatrix& a, const PatternMatrix& c);

/// Sweeps sensor subsets in increasing size (lexicographic within a size)
/// and stops at the first one whose removal breaks observability.
OracleResult brute_force_numeric(const DenseSystem& sys, double tol = 1e-9);
OracleResult brute_force_structural(const StructuredSystem& sys);

/// Cheapest removal; ties go to fewer sensors, then lexicographic order.
OracleResult brute_force_cost(const DenseSystem& sys, const CostVector& costs, double tol = 1e-9);

}  // namespace obsrobust
