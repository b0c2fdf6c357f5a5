#pragma once

#include <vector>

#include "obsrobust/core.hpp"

namespace obsrobust {

/// Numerical thresholds. All relative; all strictly positive.
struct Tolerances {
  double tol_eig = 1e-8;       // eigenvalue clustering radius, scaled by (1 + |lambda|)
  double tol_rank = 1e-9;      // singular-value cutoff relative to sigma_1
  double residual_cap = 1e-6;  // max ||(A - lambda I) X|| / max(1, ||A||)
  double tol_defect = 0.1;     // radius for merging scattered defective clusters

  void validate() const;
};

struct EigenPair {
  Complex value;
  int multiplicity = 0;        // geometric multiplicity k_i
  CMatrix basis;               // n x k_i, orthonormal columns
  int algebraic_count = 0;     // computed eigenvalues assigned to this cluster
  double sigma_kept = 0.0;     // smallest retained singular value / sigma_1
  double sigma_dropped = 0.0;  // largest discarded singular value / sigma_1
  double residual = 0.0;       // ||(A - lambda I) X||
  int conjugate_of = -1;       // index of the upper-half-plane partner
};

struct EigenStructure {
  std::vector<EigenPair> pairs;
  int max_multiplicity = 0;

  std::size_t p() const { return pairs.size(); }
};

/// Distinct eigenvalues, geometric multiplicities and orthonormal
/// eigenbases. Pairs are ordered by (real part, imaginary part).
///
/// Computed eigenvalues are grouped by single linkage at tol_eig. Groups
/// that lie within tol_defect of each other are then merged when
///  - the merged mean has a numerical null space,
///  - every member is ill-conditioned enough (condition number times
///    tol_rank ||A||) to have drifted that far from the mean, and
///  - the null space there contains both groups' eigenvectors.
/// This folds the scatter of a defective eigenvalue back into one cluster
/// and keeps nearby well-conditioned eigenvalues apart.
/// Each basis is the numerical null space of (lambda I - A), found by SVD.
EigenStructure eigenstructure(const Matrix& a, const Tolerances& tol = {});

/// Number of singular values above tol_rank * sigma_1 (0 for the zero matrix).
int rank_tol(const CMatrix& m, double tol_rank);
int rank_tol(const Matrix& m, double tol_rank);

/// Orthonormal basis (columns) of the numerical null space of m.
CMatrix null_space(const CMatrix& m, double tol_rank, double* sigma_kept = nullptr,
                   double* sigma_dropped = nullptr);

/// True iff row y lies in the row span of ys: the least-squares residual of
/// projecting y onto that span is at most tol_rank * ||y||.
bool span_contains(const CMatrix& ys, const CMatrix& y, double tol_rank);

/// Eigenbasis test: rank(C X_i) == k_i for every pair.
bool is_observable(const DenseSystem& sys, const Tolerances& tol = {});
bool is_observable(const Matrix& c, const EigenStructure& es, const Tolerances& tol = {});

}  // namespace obsrobust
