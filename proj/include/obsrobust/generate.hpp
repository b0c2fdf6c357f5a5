#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "obsrobust/core.hpp"
#include "obsrobust/spectral.hpp"

namespace obsrobust {

using Rng = std::mt19937_64;

/// splitmix64 mixing; derives independent sub-seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

struct ErParams {
  int n = 20;
  double c = 3.0;                // edge probability is c / n
  double sensor_fraction = 0.4;
  std::uint64_t seed = 0;
  bool self_loops = true;
  int multiplicity_cap = 5;      // keep instances with max multiplicity below this
  int max_attempts = 100;
};

struct ErInstance {
  DenseSystem sys;
  int attempts = 0;
  int max_multiplicity = 0;
};

/// Erdos-Renyi network: edge x_i -> x_j with probability c / n and weight
/// uniform on [-1, 1] stored at A(j, i); ceil(fraction * n) distinct states
/// carry one dedicated sensor each (rows ordered by state). Instances that
/// are unobservable, structurally unobservable or whose largest geometric
/// multiplicity reaches the cap are redrawn from the same stream.
ErInstance gen_er_system(const ErParams& params, const Tolerances& tol = {});

/// Dense instance from the degeneracy reduction: P = [X^T, N + eta 1] with
/// N a null-space basis of X, A = P diag(I_k, 2, ..., n-k+1) P^-1, C = I_n.
struct DegeneracyInstance {
  DenseSystem sys;
  Matrix p;
  double eta = 0.0;
};

DegeneracyInstance gen_degeneracy_instance(const Matrix& x);

struct Graph {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;  // 0-based, undirected
};

/// Structured instance from the clique reduction: q = C(k, 2) zero rows in
/// A followed by n - q all-free rows; C = [incidence(G), all-free padding of
/// q - k - 1 columns], n = p + q - k - 1.
StructuredSystem gen_clique_instance(const Graph& g, int k);

/// True iff g contains a clique on k vertices.
bool has_clique(const Graph& g, int k);

/// Random observable dense system with A = P D P^-1 (P orthogonal, D block
/// diagonal with repeated real eigenvalues and rotation blocks) and
/// C = Z P^T for a sparse small-integer Z. Every eigenvalue has geometric
/// multiplicity at most max_mult.
DenseSystem random_test_system(int n, int r, int max_mult, Rng& rng);

/// Random structured system that is structurally observable and whose A
/// pattern has matching deficiency at most max_deficiency.
StructuredSystem random_structured_system(int n, int r, double density, int max_deficiency, Rng& rng);

}  // namespace obsrobust
