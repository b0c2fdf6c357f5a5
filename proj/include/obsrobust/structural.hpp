#pragma once

#include <array>
#include <optional>
#include <vector>

#include "obsrobust/core.hpp"
#include "obsrobust/tree.hpp"

namespace obsrobust {

/// D(A, C): state vertices x_0..x_{n-1}, output vertices y_0..y_{r-1};
/// x_i -> x_j for every free A(j, i), x_j -> y_i for every free C(i, j).
class SystemDigraph {
 public:
  explicit SystemDigraph(const StructuredSystem& sys);

  int n() const { return static_cast<int>(state_out_.size()); }
  int r() const { return static_cast<int>(sensors_of_.size()); }
  const std::vector<int>& successors(int x) const { return state_out_[x]; }
  /// Sensors y_i with an edge from x.
  const std::vector<int>& outputs(int x) const { return outputs_of_[x]; }
  /// States read by sensor i.
  const std::vector<int>& sensed(int i) const { return sensors_of_[i]; }

 private:
  std::vector<std::vector<int>> state_out_;
  std::vector<std::vector<int>> outputs_of_;
  std::vector<std::vector<int>> sensors_of_;
};

/// Strongly connected components of D(A) (Tarjan). Each component is sorted;
/// components are ordered by their smallest state.
std::vector<std::vector<int>> strongly_connected_components(const SystemDigraph& d);

/// SCCs of D(A) with no edge to another SCC.
std::vector<std::vector<int>> sink_sccs(const SystemDigraph& d);

/// The smallest sensor set whose removal leaves some state without a path to
/// an output: min over sink SCCs of the sensors reading that SCC. Ties go to
/// the SCC with the smallest state index.
SensorSubset output_reach_min(const StructuredSystem& sys);

bool is_output_reachable(const StructuredSystem& sys);
/// grank([A^T, C^T]) == n.
bool satisfies_matching_condition(const StructuredSystem& sys);
bool is_structurally_observable(const StructuredSystem& sys);

struct StructuralOptions {
  int max_deficiency_cap = 8;
  DedupMode dedup = DedupMode::layer;
};

struct MatchingBranch {
  bool already_violated = false;   // grank([A^T, C^T]) < n on entry
  bool unbreakable = false;        // grank(A) == n: no removal breaks the condition
  int deficiency = 0;              // n - grank(A)
  SensorSubset removal;            // J_ma when neither flag is set
  std::vector<std::size_t> layer_sizes;
};

/// Matching branch on an arbitrary (A, C) pattern pair. C rows may be empty.
MatchingBranch matching_branch(const PatternMatrix& a, const PatternMatrix& c,
                               const StructuralOptions& opts = {});

/// J_ma for a structured system; nullopt is the infinite sentinel.
std::optional<SensorSubset> matching_min(const StructuredSystem& sys, const StructuralOptions& opts = {});

/// Coarse Dulmage-Mendelsohn decomposition.
///
/// Row groups (top to bottom) and column groups (left to right) follow the
/// block template
///     [ M11 M12 M13 M14 ]
///     [  0   0  M23 M24 ]
///     [  0   0   0  M34 ]
///     [  0   0   0  M44 ]
/// with M12, M23, M34 square and matched along their diagonals. Column
/// group 1 holds the unmatched columns, row group 4 the unmatched rows.
struct DMDecomposition {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_order;   // permuted position -> original row
  std::vector<int> col_order;   // permuted position -> original column
  std::array<int, 4> row_blocks{};
  std::array<int, 4> col_blocks{};
  int grank = 0;
  int deficiency = 0;           // rows - grank

  /// Original rows in row groups 3 and 4 (the vertical tail).
  std::vector<int> vertical_rows() const;
  /// Original columns in column group 4.
  std::vector<int> vertical_cols() const;
};

DMDecomposition dm_decompose(const PatternMatrix& p);

/// The matching-branch reduction: DM of A^T, keep the vertical tail.
struct ReducedSystem {
  PatternMatrix a;               // n' x n', rows past |a_rows| are zero
  PatternMatrix c;               // r x n', rows may be empty
  std::vector<int> states;       // reduced state -> original state
  std::vector<int> a_rows;       // reduced A row -> original A row
  int n() const { return a.rows(); }
};

ReducedSystem reduce_system(const StructuredSystem& sys);

enum class Branch { none, reachability, matching };

struct StructuralReport {
  bool observable = true;
  SensorSubset j_opt;
  SensorSubset j_re;
  std::optional<SensorSubset> j_ma;  // nullopt = infinite
  Branch branch = Branch::none;
  int deficiency = 0;
  bool dm_used = false;
  int reduced_n = 0;
  int reduced_nonzero_rows = 0;
  std::vector<std::size_t> layer_sizes;
  double wall_ms_reach = 0.0;
  double wall_ms_matching = 0.0;
};

StructuralReport minsro_structural(const StructuredSystem& sys, bool use_dm,
                                   const StructuralOptions& opts = {});

}  // namespace obsrobust
