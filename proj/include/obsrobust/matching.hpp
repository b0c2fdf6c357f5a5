#pragma once

#include <vector>

#include "obsrobust/core.hpp"

namespace obsrobust {

/// Bipartite graph B(M): left vertices are rows, right vertices columns,
/// one edge per free entry.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;
  explicit BipartiteGraph(const PatternMatrix& p);
  BipartiteGraph(int right, std::vector<std::vector<int>> adj);

  int left() const { return static_cast<int>(adj_.size()); }
  int right() const { return right_; }
  const std::vector<int>& neighbors(int u) const { return adj_[u]; }

 private:
  int right_ = 0;
  std::vector<std::vector<int>> adj_;
};

struct Matching {
  std::vector<int> left_mate;   // column matched to each row, or -1
  std::vector<int> right_mate;  // row matched to each column, or -1
  int size = 0;
};

/// Maximum matching restricted to the left vertices flagged in `active`
/// (all of them when `active` is empty). Hopcroft-Karp.
Matching hopcroft_karp(const BipartiteGraph& g, const std::vector<bool>& active = {});

/// Generic rank: cardinality of a maximum matching of B(P).
int grank(const PatternMatrix& p);

/// A maximum matching over a growing set of active rows. Rows are added one
/// at a time by augmenting-path search from the new row.
class IncrementalMatching {
 public:
  /// `g` must outlive this object. Starts from a maximum matching of the
  /// first `base_rows` left vertices; the remaining rows are candidates.
  IncrementalMatching(const BipartiteGraph& g, int base_rows);

  /// Would activating candidate `j` (0-based among candidates) raise the rank?
  bool increases(int j) const;
  /// Activates candidate j; augments when a path exists.
  void add(int j);
  int size() const { return size_; }
  int base_rank() const { return base_rank_; }

 private:
  bool search(int row, std::vector<int>* parent_col) const;

  const BipartiteGraph* g_;
  int base_rows_;
  int base_rank_ = 0;
  int size_ = 0;
  std::vector<int> left_mate_;
  std::vector<int> right_mate_;
};

}  // namespace obsrobust
