#pragma once

#include <cstdint>
#include <functional>
#include <unordered_set>
#include <vector>

namespace obsrobust {

/// Fixed-size bitset over sensor indices, used as the canonical key of a
/// closure node.
class SensorBits {
 public:
  SensorBits() = default;
  explicit SensorBits(int r) : r_(r), words_((r + 63) / 64, 0) {}

  int universe() const { return r_; }
  bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void merge(const SensorBits& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
  }
  int count() const {
    int c = 0;
    for (auto w : words_) c += __builtin_popcountll(w);
    return c;
  }
  std::vector<int> members() const {
    std::vector<int> out;
    for (int i = 0; i < r_; ++i)
      if (test(i)) out.push_back(i);
    return out;
  }
  std::vector<int> non_members() const {
    std::vector<int> out;
    for (int i = 0; i < r_; ++i)
      if (!test(i)) out.push_back(i);
    return out;
  }
  std::size_t hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (auto w : words_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
  friend bool operator==(const SensorBits&, const SensorBits&) = default;

 private:
  int r_ = 0;
  std::vector<std::uint64_t> words_;
};

struct SensorBitsHash {
  std::size_t operator()(const SensorBits& b) const { return b.hash(); }
};

/// How duplicate closures are handled while the tree grows.
enum class DedupMode {
  none,        // every child of every node is kept, duplicates included
  per_parent,  // children of one parent with equal closures become one node
  layer,       // a closure appears at most once per layer
};

struct TreeResult {
  std::vector<SensorBits> leaves;         // closures in the last layer
  std::vector<std::size_t> layer_sizes;   // node count per layer, root first
};

/// Grows the recursive closure tree over r sensors down to `depth` layers
/// (root = layer 0, leaves = layer depth-1).
///
/// `State` tracks the rank structure of the rows chosen so far and must
/// provide
///   bool increases(int j) const;  // adding row j raises the rank
///   void add(int j);              // adds a rank-raising row
/// The rank function must be a matroid rank (linear or transversal) so
/// that closures are well defined.
template <typename State>
TreeResult grow_tree(State root, int r, int depth, DedupMode mode,
                     std::size_t node_limit = 0) {
  struct Node {
    State state;
    SensorBits bits;
  };
  auto close = [r](const State& s, SensorBits bits) {
    for (int j = 0; j < r; ++j)
      if (!bits.test(j) && !s.increases(j)) bits.set(j);
    return bits;
  };

  TreeResult out;
  std::vector<Node> layer;
  {
    SensorBits b = close(root, SensorBits(r));
    layer.push_back({std::move(root), std::move(b)});
  }
  out.layer_sizes.push_back(1);

  for (int tau = 0; tau + 1 < depth; ++tau) {
    std::vector<Node> next;
    std::unordered_set<SensorBits, SensorBitsHash> seen;
    for (const Node& node : layer) {
      SensorBits handled = node.bits;
      for (int j = 0; j < r; ++j) {
        if (node.bits.test(j)) continue;
        if (mode != DedupMode::none && handled.test(j)) continue;
        State child = node.state;
        child.add(j);
        SensorBits cb = node.bits;
        cb.set(j);
        cb = close(child, std::move(cb));
        if (mode != DedupMode::none) handled.merge(cb);
        if (mode == DedupMode::layer && !seen.insert(cb).second) continue;
        next.push_back({std::move(child), std::move(cb)});
        if (node_limit && next.size() > node_limit)
          throw std::length_error("recursive tree exceeded node limit");
      }
    }
    layer = std::move(next);
    out.layer_sizes.push_back(layer.size());
  }

  out.leaves.reserve(layer.size());
  for (Node& node : layer) out.leaves.push_back(std::move(node.bits));
  return out;
}

}  // namespace obsrobust
