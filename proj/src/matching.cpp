#include "obsrobust/matching.hpp"

#include <limits>
#include <queue>

namespace obsrobust {

BipartiteGraph::BipartiteGraph(const PatternMatrix& p) : right_(p.cols()), adj_(p.row_lists()) {}

BipartiteGraph::BipartiteGraph(int right, std::vector<std::vector<int>> adj)
    : right_(right), adj_(std::move(adj)) {
  for (const auto& row : adj_)
    for (int v : row)
      if (v < 0 || v >= right_) throw ValidationError("bipartite edge out of range");
}

namespace {

constexpr int kInf = std::numeric_limits<int>::max();

struct HopcroftKarp {
  const BipartiteGraph& g;
  const std::vector<bool>& active;
  Matching& m;
  std::vector<int> dist;

  bool is_active(int u) const { return active.empty() || active[u]; }

  bool bfs() {
    std::queue<int> q;
    bool found = false;
    for (int u = 0; u < g.left(); ++u) {
      if (is_active(u) && m.left_mate[u] < 0) {
        dist[u] = 0;
        q.push(u);
      } else {
        dist[u] = kInf;
      }
    }
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : g.neighbors(u)) {
        int w = m.right_mate[v];
        if (w < 0) {
          found = true;
        } else if (dist[w] == kInf) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  }

  // Iterative DFS along the layered graph.
  bool dfs(int root) {
    std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
    std::vector<int> path_cols;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      const auto& nb = g.neighbors(u);
      bool advanced = false;
      while (next < nb.size()) {
        int v = nb[next++];
        int w = m.right_mate[v];
        if (w < 0) {
          path_cols.push_back(v);
          // augment along the stack
          for (std::size_t k = stack.size(); k-- > 0;) {
            int row = stack[k].first;
            int col = path_cols[k];
            m.left_mate[row] = col;
            m.right_mate[col] = row;
          }
          return true;
        }
        if (dist[w] == dist[u] + 1) {
          path_cols.push_back(v);
          stack.push_back({w, 0});
          advanced = true;
          break;
        }
      }
      if (!advanced) {
        dist[stack.back().first] = kInf;
        stack.pop_back();
        if (!path_cols.empty()) path_cols.pop_back();
      }
    }
    return false;
  }
};

}  // namespace

Matching hopcroft_karp(const BipartiteGraph& g, const std::vector<bool>& active) {
  Matching m;
  m.left_mate.assign(g.left(), -1);
  m.right_mate.assign(g.right(), -1);
  HopcroftKarp hk{g, active, m, std::vector<int>(g.left(), kInf)};
  while (hk.bfs()) {
    for (int u = 0; u < g.left(); ++u)
      if (hk.is_active(u) && m.left_mate[u] < 0 && hk.dfs(u)) ++m.size;
  }
  return m;
}

int grank(const PatternMatrix& p) { return hopcroft_karp(BipartiteGraph(p)).size; }

IncrementalMatching::IncrementalMatching(const BipartiteGraph& g, int base_rows)
    : g_(&g), base_rows_(base_rows) {
  std::vector<bool> active(g.left(), false);
  for (int u = 0; u < base_rows; ++u) active[u] = true;
  Matching m = hopcroft_karp(g, active);
  left_mate_ = std::move(m.left_mate);
  right_mate_ = std::move(m.right_mate);
  base_rank_ = size_ = m.size;
}

bool IncrementalMatching::search(int row, std::vector<int>* parent_col) const {
  // BFS over alternating paths; parent_col[v] is the row that reached column v.
  std::vector<int> reached(g_->right(), -1);
  std::vector<int> queue{row};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    int u = queue[head];
    for (int v : g_->neighbors(u)) {
      if (reached[v] >= 0) continue;
      reached[v] = u;
      int w = right_mate_[v];
      if (w < 0) {
        if (parent_col) {
          *parent_col = std::move(reached);
          parent_col->push_back(v);  // terminal column stored last
        }
        return true;
      }
      queue.push_back(w);
    }
  }
  return false;
}

bool IncrementalMatching::increases(int j) const {
  int row = base_rows_ + j;
  if (left_mate_[row] >= 0) return false;
  return search(row, nullptr);
}

void IncrementalMatching::add(int j) {
  int row = base_rows_ + j;
  std::vector<int> parent;
  if (left_mate_[row] >= 0 || !search(row, &parent)) return;
  int v = parent.back();
  parent.pop_back();
  while (v >= 0) {
    int u = parent[v];
    int prev = left_mate_[u];
    left_mate_[u] = v;
    right_mate_[v] = u;
    v = (u == row) ? -1 : prev;
  }
  ++size_;
}

}  // namespace obsrobust
