#include "obsrobust/structural.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "obsrobust/matching.hpp"

namespace obsrobust {

SystemDigraph::SystemDigraph(const StructuredSystem& sys)
    : state_out_(sys.n()), outputs_of_(sys.n()), sensors_of_(sys.r()) {
  for (auto [row, col] : sys.a().support()) state_out_[col].push_back(row);
  for (auto [row, col] : sys.c().support()) {
    outputs_of_[col].push_back(row);
    sensors_of_[row].push_back(col);
  }
  for (auto& v : state_out_) std::sort(v.begin(), v.end());
  for (auto& v : outputs_of_) std::sort(v.begin(), v.end());
}

std::vector<std::vector<int>> strongly_connected_components(const SystemDigraph& d) {
  const int n = d.n();
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<bool> on_stack(n, false);
  std::vector<std::vector<int>> comps;
  int counter = 0;

  for (int s = 0; s < n; ++s) {
    if (index[s] >= 0) continue;
    std::vector<std::pair<int, std::size_t>> work{{s, 0}};
    index[s] = low[s] = counter++;
    stack.push_back(s);
    on_stack[s] = true;
    while (!work.empty()) {
      auto& [v, next] = work.back();
      const auto& succ = d.successors(v);
      if (next < succ.size()) {
        int w = succ[next++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          work.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const int done = v;
      work.pop_back();
      if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
      if (low[done] == index[done]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != done);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
    }
  }
  std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

std::vector<std::vector<int>> sink_sccs(const SystemDigraph& d) {
  auto comps = strongly_connected_components(d);
  std::vector<int> comp_of(d.n());
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (int v : comps[c]) comp_of[v] = static_cast<int>(c);
  std::vector<std::vector<int>> out;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    bool sink = true;
    for (int v : comps[c])
      for (int w : d.successors(v))
        if (comp_of[w] != static_cast<int>(c)) sink = false;
    if (sink) out.push_back(comps[c]);
  }
  return out;
}

namespace {

std::vector<int> sensors_of_component(const SystemDigraph& d, const std::vector<int>& comp) {
  std::vector<int> js;
  for (int v : comp) js.insert(js.end(), d.outputs(v).begin(), d.outputs(v).end());
  std::sort(js.begin(), js.end());
  js.erase(std::unique(js.begin(), js.end()), js.end());
  return js;
}

// Rows of A followed by rows of C, columns = states.
BipartiteGraph stacked_graph(const PatternMatrix& a, const PatternMatrix& c) {
  std::vector<std::vector<int>> adj = a.row_lists();
  auto crows = c.row_lists();
  adj.insert(adj.end(), crows.begin(), crows.end());
  return BipartiteGraph(a.cols(), std::move(adj));
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SensorSubset output_reach_min(const StructuredSystem& sys) {
  SystemDigraph d(sys);
  std::vector<int> best;
  bool have = false;
  for (const auto& comp : sink_sccs(d)) {
    auto js = sensors_of_component(d, comp);
    if (!have || js.size() < best.size()) {
      best = std::move(js);
      have = true;
    }
  }
  return SensorSubset(std::move(best));
}

bool is_output_reachable(const StructuredSystem& sys) {
  SystemDigraph d(sys);
  for (const auto& comp : sink_sccs(d))
    if (sensors_of_component(d, comp).empty()) return false;
  return true;
}

bool satisfies_matching_condition(const StructuredSystem& sys) {
  return hopcroft_karp(stacked_graph(sys.a(), sys.c())).size == sys.n();
}

bool is_structurally_observable(const StructuredSystem& sys) {
  return is_output_reachable(sys) && satisfies_matching_condition(sys);
}

MatchingBranch matching_branch(const PatternMatrix& a, const PatternMatrix& c, const StructuralOptions& opts) {
  if (a.rows() != a.cols() || c.cols() != a.cols()) throw ValidationError("matching_branch: dimension mismatch");
  const int n = a.rows();
  const int r = c.rows();
  MatchingBranch out;
  BipartiteGraph g = stacked_graph(a, c);
  IncrementalMatching root(g, n);
  out.deficiency = n - root.base_rank();
  if (hopcroft_karp(g).size < n) {
    out.already_violated = true;
    return out;
  }
  if (out.deficiency == 0) {
    out.unbreakable = true;
    return out;
  }
  if (out.deficiency > opts.max_deficiency_cap) {
    std::ostringstream msg;
    msg << "matching deficiency " << out.deficiency << " exceeds the cap " << opts.max_deficiency_cap;
    throw CapExceeded(msg.str());
  }
  TreeResult tree = grow_tree(std::move(root), r, out.deficiency, opts.dedup);
  out.layer_sizes = tree.layer_sizes;
  bool have = false;
  for (const SensorBits& leaf : tree.leaves) {
    SensorSubset removal(leaf.non_members());
    if (!have || removal.size() < out.removal.size() ||
        (removal.size() == out.removal.size() && removal < out.removal)) {
      out.removal = std::move(removal);
      have = true;
    }
  }
  return out;
}

std::optional<SensorSubset> matching_min(const StructuredSystem& sys, const StructuralOptions& opts) {
  MatchingBranch mb = matching_branch(sys.a(), sys.c(), opts);
  if (mb.already_violated) return SensorSubset{};
  if (mb.unbreakable) return std::nullopt;
  return mb.removal;
}

std::vector<int> DMDecomposition::vertical_rows() const {
  const int start = row_blocks[0] + row_blocks[1];
  return {row_order.begin() + start, row_order.end()};
}

std::vector<int> DMDecomposition::vertical_cols() const {
  const int start = col_blocks[0] + col_blocks[1] + col_blocks[2];
  return {col_order.begin() + start, col_order.end()};
}

DMDecomposition dm_decompose(const PatternMatrix& p) {
  const int m = p.rows();
  const int c = p.cols();
  BipartiteGraph g(p);
  Matching mt = hopcroft_karp(g);

  std::vector<std::vector<int>> col_adj(c);
  for (auto [i, j] : p.support()) col_adj[j].push_back(i);

  // Horizontal tail: alternating paths from unmatched columns.
  std::vector<bool> row_h(m, false), col_h(c, false);
  std::vector<int> queue;
  for (int j = 0; j < c; ++j)
    if (mt.right_mate[j] < 0) {
      col_h[j] = true;
      queue.push_back(j);
    }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (int i : col_adj[queue[head]]) {
      if (row_h[i]) continue;
      row_h[i] = true;
      int j = mt.left_mate[i];
      if (j >= 0 && !col_h[j]) {
        col_h[j] = true;
        queue.push_back(j);
      }
    }
  }

  // Vertical tail: alternating paths from unmatched rows.
  std::vector<bool> row_v(m, false), col_v(c, false);
  queue.clear();
  for (int i = 0; i < m; ++i)
    if (mt.left_mate[i] < 0) {
      row_v[i] = true;
      queue.push_back(i);
    }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (int j : g.neighbors(queue[head])) {
      if (col_v[j]) continue;
      col_v[j] = true;
      int i = mt.right_mate[j];
      if (i >= 0 && !row_v[i]) {
        row_v[i] = true;
        queue.push_back(i);
      }
    }
  }

  DMDecomposition dm;
  dm.rows = m;
  dm.cols = c;
  dm.grank = mt.size;
  dm.deficiency = m - mt.size;

  // Matched rows in groups 1-3 are listed in the order of their mates so the
  // diagonal blocks carry the matching on their diagonals.
  std::vector<int> g1c, g2c, g3c, g4c;
  for (int j = 0; j < c; ++j) {
    if (col_h[j])
      (mt.right_mate[j] < 0 ? g1c : g2c).push_back(j);
    else if (col_v[j])
      g4c.push_back(j);
    else
      g3c.push_back(j);
  }
  std::vector<int> g1r, g2r, g3r, g4r;
  for (int j : g2c) g1r.push_back(mt.right_mate[j]);
  for (int j : g3c) g2r.push_back(mt.right_mate[j]);
  for (int j : g4c) g3r.push_back(mt.right_mate[j]);
  for (int i = 0; i < m; ++i)
    if (mt.left_mate[i] < 0) g4r.push_back(i);

  dm.row_blocks = {static_cast<int>(g1r.size()), static_cast<int>(g2r.size()), static_cast<int>(g3r.size()),
                   static_cast<int>(g4r.size())};
  dm.col_blocks = {static_cast<int>(g1c.size()), static_cast<int>(g2c.size()), static_cast<int>(g3c.size()),
                   static_cast<int>(g4c.size())};
  for (auto* grp : {&g1r, &g2r, &g3r, &g4r}) dm.row_order.insert(dm.row_order.end(), grp->begin(), grp->end());
  for (auto* grp : {&g1c, &g2c, &g3c, &g4c}) dm.col_order.insert(dm.col_order.end(), grp->begin(), grp->end());
  return dm;
}

ReducedSystem reduce_system(const StructuredSystem& sys) {
  DMDecomposition dm = dm_decompose(sys.a().transpose());
  ReducedSystem red;
  red.states = dm.vertical_rows();
  std::sort(red.states.begin(), red.states.end());
  red.a_rows = dm.vertical_cols();
  std::sort(red.a_rows.begin(), red.a_rows.end());

  const int n = sys.n();
  const int np = static_cast<int>(red.states.size());
  std::vector<int> state_pos(n, -1);
  for (int k = 0; k < np; ++k) state_pos[red.states[k]] = k;
  std::vector<int> row_pos(n, -1);
  for (std::size_t k = 0; k < red.a_rows.size(); ++k) row_pos[red.a_rows[k]] = static_cast<int>(k);

  std::vector<std::pair<int, int>> a_sup, c_sup;
  for (auto [i, j] : sys.a().support())
    if (row_pos[i] >= 0 && state_pos[j] >= 0) a_sup.emplace_back(row_pos[i], state_pos[j]);
  for (auto [i, j] : sys.c().support())
    if (state_pos[j] >= 0) c_sup.emplace_back(i, state_pos[j]);
  red.a = PatternMatrix(np, np, std::move(a_sup));
  red.c = PatternMatrix(sys.r(), np, std::move(c_sup));
  return red;
}

StructuralReport minsro_structural(const StructuredSystem& sys, bool use_dm, const StructuralOptions& opts) {
  StructuralReport rep;
  rep.dm_used = use_dm;
  rep.deficiency = sys.n() - grank(sys.a());
  if (!is_structurally_observable(sys)) {
    rep.observable = false;
    return rep;
  }

  auto t0 = std::chrono::steady_clock::now();
  rep.j_re = output_reach_min(sys);
  rep.wall_ms_reach = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  MatchingBranch mb;
  if (use_dm) {
    ReducedSystem red = reduce_system(sys);
    rep.reduced_n = red.n();
    rep.reduced_nonzero_rows = static_cast<int>(red.a_rows.size());
    mb = matching_branch(red.a, red.c, opts);
  } else {
    mb = matching_branch(sys.a(), sys.c(), opts);
  }
  rep.wall_ms_matching = ms_since(t0);
  rep.layer_sizes = mb.layer_sizes;
  if (mb.already_violated) throw Error("matching condition lost after reduction");
  if (!mb.unbreakable) rep.j_ma = mb.removal;

  if (rep.j_ma && rep.j_ma->size() <= rep.j_re.size()) {
    rep.j_opt = *rep.j_ma;
    rep.branch = Branch::matching;
  } else {
    rep.j_opt = rep.j_re;
    rep.branch = Branch::reachability;
  }
  return rep;
}

}  // namespace obsrobust
