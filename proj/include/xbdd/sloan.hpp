/// @file  sloan.hpp
/// @brief Sloan's profile-reducing vertex ordering on the variable
///        interaction graph
///
/// Weights W1 = 1 (distance to the end vertex) and W2 = 2 (degree). Start
/// and end vertices form a pseudo-peripheral pair found by repeated
/// breadth-first search. All ties go to the smaller input index, so the
/// result is deterministic. Connected components are numbered one after the
/// other, in order of their smallest vertex.

#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "models.hpp"

namespace xbdd {

/// Undirected simple graph on vertices 0..n-1
class interaction_graph {
public:
  explicit interaction_graph(std::size_t n) : _adj(n) {}

  /// The graph in which every group is a clique
  static interaction_graph from_groups(std::size_t n,
                                       const std::vector<std::vector<std::size_t>> &groups) {
    interaction_graph g(n);
    for (const auto &grp : groups)
      for (std::size_t i = 0; i < grp.size(); ++i)
        for (std::size_t j = i + 1; j < grp.size(); ++j)
          g.add_edge(grp[i], grp[j]);
    g.finish();
    return g;
  }

  void add_edge(std::size_t u, std::size_t v) {
    if (u == v)
      return;
    _adj[u].push_back(v);
    _adj[v].push_back(u);
  }

  /// Sorts and deduplicates the adjacency lists
  void finish() {
    for (auto &a : _adj) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
    }
  }

  std::size_t size() const noexcept { return _adj.size(); }
  const std::vector<std::size_t> &neighbors(std::size_t v) const { return _adj[v]; }
  std::size_t degree(std::size_t v) const { return _adj[v].size(); }

private:
  std::vector<std::vector<std::size_t>> _adj;
};

/// Sum over vertices of the distance in `order` back to the earliest of the
/// vertex and its neighbors. `order[k]` is the k-th vertex.
inline std::uint64_t profile(const interaction_graph &g, const std::vector<std::size_t> &order) {
  std::vector<std::size_t> pos(g.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    pos[order[k]] = k;
  std::uint64_t sum = 0;
  for (std::size_t v = 0; v < g.size(); ++v) {
    std::size_t first = pos[v];
    for (const std::size_t u : g.neighbors(v))
      first = std::min(first, pos[u]);
    sum += pos[v] - first;
  }
  return sum;
}

namespace detail {

struct level_structure {
  std::vector<std::size_t> distance; // npos outside the component
  std::vector<std::vector<std::size_t>> levels;

  std::size_t depth() const noexcept { return levels.size(); }
  std::size_t width() const noexcept {
    std::size_t w = 0;
    for (const auto &l : levels)
      w = std::max(w, l.size());
    return w;
  }
};

inline constexpr std::size_t unreached = static_cast<std::size_t>(-1);

inline level_structure bfs(const interaction_graph &g, std::size_t root) {
  level_structure ls;
  ls.distance.assign(g.size(), unreached);
  ls.distance[root] = 0;
  ls.levels.push_back({root});
  while (true) {
    std::vector<std::size_t> next;
    for (const std::size_t v : ls.levels.back())
      for (const std::size_t u : g.neighbors(v))
        if (ls.distance[u] == unreached) {
          ls.distance[u] = ls.levels.size();
          next.push_back(u);
        }
    if (next.empty())
      break;
    std::sort(next.begin(), next.end());
    ls.levels.push_back(std::move(next));
  }
  return ls;
}

/// Pseudo-peripheral pair of the component of `seed`
inline std::pair<std::size_t, std::size_t> peripheral_pair(const interaction_graph &g,
                                                           const std::vector<std::size_t> &component) {
  std::size_t start = component.front();
  for (const std::size_t v : component)
    if (g.degree(v) < g.degree(start))
      start = v;
  level_structure from_start = bfs(g, start);
  for (;;) {
    std::vector<std::size_t> candidates = from_start.levels.back();
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return g.degree(a) < g.degree(b); });
    std::size_t end = candidates.front();
    std::size_t best_width = static_cast<std::size_t>(-1);
    bool restarted = false;
    for (const std::size_t c : candidates) {
      level_structure from_c = bfs(g, c);
      if (from_c.depth() > from_start.depth()) {
        start = c;
        from_start = std::move(from_c);
        restarted = true;
        break;
      }
      if (from_c.width() < best_width) {
        best_width = from_c.width();
        end = c;
      }
    }
    if (!restarted)
      return {start, end};
  }
}

} // namespace detail

/// Sloan ordering of all vertices
inline std::vector<std::size_t> sloan_order(const interaction_graph &g) {
  constexpr std::int64_t W1 = 1, W2 = 2;
  enum class status { inactive, preactive, active, postactive };

  const std::size_t n = g.size();
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<bool> placed_component(n, false);
  std::vector<status> st(n, status::inactive);
  std::vector<std::int64_t> priority(n, 0);

  for (std::size_t seed = 0; seed < n; ++seed) {
    if (placed_component[seed])
      continue;
    const detail::level_structure comp_ls = detail::bfs(g, seed);
    std::vector<std::size_t> component;
    for (std::size_t v = 0; v < n; ++v)
      if (comp_ls.distance[v] != detail::unreached) {
        component.push_back(v);
        placed_component[v] = true;
      }

    const auto [s, e] = detail::peripheral_pair(g, component);
    const detail::level_structure to_end = detail::bfs(g, e);
    for (const std::size_t v : component)
      priority[v] = W1 * static_cast<std::int64_t>(to_end.distance[v]) -
                    W2 * static_cast<std::int64_t>(g.degree(v) + 1);

    std::vector<std::size_t> queue{s};
    st[s] = status::preactive;
    const auto enqueue = [&](std::size_t v) {
      st[v] = status::preactive;
      queue.push_back(v);
    };
    while (!queue.empty()) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < queue.size(); ++k)
        if (priority[queue[k]] > priority[queue[best]] ||
            (priority[queue[k]] == priority[queue[best]] && queue[k] < queue[best]))
          best = k;
      const std::size_t i = queue[best];
      queue.erase(queue.begin() + static_cast<std::ptrdiff_t>(best));

      if (st[i] == status::preactive)
        for (const std::size_t j : g.neighbors(i)) {
          priority[j] += W2;
          if (st[j] == status::inactive)
            enqueue(j);
        }
      st[i] = status::postactive;
      order.push_back(i);

      for (const std::size_t j : g.neighbors(i)) {
        if (st[j] != status::preactive)
          continue;
        st[j] = status::active;
        priority[j] += W2;
        for (const std::size_t k : g.neighbors(j)) {
          if (st[k] != status::postactive)
            priority[k] += W2;
          if (st[k] == status::inactive)
            enqueue(k);
        }
      }
    }
  }
  return order;
}

/// Sloan ordering of a model's state variables on its interaction graph
inline std::vector<std::size_t> order_variables_sloan(const model &m) {
  return sloan_order(
      interaction_graph::from_groups(variable_names(m).size(), interaction_groups(m)));
}

} // namespace xbdd
