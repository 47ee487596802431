/// @file  reduce.hpp
/// @brief Bottom-up Reduce sweep: unreduced arc stream -> canonical diagram

#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "diagram.hpp"
#include "substitution.hpp"

namespace xbdd {

namespace detail {

/// Reduce's queue carries (parent arc, reduced child); deepest parents first
struct parent_first {
  bool operator()(const arc &a, const arc &b) const noexcept { return a.source > b.source; }
};
struct parent_rank {
  std::uint64_t operator()(const arc &a) const noexcept { return max_level - a.source.level(); }
};

struct by_children {
  bool operator()(const node &a, const node &b) const noexcept {
    if (a.low != b.low)
      return a.low < b.low;
    if (a.high != b.high)
      return a.high < b.high;
    return a.uid < b.uid;
  }
};

struct by_source_desc {
  bool operator()(const arc &a, const arc &b) const noexcept { return a.source > b.source; }
};

} // namespace detail

/// Canonicalizes `u` level by level from the bottom: nodes whose children
/// coincide are dropped in favor of the child, nodes with equal children are
/// merged, and surviving nodes get dense indices in (low, high) order. When
/// `subst` is given each output level L is emitted as subst(L); this is the
/// only place it is applied, so it costs no extra I/O.
inline diagram reduce(engine &eng, const arc_stream &u, const monotone_subst *subst = nullptr) {
  if (u.terminal_root)
    return diagram::terminal(*u.terminal_root);
  if (u.levels.empty())
    throw invariant_violation("arc stream has neither nodes nor a terminal root");
  if (subst != nullptr)
    subst->validate(u.levels);
  const auto rename = [&](level_t l) { return subst != nullptr ? subst->apply(l) : l; };

  const record_file<arc> late_terminals =
      u.terminal_unsorted.empty() ? record_file<arc>{}
                                  : sort_external(eng, u.terminal_unsorted, detail::by_source_desc{});

  record_reader<arc> internal(eng, u.internal, direction::backward);
  record_reader<arc> terminals(eng, u.terminal, direction::backward);
  record_reader<arc> late(eng, late_terminals, direction::forward);
  record_writer<node> out(eng);

  eng.require_blocks(12, "reduce");
  const std::size_t pq_share = eng.available() / 2;
  const std::size_t level_share = eng.available() - pq_share;
  levelized_priority_queue<arc, detail::parent_first, detail::parent_rank> pq(eng, pq_share);

  std::vector<level_info> out_levels;
  std::optional<ptr> root;

  for (auto li = u.levels.rbegin(); li != u.levels.rend(); ++li) {
    const level_t L = li->level;
    const std::uint64_t w = li->width;
    if (w == 0)
      continue;
    const level_t out_level = rename(L);
    const bool is_top = li + 1 == u.levels.rend();

    // Next arc whose source lies on level L, in descending source order.
    const auto next_arc = [&]() -> std::optional<arc> {
      const arc *best = nullptr;
      int src = -1;
      if (!pq.empty() && pq.top().source.level() == L) {
        best = &pq.top();
        src = 0;
      }
      if (terminals.has_next() && terminals.peek().source.level() == L &&
          (best == nullptr || terminals.peek().source > best->source)) {
        best = &terminals.peek();
        src = 1;
      }
      if (late.has_next() && late.peek().source.level() == L &&
          (best == nullptr || late.peek().source > best->source)) {
        src = 2;
      }
      switch (src) {
      case 0: return pq.pop();
      case 1: return terminals.next();
      case 2: return late.next();
      default: return std::nullopt;
      }
    };

    // Assembles the next node of level L from its two arcs.
    const auto next_node = [&]() -> std::optional<node> {
      const auto first = next_arc();
      if (!first)
        return std::nullopt;
      const auto second = next_arc();
      if (!second || second->source.without_flag() != first->source.without_flag() ||
          second->source.flag() == first->source.flag())
        throw invariant_violation("node " + first->source.without_flag().to_string() +
                                  " does not have exactly one low and one high arc");
      node n{first->source.without_flag(), ptr{}, ptr{}};
      (first->source.flag() ? n.high : n.low) = first->target;
      (second->source.flag() ? n.high : n.low) = second->target;
      return n;
    };

    // Replaces the level's old uids (descending) by their reduced pointers
    // in every parent arc.
    const auto forward_to_parents = [&](auto &&mapping_next, auto &&mapping_has_next) {
      std::optional<arc> m;
      while (internal.has_next() && internal.peek().target.level() == L) {
        const arc a = internal.next();
        while (!m || m->source > a.target) {
          if (!mapping_has_next())
            throw invariant_violation("arc to unknown node " + a.target.to_string());
          m = mapping_next();
        }
        if (m->source != a.target)
          throw invariant_violation("arc to unknown node " + a.target.to_string());
        pq.push({a.source, m->target});
      }
    };

    std::uint64_t distinct = 0;
    if (4 * w <= level_share) {
      residency_lease lease(eng, static_cast<std::size_t>(4 * w));
      std::vector<node> nodes;
      nodes.reserve(w);
      while (auto n = next_node())
        nodes.push_back(*n);
      if (nodes.size() != w)
        throw invariant_violation("level " + std::to_string(L) + " has " +
                                  std::to_string(nodes.size()) + " nodes, expected " +
                                  std::to_string(w));

      std::vector<ptr> mapped(nodes.size());
      std::vector<std::size_t> order;
      order.reserve(nodes.size());
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].low == nodes[i].high)
          mapped[i] = nodes[i].low;
        else
          order.push_back(i);
      }
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return detail::by_children{}(nodes[a], nodes[b]);
      });
      std::vector<node> unique_nodes;
      for (std::size_t k = 0; k < order.size(); ++k) {
        const node &n = nodes[order[k]];
        if (unique_nodes.empty() || unique_nodes.back().low != n.low ||
            unique_nodes.back().high != n.high)
          unique_nodes.push_back({ptr::node(out_level, unique_nodes.size()), n.low, n.high});
        mapped[order[k]] = unique_nodes.back().uid;
      }
      for (auto it = unique_nodes.rbegin(); it != unique_nodes.rend(); ++it)
        out.push(*it);
      distinct = unique_nodes.size();

      std::size_t pos = 0;
      forward_to_parents(
          [&]() {
            const arc m{nodes[pos].uid, mapped[pos]};
            ++pos;
            return m;
          },
          [&]() { return pos < nodes.size(); });
      if (is_top)
        root = mapped.front();
    } else {
      record_file<node> level_file;
      {
        record_writer<node> lw(eng);
        while (auto n = next_node())
          lw.push(*n);
        level_file = lw.finish();
      }
      if (level_file.size() != w)
        throw invariant_violation("level " + std::to_string(L) + " has " +
                                  std::to_string(level_file.size()) + " nodes, expected " +
                                  std::to_string(w));
      const record_file<node> sorted = sort_external(eng, level_file, detail::by_children{});

      record_file<node> unique_file;
      record_file<arc> mapping_file;
      {
        record_reader<node> in(eng, sorted);
        record_writer<node> unique_out(eng);
        record_writer<arc> mapping(eng);
        node prev{};
        bool have_prev = false;
        while (in.has_next()) {
          const node n = in.next();
          if (n.low == n.high) {
            mapping.push({n.uid, n.low});
            continue;
          }
          if (!have_prev || prev.low != n.low || prev.high != n.high) {
            prev = {ptr::node(out_level, distinct++), n.low, n.high};
            have_prev = true;
            unique_out.push(prev);
          }
          mapping.push({n.uid, prev.uid});
        }
        unique_file = unique_out.finish();
        mapping_file = mapping.finish();
      }
      {
        record_reader<node> in(eng, unique_file, direction::backward);
        while (in.has_next())
          out.push(in.next());
      }
      const record_file<arc> by_old = sort_external(eng, mapping_file, detail::by_source_desc{});
      record_reader<arc> mapping(eng, by_old);
      std::optional<ptr> top_mapping;
      if (is_top)
        top_mapping = mapping.peek().target;
      forward_to_parents([&]() { return mapping.next(); }, [&]() { return mapping.has_next(); });
      if (is_top)
        root = *top_mapping;
    }

    if (distinct > 0)
      out_levels.push_back({out_level, distinct});
  }

  if (!pq.empty() || internal.has_next() || terminals.has_next() || late.has_next())
    throw invariant_violation("arc stream has arcs from levels missing in its width table");
  if (!root)
    throw invariant_violation("arc stream has no root level");

  record_file<node> nodes = out.finish();
  if (root->is_terminal()) {
    if (!nodes.empty())
      throw invariant_violation("reduced to a terminal but emitted nodes");
    return diagram::terminal(root->value());
  }
  std::reverse(out_levels.begin(), out_levels.end());
  eng.stats().largest_reduced_nodes = std::max(eng.stats().largest_reduced_nodes, nodes.size());
  return diagram::from_storage(std::move(nodes), std::move(out_levels), *root);
}

} // namespace xbdd
