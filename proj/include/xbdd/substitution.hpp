/// @file  substitution.hpp
/// @brief Monotone variable substitution
///
/// Three ways to rename the levels of a diagram without changing its shape:
///  - replace_naive: one scan of the node file, one write of the renamed copy
///  - inside reduce(): the emitted level of each output level is renamed
///  - attach_shift: an affine renaming kept on the handle and applied by
///    whichever sweep reads the nodes next

#pragma once

#include <algorithm>
#include <utility>
#include <variant>
#include <vector>

#include "diagram.hpp"

namespace xbdd {

/// A level renaming that preserves the relative order of the levels it is
/// applied to. Either affine (alpha*i + beta) or an explicit finite map.
class monotone_subst {
public:
  static monotone_subst affine(affine_shift s) {
    if (s.alpha < 1)
      throw input_error("affine substitution needs alpha >= 1");
    monotone_subst m;
    m._rep = s;
    return m;
  }

  static monotone_subst shift(std::int64_t beta) { return affine({1, beta}); }

  /// From (from, to) pairs; must be strictly increasing on its domain
  static monotone_subst from_map(std::vector<std::pair<level_t, level_t>> map) {
    std::sort(map.begin(), map.end());
    for (std::size_t i = 1; i < map.size(); ++i) {
      if (map[i].first == map[i - 1].first)
        throw input_error("substitution maps level " + std::to_string(map[i].first) + " twice");
      if (map[i].second <= map[i - 1].second)
        throw non_monotone_error("substitution is not monotone: " +
                                 std::to_string(map[i - 1].first) + "->" +
                                 std::to_string(map[i - 1].second) + " but " +
                                 std::to_string(map[i].first) + "->" +
                                 std::to_string(map[i].second));
    }
    for (const auto &[from, to] : map)
      if (to > max_level)
        throw input_error("substitution target out of range");
    monotone_subst m;
    m._rep = std::move(map);
    return m;
  }

  static monotone_subst identity() { return affine({}); }

  level_t apply(level_t level) const {
    if (const auto *s = std::get_if<affine_shift>(&_rep))
      return s->apply(level);
    const auto &map = std::get<map_type>(_rep);
    auto it = std::lower_bound(map.begin(), map.end(), std::pair<level_t, level_t>{level, 0});
    if (it == map.end() || it->first != level)
      throw input_error("substitution is undefined on level " + std::to_string(level));
    return it->second;
  }

  ptr apply(ptr p) const { return p.is_node() ? p.with_level(apply(p.level())) : p; }

  /// Throws unless defined and strictly increasing on the given levels
  void validate(const std::vector<level_info> &levels) const {
    bool first = true;
    level_t prev = 0;
    for (const level_info &li : levels) {
      const level_t mapped = apply(li.level);
      if (!first && mapped <= prev)
        throw non_monotone_error("substitution reorders level " + std::to_string(li.level));
      prev = mapped;
      first = false;
    }
  }

  const affine_shift *as_affine() const noexcept { return std::get_if<affine_shift>(&_rep); }

private:
  using map_type = std::vector<std::pair<level_t, level_t>>;
  monotone_subst() = default;
  std::variant<affine_shift, map_type> _rep;
};

/// Renames every level of `d` by one scan and one write of the node file.
/// No sorting: a monotone renaming keeps the file order valid.
inline diagram replace_naive(engine &eng, const diagram &d, const monotone_subst &pi) {
  if (d.is_terminal())
    return d;
  const std::vector<level_info> levels = d.levels();
  pi.validate(levels);

  node_stream in(eng, d, direction::forward);
  record_writer<node> out(eng);
  while (in.has_next()) {
    const node n = in.next();
    out.push({pi.apply(n.uid), pi.apply(n.low), pi.apply(n.high)});
  }
  std::vector<level_info> renamed;
  renamed.reserve(levels.size());
  for (const level_info &li : levels)
    renamed.push_back({pi.apply(li.level), li.width});
  return diagram::from_storage(out.finish(), std::move(renamed), pi.apply(d.root()));
}

/// Attaches an affine renaming in O(1); nothing is read or written
inline diagram attach_shift(const diagram &d, const affine_shift &s) {
  if (s.alpha < 1)
    throw input_error("affine substitution needs alpha >= 1");
  return d.with_shift(s);
}

/// Writes out a shifted view as a plain diagram (one read, one write)
inline diagram materialize(engine &eng, const diagram &d) {
  if (d.is_terminal() || d.shift().is_identity())
    return d;
  return replace_naive(eng, d.unshifted(), monotone_subst::affine(d.shift()));
}

} // namespace xbdd
