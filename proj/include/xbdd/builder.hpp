/// @file  builder.hpp
/// @brief Building diagrams from explicit node lists

#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "apply.hpp"

namespace xbdd {

namespace detail {

struct uid_descending {
  bool operator()(const node &a, const node &b) const noexcept { return a.uid > b.uid; }
};

/// Copies every node reachable from the root; used to canonicalize raw files
struct copy_policy {
  child normalize(ptr a, ptr) const {
    if (a.is_terminal())
      return child::terminal(a.value());
    return {a, ptr::nil()};
  }
  outcome expand(level_t, ptr, const node *na, ptr, const node *) const {
    return outcome::make_node(normalize(na->low, ptr::nil()), normalize(na->high, ptr::nil()));
  }
};

/// Canonical diagram for the nodes reachable from `root` in a raw node file
/// (any uids, sorted by descending uid).
inline diagram canonicalize_raw(engine &eng, record_file<node> raw_sorted, ptr root) {
  if (root.is_terminal())
    return diagram::terminal(root.value());
  const diagram raw = diagram::from_storage(std::move(raw_sorted), {}, root);
  return reduce(eng, product_sweep(eng, raw, raw, copy_policy{}));
}

} // namespace detail

/// Collects nodes children-first and turns them into a canonical diagram.
/// Nodes need not be reduced or unique; unreachable ones are dropped.
class diagram_builder {
public:
  explicit diagram_builder(engine &eng) : _eng(&eng), _raw(eng) {}

  ptr add(level_t level, ptr low, ptr high) {
    check_child(level, low);
    check_child(level, high);
    const ptr uid = ptr::node(level, _next_index++);
    _raw.push({uid, low, high});
    return uid;
  }

  diagram build(ptr root) {
    if (root.is_node() && root.index() >= _next_index)
      throw input_error("root was not created by this builder");
    record_file<node> raw = _raw.finish();
    if (root.is_terminal())
      return diagram::terminal(root.value());
    return detail::canonicalize_raw(*_eng, sort_external(*_eng, raw, detail::uid_descending{}),
                                    root);
  }

private:
  void check_child(level_t level, ptr c) const {
    if (c.is_terminal())
      return;
    if (!c.is_node() || c.index() >= _next_index)
      throw input_error("child " + c.to_string() + " was not created by this builder");
    if (c.level() <= level)
      throw input_error("child on level " + std::to_string(c.level()) +
                        " is not below level " + std::to_string(level));
  }

  engine *_eng;
  record_writer<node> _raw;
  std::uint64_t _next_index = 0;
};

/// The single variable at `level`, or its negation
inline diagram make_literal(engine &eng, level_t level, bool positive = true) {
  diagram_builder b(eng);
  return b.build(b.add(level, ptr::terminal(!positive), ptr::terminal(positive)));
}

/// Conjunction of literals; later entries for the same level are an error
inline diagram make_cube(engine &eng, std::vector<std::pair<level_t, bool>> literals) {
  std::sort(literals.begin(), literals.end());
  for (std::size_t i = 1; i < literals.size(); ++i)
    if (literals[i].first == literals[i - 1].first)
      throw input_error("cube mentions level " + std::to_string(literals[i].first) + " twice");
  diagram_builder b(eng);
  ptr cur = ptr::terminal(true);
  for (auto it = literals.rbegin(); it != literals.rend(); ++it)
    cur = it->second ? b.add(it->first, ptr::terminal(false), cur)
                     : b.add(it->first, cur, ptr::terminal(false));
  return b.build(cur);
}

} // namespace xbdd
