/// @file  diagram.hpp
/// @brief Reduced diagrams (levelized node files) and unreduced arc streams

#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "extmem.hpp"
#include "ptr.hpp"

namespace xbdd {

/// Level renaming i -> alpha*i + beta, applied to records as they are read
struct affine_shift {
  std::uint64_t alpha = 1;
  std::int64_t beta = 0;

  bool is_identity() const noexcept { return alpha == 1 && beta == 0; }

  level_t apply(level_t level) const {
    const std::int64_t mapped = static_cast<std::int64_t>(alpha * level) + beta;
    if (mapped < 0 || mapped > static_cast<std::int64_t>(max_level))
      throw input_error("shifted level " + std::to_string(mapped) + " is out of range");
    return static_cast<level_t>(mapped);
  }

  ptr apply(ptr p) const { return p.is_node() ? p.with_level(apply(p.level())) : p; }

  /// The shift equivalent to applying *this and then `next`
  affine_shift then(const affine_shift &next) const {
    return {next.alpha * alpha, static_cast<std::int64_t>(next.alpha) * beta + next.beta};
  }

  friend bool operator==(const affine_shift &, const affine_shift &) = default;
};

namespace detail {

/// A node file in children-before-parents order (descending uid) together
/// with its per-level widths (ascending level) and root.
struct node_storage {
  record_file<node> nodes;
  std::vector<level_info> levels;
  ptr root;
};

} // namespace detail

/// A reduced ordered BDD, possibly viewed through an affine level shift.
///
/// Immutable and cheap to copy. The node file stores nodes bottom-up, so a
/// top-down (uid-ascending) scan reads it backwards. Terminal functions have
/// no file.
class diagram {
public:
  diagram() : _terminal(ptr::terminal(false)) {}

  static diagram terminal(bool value) {
    diagram d;
    d._terminal = ptr::terminal(value);
    return d;
  }

  /// Wraps a node file produced by a sweep; the caller vouches for its order
  static diagram from_storage(record_file<node> nodes, std::vector<level_info> levels, ptr root) {
    if (root.is_terminal())
      return terminal(root.value());
    diagram d;
    d._storage = std::make_shared<const detail::node_storage>(
        detail::node_storage{std::move(nodes), std::move(levels), root});
    return d;
  }

  bool is_terminal() const noexcept { return _storage == nullptr; }
  bool is_false() const noexcept { return is_terminal() && !_terminal.value(); }
  bool is_true() const noexcept { return is_terminal() && _terminal.value(); }

  ptr root() const { return is_terminal() ? _terminal : _shift.apply(_storage->root); }

  const affine_shift &shift() const noexcept { return _shift; }

  /// A view of the same nodes with `s` applied after the current shift
  diagram with_shift(const affine_shift &s) const {
    diagram d = *this;
    if (is_terminal())
      return d;
    d._shift = _shift.then(s);
    // validate the extreme levels eagerly
    d._shift.apply(_storage->levels.front().level);
    d._shift.apply(_storage->levels.back().level);
    return d;
  }

  /// The unshifted diagram this view is based on
  diagram unshifted() const {
    diagram d = *this;
    d._shift = {};
    return d;
  }

  /// Width table after shifting, ascending by level
  std::vector<level_info> levels() const {
    std::vector<level_info> out;
    if (is_terminal())
      return out;
    out.reserve(_storage->levels.size());
    for (const level_info &li : _storage->levels)
      out.push_back({_shift.apply(li.level), li.width});
    return out;
  }

  std::uint64_t width(level_t level) const {
    for (const level_info &li : levels())
      if (li.level == level)
        return li.width;
    return 0;
  }

  std::uint64_t node_count() const noexcept { return is_terminal() ? 0 : _storage->nodes.size(); }

  level_t min_level() const { return is_terminal() ? terminal_level : levels().front().level; }
  level_t max_level() const { return is_terminal() ? terminal_level : levels().back().level; }

  const record_file<node> &file() const {
    static const record_file<node> empty;
    return is_terminal() ? empty : _storage->nodes;
  }

  /// True when both handles share one node file and shift (cheap identity)
  bool same_handle(const diagram &o) const noexcept {
    return _storage == o._storage && _terminal == o._terminal && _shift == o._shift;
  }

private:
  std::shared_ptr<const detail::node_storage> _storage;
  ptr _terminal;
  affine_shift _shift;
};

/// Scan of a diagram's nodes with its shift applied on the fly.
/// `forward` is bottom-up (file order), `backward` is top-down.
class node_stream {
public:
  node_stream(engine &eng, const diagram &d, direction dir)
      : _reader(eng, d.file(), dir), _shift(d.shift()) {}

  bool has_next() const noexcept { return _reader.has_next(); }

  node next() {
    const node n = _reader.next();
    if (_shift.is_identity())
      return n;
    return {_shift.apply(n.uid), _shift.apply(n.low), _shift.apply(n.high)};
  }

  std::uint64_t size() const noexcept { return _reader.size(); }

private:
  record_reader<node> _reader;
  affine_shift _shift;
};

/// Top-down scan that can be asked for a node by uid, as long as requests
/// arrive in ascending uid order.
class node_seeker {
public:
  node_seeker(engine &eng, const diagram &d) : _stream(eng, d, direction::backward) {}

  const node &seek(ptr uid) {
    uid = uid.without_flag();
    while (!_has_current || _current.uid < uid) {
      if (!_stream.has_next())
        throw invariant_violation("node " + uid.to_string() + " is missing from its file");
      _current = _stream.next();
      _has_current = true;
    }
    if (_current.uid != uid)
      throw invariant_violation("node " + uid.to_string() + " is missing from its file");
    return _current;
  }

private:
  node_stream _stream;
  node _current{};
  bool _has_current = false;
};

/// An unreduced diagram as produced by a top-down sweep.
///
/// `internal` holds arcs to internal nodes sorted by target (the transposed
/// order a bottom-up Reduce consumes), `terminal` holds arcs to terminals
/// sorted by source, and `terminal_unsorted` holds terminal arcs that were
/// produced out of source order (pruned nodes); Reduce sorts those first.
struct arc_stream {
  record_file<arc> internal;
  record_file<arc> terminal;
  record_file<arc> terminal_unsorted;
  std::vector<level_info> levels;
  std::optional<bool> terminal_root;

  std::uint64_t records() const noexcept {
    return internal.size() + terminal.size() + terminal_unsorted.size();
  }
  std::uint64_t node_count() const noexcept {
    std::uint64_t n = 0;
    for (const level_info &li : levels)
      n += li.width;
    return n;
  }
};

struct arc_by_target {
  bool operator()(const arc &a, const arc &b) const noexcept {
    return a.target != b.target ? a.target < b.target : a.source < b.source;
  }
};

struct arc_by_source {
  bool operator()(const arc &a, const arc &b) const noexcept {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  }
};

/// Whether any level of `levels` is contained in the bitmap `set`
inline bool intersects(const std::vector<level_info> &levels, const std::vector<bool> &set) {
  return std::any_of(levels.begin(), levels.end(), [&](const level_info &li) {
    return li.width > 0 && li.level < set.size() && set[li.level];
  });
}

} // namespace xbdd
