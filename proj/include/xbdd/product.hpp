/// @file  product.hpp
/// @brief Top-down time-forward product construction over two diagrams
///
/// A request is a pair of pointers (a into the first input, b into the
/// second) together with the arc that asked for it. Requests are resolved in
/// ascending order of the smaller of their two nodes. When both nodes sit on
/// the request's level the first node's content is forwarded through a
/// second queue ordered by the larger node, so both inputs are only ever
/// scanned forward. Duplicate requests meet in the queue and are resolved
/// once, so the queue doubles as the computation cache.
///
/// What a resolved request turns into is decided by a policy:
///
///     child   normalize(ptr a, ptr b) const;
///     outcome expand(level_t level, ptr a, const node *na,
///                    ptr b, const node *nb) const;
///
/// `na` (`nb`) is the node behind `a` (`b`) when it lies on `level`.

#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "diagram.hpp"

namespace xbdd {

/// A pending pair, or a terminal result when `b` is nil and `a` terminal
struct child {
  ptr a;
  ptr b;

  static child terminal(bool v) noexcept { return {ptr::terminal(v), ptr::nil()}; }
  bool is_terminal() const noexcept { return a.is_terminal() && b.is_nil(); }
  bool value() const noexcept { return a.value(); }
};

/// Result of expanding one request
struct outcome {
  enum class kind { make_node, forward };
  kind what;
  child low;  ///< the forwarded request when what == forward
  child high;

  static outcome make_node(child lo, child hi) { return {kind::make_node, lo, hi}; }
  static outcome forward(child c) { return {kind::forward, c, c}; }
};

namespace detail {

struct request {
  ptr a;
  ptr b;
  ptr source;
};

struct request_with_node {
  ptr a;
  ptr b;
  ptr source;
  ptr low;
  ptr high;
};

/// Node keys carry the input they come from in the flag bit: 0 = a, 1 = b
inline ptr key_a(ptr a) noexcept { return a.without_flag(); }
inline ptr key_b(ptr b) noexcept { return b.is_nil() ? b : b.with_flag(true); }

template <class R>
ptr first_key(const R &r) noexcept {
  return std::min(key_a(r.a), key_b(r.b));
}
template <class R>
ptr second_key(const R &r) noexcept {
  return std::max(key_a(r.a), key_b(r.b));
}

struct by_first_key {
  bool operator()(const request &x, const request &y) const noexcept {
    const ptr x1 = first_key(x), y1 = first_key(y);
    if (x1 != y1)
      return x1 < y1;
    const ptr x2 = second_key(x), y2 = second_key(y);
    if (x2 != y2)
      return x2 < y2;
    return x.source < y.source;
  }
};
struct first_key_level {
  std::uint64_t operator()(const request &r) const noexcept { return first_key(r).level(); }
};

struct by_second_key {
  bool operator()(const request_with_node &x, const request_with_node &y) const noexcept {
    const ptr x2 = second_key(x), y2 = second_key(y);
    if (x2 != y2)
      return x2 < y2;
    const ptr x1 = first_key(x), y1 = first_key(y);
    if (x1 != y1)
      return x1 < y1;
    return x.source < y.source;
  }
};
struct second_key_level {
  std::uint64_t operator()(const request_with_node &r) const noexcept {
    return second_key(r).level();
  }
};

} // namespace detail

template <class Policy>
arc_stream product_sweep(engine &eng, const diagram &in_a, const diagram &in_b,
                         const Policy &policy) {
  arc_stream result;
  const child root = policy.normalize(in_a.root(), in_b.root());
  if (root.is_terminal()) {
    result.terminal_root = root.value();
    return result;
  }

  node_seeker seek_a(eng, in_a);
  node_seeker seek_b(eng, in_b);
  record_writer<arc> internal(eng);
  record_writer<arc> terminals(eng);
  record_writer<arc> late(eng);

  eng.require_blocks(12, "product sweep");
  const std::size_t share = eng.available() / 2;
  levelized_priority_queue<detail::request, detail::by_first_key, detail::first_key_level> pq1(
      eng, share);
  levelized_priority_queue<detail::request_with_node, detail::by_second_key,
                           detail::second_key_level>
      pq2(eng, share);

  const auto fetch = [&](ptr key) -> node {
    return key.flag() ? seek_b.seek(key.without_flag()) : seek_a.seek(key);
  };

  level_t current_level = terminal_level;
  std::uint64_t current_width = 0;
  const auto new_uid = [&](level_t level) {
    if (level != current_level) {
      if (current_width > 0)
        result.levels.push_back({current_level, current_width});
      current_level = level;
      current_width = 0;
    }
    return ptr::node(level, current_width++);
  };

  std::optional<bool> terminal_root;
  const auto emit_child = [&](ptr source, const child &c) {
    if (c.is_terminal())
      terminals.push({source, c.a});
    else
      pq1.push({c.a, c.b, source});
  };

  // Applies `out` to one source arc; `u` is the node made for the request.
  const auto connect = [&](const outcome &out, ptr u, ptr source) {
    if (out.what == outcome::kind::make_node) {
      if (!source.is_nil())
        internal.push({source, u});
      return;
    }
    const child &c = out.low;
    if (c.is_terminal()) {
      if (source.is_nil())
        terminal_root = c.value();
      else
        late.push({source, c.a});
    } else {
      pq1.push({c.a, c.b, source});
    }
  };

  const auto resolve = [&](level_t level, ptr a, const node *na, ptr b, const node *nb,
                           ptr first_source, auto &&next_source) {
    const outcome out = policy.expand(level, a, na, b, nb);
    ptr u = ptr::nil();
    if (out.what == outcome::kind::make_node)
      u = new_uid(level);
    connect(out, u, first_source);
    while (auto s = next_source())
      connect(out, u, *s);
    if (out.what == outcome::kind::make_node) {
      emit_child(u.with_flag(false), out.low);
      emit_child(u.with_flag(true), out.high);
    }
  };

  pq1.push({root.a, root.b, ptr::nil()});

  while (!pq1.empty() || !pq2.empty()) {
    const bool from_second =
        !pq2.empty() &&
        (pq1.empty() || detail::second_key(pq2.top()) < detail::first_key(pq1.top()));

    if (!from_second) {
      const detail::request r = pq1.pop();
      const ptr t1 = detail::first_key(r);
      const ptr t2 = detail::second_key(r);
      const node n1 = fetch(t1);
      const auto same = [&](const detail::request &o) { return o.a == r.a && o.b == r.b; };

      if (t2.is_node() && t2.level() == t1.level()) {
        pq2.push({r.a, r.b, r.source, n1.low, n1.high});
        while (!pq1.empty() && same(pq1.top())) {
          const detail::request d = pq1.pop();
          pq2.push({d.a, d.b, d.source, n1.low, n1.high});
        }
        continue;
      }
      const bool first_is_a = !t1.flag();
      resolve(t1.level(), r.a, first_is_a ? &n1 : nullptr, r.b, first_is_a ? nullptr : &n1,
              r.source, [&]() -> std::optional<ptr> {
                if (!pq1.empty() && same(pq1.top()))
                  return pq1.pop().source;
                return std::nullopt;
              });
    } else {
      const detail::request_with_node r = pq2.pop();
      const ptr t1 = detail::first_key(r);
      const ptr t2 = detail::second_key(r);
      const node n2 = fetch(t2);
      const node n1{t1.without_flag(), r.low, r.high};
      const bool first_is_a = !t1.flag();
      const auto same = [&](const detail::request_with_node &o) {
        return o.a == r.a && o.b == r.b;
      };
      resolve(t1.level(), r.a, first_is_a ? &n1 : &n2, r.b, first_is_a ? &n2 : &n1, r.source,
              [&]() -> std::optional<ptr> {
                if (!pq2.empty() && same(pq2.top()))
                  return pq2.pop().source;
                return std::nullopt;
              });
    }
  }

  if (terminal_root) {
    arc_stream t;
    t.terminal_root = terminal_root;
    return t;
  }
  if (current_width > 0)
    result.levels.push_back({current_level, current_width});
  result.internal = internal.finish();
  result.terminal = terminals.finish();
  result.terminal_unsorted = late.finish();
  eng.stats().largest_unreduced_nodes =
      std::max(eng.stats().largest_unreduced_nodes, result.node_count());
  return result;
}

} // namespace xbdd
