/// @file  apply.hpp
/// @brief Binary boolean operators (Apply) and transposition

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "product.hpp"
#include "reduce.hpp"

namespace xbdd {

/// A binary operator given by its truth table: bit (2*x + y) is op(x, y)
class boolean_op {
public:
  constexpr explicit boolean_op(unsigned table, const char *name = "op")
      : _table(table & 0xF), _name(name) {}

  constexpr bool operator()(bool x, bool y) const noexcept {
    return ((_table >> (2 * unsigned{x} + unsigned{y})) & 1) != 0;
  }

  /// Result forced by one terminal operand, if the other cannot matter
  constexpr std::optional<bool> left_shortcut(bool x) const noexcept {
    if ((*this)(x, false) == (*this)(x, true))
      return (*this)(x, false);
    return std::nullopt;
  }
  constexpr std::optional<bool> right_shortcut(bool y) const noexcept {
    if ((*this)(false, y) == (*this)(true, y))
      return (*this)(false, y);
    return std::nullopt;
  }

  /// Terminal result of op(a, b) when it is determined already
  std::optional<bool> shortcut(ptr a, ptr b) const noexcept {
    if (a.is_terminal() && b.is_terminal())
      return (*this)(a.value(), b.value());
    if (a.is_terminal())
      return left_shortcut(a.value());
    if (b.is_terminal())
      return right_shortcut(b.value());
    return std::nullopt;
  }

  constexpr unsigned table() const noexcept { return _table; }
  constexpr const char *name() const noexcept { return _name; }
  friend constexpr bool operator==(const boolean_op &x, const boolean_op &y) noexcept {
    return x._table == y._table;
  }

private:
  unsigned _table;
  const char *_name;
};

namespace ops {
//                                      bits: 11 10 01 00
inline constexpr boolean_op and_{0b1000, "and"};
inline constexpr boolean_op or_{0b1110, "or"};
inline constexpr boolean_op xor_{0b0110, "xor"};
inline constexpr boolean_op xnor{0b1001, "xnor"};
inline constexpr boolean_op nand{0b0111, "nand"};
inline constexpr boolean_op nor{0b0001, "nor"};
inline constexpr boolean_op diff{0b0100, "diff"};    // x & !y
inline constexpr boolean_op imp{0b1011, "imp"};      // !x | y
inline constexpr boolean_op less{0b0010, "less"};    // !x & y
inline constexpr boolean_op invimp{0b1101, "invimp"}; // x | !y

inline constexpr boolean_op all[] = {and_, or_, xor_, xnor, nand, nor, diff, imp, less, invimp};
} // namespace ops

/// Product construction for op(f, g). With `prune` set (only meaningful for
/// conjunction followed by existential quantification of those levels) a
/// node on a pruned level is not created: a true child makes the whole node
/// true, a false child hands the request on to the other child.
struct apply_policy {
  boolean_op op;
  const std::vector<bool> *prune = nullptr;

  child normalize(ptr a, ptr b) const {
    if (const auto v = op.shortcut(a, b))
      return child::terminal(*v);
    return {a, b};
  }

  outcome expand(level_t level, ptr a, const node *na, ptr b, const node *nb) const {
    const child lo = normalize(na ? na->low : a, nb ? nb->low : b);
    const child hi = normalize(na ? na->high : a, nb ? nb->high : b);
    if (prune != nullptr && level < prune->size() && (*prune)[level]) {
      if ((lo.is_terminal() && lo.value()) || (hi.is_terminal() && hi.value()))
        return outcome::forward(child::terminal(true));
      if (lo.is_terminal() && hi.is_terminal())
        return outcome::forward(child::terminal(false));
      if (lo.is_terminal())
        return outcome::forward(hi);
      if (hi.is_terminal())
        return outcome::forward(lo);
    }
    return outcome::make_node(lo, hi);
  }
};

/// Top-down Apply sweep; the result is unreduced, already in the order
/// Reduce consumes.
inline arc_stream apply(engine &eng, const diagram &f, const diagram &g, boolean_op op,
                        const std::vector<bool> *prune = nullptr) {
  if (prune != nullptr && !(op == ops::and_))
    throw input_error("pruning of quantified levels is only defined for conjunction");
  return product_sweep(eng, f, g, apply_policy{op, prune});
}

/// Apply followed by Reduce
inline diagram apply_reduce(engine &eng, const diagram &f, const diagram &g, boolean_op op) {
  return reduce(eng, apply(eng, f, g, op));
}

inline diagram bdd_and(engine &eng, const diagram &f, const diagram &g) {
  return apply_reduce(eng, f, g, ops::and_);
}
inline diagram bdd_or(engine &eng, const diagram &f, const diagram &g) {
  return apply_reduce(eng, f, g, ops::or_);
}
inline diagram bdd_diff(engine &eng, const diagram &f, const diagram &g) {
  return apply_reduce(eng, f, g, ops::diff);
}
inline diagram bdd_not(engine &eng, const diagram &f) {
  return apply_reduce(eng, f, diagram::terminal(true), ops::xor_);
}

/// Sorts a source-ordered arc file into target order (one external sort)
inline record_file<arc> transpose(engine &eng, const record_file<arc> &arcs) {
  return sort_external(eng, arcs, arc_by_target{});
}

/// The arcs of a reduced diagram, transposed, as input for a bottom-up sweep
inline arc_stream transpose_diagram(engine &eng, const diagram &d) {
  arc_stream u;
  if (d.is_terminal()) {
    u.terminal_root = d.root().value();
    return u;
  }
  record_file<arc> by_source;
  {
    node_stream in(eng, d, direction::backward);
    record_writer<arc> internal(eng);
    record_writer<arc> terminals(eng);
    while (in.has_next()) {
      const node n = in.next();
      for (const bool high : {false, true}) {
        const arc a{n.uid.with_flag(high), high ? n.high : n.low};
        (a.target.is_terminal() ? terminals : internal).push(a);
      }
    }
    by_source = internal.finish();
    u.terminal = terminals.finish();
  }
  u.internal = transpose(eng, by_source);
  u.levels = d.levels();
  return u;
}

} // namespace xbdd
