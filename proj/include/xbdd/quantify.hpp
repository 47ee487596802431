/// @file  quantify.hpp
/// @brief Quantification, the merged conjunction-and-quantification, and
///        the relational products used for image computation
///
/// Quantification runs as repeated passes over an unreduced diagram. Every
/// pass is a top-down product sweep of the diagram with itself: a request is
/// a single node or an ordered pair of nodes standing for their disjunction
/// (conjunction for forall). A single node on a quantified level is replaced
/// by the pair of its children; a pair on a quantified level is expanded
/// like an ordinary node and left for a later pass. Each pass is followed by
/// a Reduce, and the loop stops once no quantified level is left. The top
/// quantified level always disappears in a pass, so there are at most as
/// many passes as quantified levels.

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "apply.hpp"
#include "substitution.hpp"

namespace xbdd {

/// A set of levels as a bitmap indexed by level
using level_set = std::vector<bool>;

inline level_set make_level_set(const std::vector<level_t> &levels) {
  level_set s;
  for (const level_t l : levels) {
    if (l >= s.size())
      s.resize(l + 1, false);
    s[l] = true;
  }
  return s;
}

/// Levels below `bound` with the given parity (0 = even, 1 = odd)
inline level_set parity_levels(level_t bound, unsigned parity) {
  level_set s(bound, false);
  for (level_t l = parity; l < bound; l += 2)
    s[l] = true;
  return s;
}

namespace detail {

struct quantify_policy {
  bool exists; // disjunction of cofactors, else conjunction
  const level_set *vs;

  bool quantified(level_t l) const { return l < vs->size() && (*vs)[l]; }

  child normalize(ptr a, ptr b) const {
    if (b.is_nil())
      return a.is_terminal() ? child::terminal(a.value()) : child{a, ptr::nil()};
    // absorbing and neutral terminal of the combining operator
    const bool absorbing = exists;
    if ((a.is_terminal() && a.value() == absorbing) || (b.is_terminal() && b.value() == absorbing))
      return child::terminal(absorbing);
    if (a.is_terminal())
      return normalize(b, ptr::nil());
    if (b.is_terminal() || a == b)
      return normalize(a, ptr::nil());
    return a < b ? child{a, b} : child{b, a};
  }

  outcome expand(level_t level, ptr a, const node *na, ptr b, const node *nb) const {
    if (b.is_nil()) {
      if (quantified(level))
        return outcome::forward(normalize(na->low, na->high));
      return outcome::make_node(normalize(na->low, ptr::nil()), normalize(na->high, ptr::nil()));
    }
    return outcome::make_node(normalize(na ? na->low : a, nb ? nb->low : b),
                              normalize(na ? na->high : a, nb ? nb->high : b));
  }
};

/// Outer loop: reduce, and sweep again while quantified levels remain.
/// `subst` is applied by the last Reduce when that Reduce is known to be the
/// last one; otherwise by a separate renaming scan.
inline diagram quantify_arcs(engine &eng, arc_stream u, const level_set &vs, bool exists,
                             const monotone_subst *subst) {
  const quantify_policy policy{exists, &vs};
  for (;;) {
    const bool last = !intersects(u.levels, vs);
    const diagram d = reduce(eng, u, last ? subst : nullptr);
    if (last)
      return d;
    if (!intersects(d.levels(), vs))
      return subst != nullptr ? replace_naive(eng, d, *subst) : d;
    u = product_sweep(eng, d, d, policy);
  }
}

} // namespace detail

/// Existential quantification of an unreduced (transposed) arc stream,
/// used directly as the first outer Reduce's input
inline diagram exists(engine &eng, arc_stream u, const level_set &vs,
                      const monotone_subst *subst = nullptr) {
  return detail::quantify_arcs(eng, std::move(u), vs, true, subst);
}

/// Existential quantification of a diagram; the diagram is transposed first
inline diagram exists(engine &eng, const diagram &f, const level_set &vs,
                      const monotone_subst *subst = nullptr) {
  return exists(eng, transpose_diagram(eng, f), vs, subst);
}

inline diagram forall(engine &eng, arc_stream u, const level_set &vs) {
  return detail::quantify_arcs(eng, std::move(u), vs, false, nullptr);
}

inline diagram forall(engine &eng, const diagram &f, const level_set &vs) {
  return forall(eng, transpose_diagram(eng, f), vs);
}

/// Cumulative optimization levels of the relational product
enum class opt_tier {
  naive,          ///< Apply, Reduce, Transpose, quantify, rename by a scan
  skip_transpose, ///< the conjunction's arcs feed the quantification directly
  pruning_and,    ///< nodes on quantified levels are pruned during the conjunction
  exists_replace, ///< renaming happens inside the last Reduce
  shift_replace,  ///< operand shifts are attached as views, not written out
};

inline constexpr opt_tier all_tiers[] = {opt_tier::naive, opt_tier::skip_transpose,
                                         opt_tier::pruning_and, opt_tier::exists_replace,
                                         opt_tier::shift_replace};

inline const char *to_string(opt_tier t) {
  switch (t) {
  case opt_tier::naive: return "naive";
  case opt_tier::skip_transpose: return "skip-transpose";
  case opt_tier::pruning_and: return "pruning-and";
  case opt_tier::exists_replace: return "exists-replace";
  case opt_tier::shift_replace: return "shift-replace";
  }
  return "?";
}

inline opt_tier parse_opt_tier(const std::string &s) {
  for (const opt_tier t : all_tiers)
    if (s == to_string(t))
      return t;
  throw input_error("unknown optimization tier '" + s + "'");
}

/// exists vs. (f & g), renamed by `subst` if given
inline diagram and_exists(engine &eng, const diagram &f, const diagram &g, const level_set &vs,
                          opt_tier tier = opt_tier::shift_replace,
                          const monotone_subst *subst = nullptr) {
  const level_set *prune = tier >= opt_tier::pruning_and ? &vs : nullptr;
  arc_stream conj = apply(eng, f, g, ops::and_, prune);
  eng.stats().relprod_apply_arcs += conj.records();

  const monotone_subst *in_reduce = tier >= opt_tier::exists_replace ? subst : nullptr;
  diagram r = tier == opt_tier::naive
                  ? exists(eng, transpose_diagram(eng, reduce(eng, conj)), vs)
                  : exists(eng, std::move(conj), vs, in_reduce);
  if (subst != nullptr && in_reduce == nullptr)
    r = replace_naive(eng, r, *subst);
  return r;
}

/// A transition relation over interleaved variables (state variable i on
/// level 2i, its next-state copy on 2i + 1): one diagram, or a disjunction
/// of parts applied one at a time.
struct relation_spec {
  std::vector<diagram> parts;
  bool disjoint = false;

  static relation_spec joint(diagram r) { return {{std::move(r)}, false}; }
  static relation_spec split(std::vector<diagram> parts) { return {std::move(parts), true}; }
};

namespace detail {

inline level_t level_bound(const diagram &s, const relation_spec &r) {
  level_t bound = s.is_terminal() ? 0 : s.max_level() + 1;
  for (const diagram &p : r.parts)
    if (!p.is_terminal())
      bound = std::max(bound, p.max_level() + 1);
  return bound + 2;
}

inline void require_unprimed(const diagram &s, const char *op) {
  for (const level_info &li : s.levels())
    if (li.level % 2 != 0)
      throw input_error(std::string(op) + ": state set mentions next-state level " +
                        std::to_string(li.level));
}

template <class PerPart>
diagram over_parts(engine &eng, const relation_spec &r, PerPart &&per_part) {
  if (r.parts.empty())
    return diagram::terminal(false);
  diagram acc = per_part(r.parts.front());
  for (std::size_t i = 1; i < r.parts.size(); ++i)
    acc = bdd_or(eng, acc, per_part(r.parts[i]));
  return acc;
}

} // namespace detail

/// Generic relational product exists vs. (s & r), renamed by `subst`
inline diagram relprod(engine &eng, const diagram &s, const diagram &r, const level_set &vs,
                       const monotone_subst *subst = nullptr,
                       opt_tier tier = opt_tier::shift_replace) {
  return and_exists(eng, s, r, vs, tier, subst);
}

/// Successors: (exists x. s & r)[x'/x]
inline diagram relnext(engine &eng, const diagram &s, const relation_spec &r,
                       opt_tier tier = opt_tier::shift_replace) {
  detail::require_unprimed(s, "relnext");
  if (s.is_false())
    return s;
  const level_set vs = parity_levels(detail::level_bound(s, r), 0);
  const monotone_subst unprime = monotone_subst::shift(-1);
  return detail::over_parts(eng, r, [&](const diagram &part) {
    return and_exists(eng, s, part, vs, tier, &unprime);
  });
}

/// Predecessors: exists x'. s[x/x'] & r
inline diagram relprev(engine &eng, const diagram &s, const relation_spec &r,
                       opt_tier tier = opt_tier::shift_replace) {
  detail::require_unprimed(s, "relprev");
  if (s.is_false())
    return s;
  const level_set vs = parity_levels(detail::level_bound(s, r), 1);
  const diagram primed = tier == opt_tier::shift_replace
                             ? attach_shift(s, {1, 1})
                             : replace_naive(eng, s, monotone_subst::shift(1));
  return detail::over_parts(eng, r, [&](const diagram &part) {
    return and_exists(eng, primed, part, vs, tier, nullptr);
  });
}

} // namespace xbdd
