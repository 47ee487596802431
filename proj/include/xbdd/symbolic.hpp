/// @file  symbolic.hpp
/// @brief Encoding of a model as an initial-state diagram and a transition
///        relation over interleaved variables
///
/// The variable at position k of the order lives on level 2k, its
/// next-state copy on level 2k + 1.

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "inspect.hpp"
#include "models.hpp"
#include "quantify.hpp"
#include "sloan.hpp"

namespace xbdd {

enum class partition { joint, disjoint };

inline const char *to_string(partition p) { return p == partition::joint ? "joint" : "disjoint"; }

inline partition parse_partition(const std::string &s) {
  if (s == "joint")
    return partition::joint;
  if (s == "disjoint")
    return partition::disjoint;
  throw input_error("unknown partition '" + s + "'");
}

struct symbolic_model {
  std::vector<std::string> variables; // in level order
  std::vector<std::size_t> order;     // order[k] = input index of the variable on level 2k
  diagram initial;
  relation_spec relation;

  level_t unprimed(std::size_t position) const { return static_cast<level_t>(2 * position); }

  /// The unprimed levels, for counting states
  std::vector<level_t> state_levels() const {
    std::vector<level_t> out;
    for (std::size_t k = 0; k < variables.size(); ++k)
      out.push_back(unprimed(k));
    return out;
  }
};

namespace detail {

inline void check_permutation(const std::vector<std::size_t> &order, std::size_t n) {
  std::vector<bool> seen(n, false);
  if (order.size() != n)
    throw input_error("variable order has " + std::to_string(order.size()) + " entries, expected " +
                      std::to_string(n));
  for (const std::size_t v : order) {
    if (v >= n || seen[v])
      throw input_error("variable order is not a permutation");
    seen[v] = true;
  }
}

/// What one transition requires of a variable
enum class effect { frame, consume, produce, test, free };

/// Relation diagram from one effect per position, built bottom-up
inline diagram effect_relation(engine &eng, const std::vector<effect> &effects) {
  diagram_builder b(eng);
  const ptr F = ptr::terminal(false);
  ptr cur = ptr::terminal(true);
  for (std::size_t k = effects.size(); k-- > 0;) {
    const level_t x = static_cast<level_t>(2 * k), xp = x + 1;
    switch (effects[k]) {
    case effect::frame:
      cur = b.add(x, b.add(xp, cur, F), b.add(xp, F, cur));
      break;
    case effect::consume:
      cur = b.add(x, F, b.add(xp, cur, F));
      break;
    case effect::produce:
      cur = b.add(xp, F, cur);
      break;
    case effect::test:
      cur = b.add(x, F, b.add(xp, F, cur));
      break;
    case effect::free:
      break;
    }
  }
  return b.build(cur);
}

inline std::vector<diagram> petri_parts(engine &eng, const petri_net &net,
                                        const std::vector<std::size_t> &position) {
  std::vector<diagram> parts;
  for (const petri_transition &t : net.transitions) {
    std::vector<effect> effects(net.places.size(), effect::frame);
    for (const std::size_t p : t.pre)
      effects[position[p]] = effect::consume;
    for (const std::size_t p : t.post)
      effects[position[p]] = effects[position[p]] == effect::consume ? effect::test : effect::produce;
    parts.push_back(effect_relation(eng, effects));
  }
  return parts;
}

inline std::vector<diagram> bnet_parts(engine &eng, const boolean_network &bn,
                                       const std::vector<std::size_t> &position) {
  std::map<std::string, level_t> level_of;
  for (std::size_t v = 0; v < bn.variables.size(); ++v)
    level_of[bn.variables[v]] = static_cast<level_t>(2 * position[v]);
  std::vector<diagram> parts;
  for (std::size_t v = 0; v < bn.variables.size(); ++v) {
    std::vector<effect> effects(bn.variables.size(), effect::frame);
    effects[position[v]] = effect::free;
    const diagram frame = effect_relation(eng, effects);
    const diagram f = to_diagram(eng, bn.updates[v],
                                 [&](const std::string &name) { return level_of.at(name); });
    const diagram next = make_literal(eng, static_cast<level_t>(2 * position[v] + 1));
    parts.push_back(bdd_and(eng, frame, apply_reduce(eng, next, f, ops::xnor)));
  }
  return parts;
}

} // namespace detail

/// Encodes `m` with the variable at input index order[k] on level 2k
inline symbolic_model build_symbolic(engine &eng, const model &m, std::vector<std::size_t> order,
                                     partition part = partition::joint) {
  const auto &names = variable_names(m);
  detail::check_permutation(order, names.size());
  std::vector<std::size_t> position(names.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    position[order[k]] = k;

  symbolic_model sm;
  for (const std::size_t v : order)
    sm.variables.push_back(names[v]);
  sm.order = std::move(order);

  const std::vector<bool> init = initial_values(m);
  std::vector<std::pair<level_t, bool>> cube;
  for (std::size_t v = 0; v < names.size(); ++v)
    cube.emplace_back(sm.unprimed(position[v]), init[v]);
  sm.initial = make_cube(eng, std::move(cube));

  std::vector<diagram> parts = std::holds_alternative<petri_net>(m)
                                   ? detail::petri_parts(eng, std::get<petri_net>(m), position)
                                   : detail::bnet_parts(eng, std::get<boolean_network>(m), position);
  if (part == partition::disjoint) {
    sm.relation = relation_spec::split(std::move(parts));
  } else {
    diagram joint = diagram::terminal(false);
    for (std::size_t i = 0; i < parts.size(); ++i)
      joint = i == 0 ? parts[0] : bdd_or(eng, joint, parts[i]);
    sm.relation = relation_spec::joint(std::move(joint));
  }
  return sm;
}

inline std::vector<std::size_t> input_order(const model &m) {
  std::vector<std::size_t> order(variable_names(m).size());
  for (std::size_t k = 0; k < order.size(); ++k)
    order[k] = k;
  return order;
}

} // namespace xbdd
