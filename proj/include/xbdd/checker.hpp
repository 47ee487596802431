/// @file  checker.hpp
/// @brief The symbolic model checking tasks: reachability, deadlocks,
///        SCC decomposition and single image steps, with their reports

#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "inspect.hpp"
#include "symbolic.hpp"

namespace xbdd {

struct check_options {
  opt_tier tier = opt_tier::shift_replace;
  /// Apply relnext to the whole set instead of the new frontier
  bool full_set = false;
  /// Verify S_k <= S_k+1 after every step
  bool check_monotone = false;
};

struct reach_result {
  diagram states;
  std::uint64_t iterations = 0; // relnext calls
};

/// Least fixpoint of S = S_I | Next(S)
inline reach_result reachable_states(engine &eng, const symbolic_model &sm,
                                     const check_options &opt = {}) {
  reach_result r{sm.initial, 0};
  diagram frontier = sm.initial;
  for (;;) {
    const diagram image = relnext(eng, opt.full_set ? r.states : frontier, sm.relation, opt.tier);
    ++r.iterations;
    const diagram next = bdd_or(eng, r.states, image);
    if (opt.check_monotone && !bdd_diff(eng, r.states, next).is_false())
      throw invariant_violation("reachable set shrank in iteration " +
                                std::to_string(r.iterations));
    if (equal(eng, next, r.states))
      return r;
    if (!opt.full_set)
      frontier = bdd_diff(eng, image, r.states);
    r.states = next;
  }
}

/// States of `reach` without a successor
inline diagram deadlock_states(engine &eng, const symbolic_model &sm, const diagram &reach,
                               opt_tier tier = opt_tier::shift_replace) {
  if (reach.is_false())
    return reach;
  return bdd_diff(eng, reach, relprev(eng, reach, sm.relation, tier));
}

struct scc_result {
  count_t components;      // deadlock singletons included
  count_t deadlocks;
  std::uint64_t pivots = 0; // components found by the forward/backward search
};

namespace detail {

/// Member of `d` as a full cube over the state levels
inline diagram pivot_of(engine &eng, const symbolic_model &sm, const diagram &d) {
  const std::vector<level_t> ones = least_assignment(eng, d);
  std::vector<std::pair<level_t, bool>> cube;
  for (const level_t l : sm.state_levels())
    cube.emplace_back(l, std::binary_search(ones.begin(), ones.end(), l));
  return make_cube(eng, std::move(cube));
}

} // namespace detail

/// Splits `reach` into strongly connected components. Deadlock states go to
/// `on_scc` first as one bundle of singleton components (second argument
/// true); every other component is reported on its own.
inline scc_result decompose_scc(engine &eng, const symbolic_model &sm, const diagram &reach,
                                opt_tier tier = opt_tier::shift_replace,
                                const std::function<void(const diagram &, bool)> &on_scc = {}) {
  scc_result r;
  const std::vector<level_t> levels = sm.state_levels();
  const diagram dead = deadlock_states(eng, sm, reach, tier);
  r.deadlocks = count_assignments(eng, dead, levels);
  r.components = r.deadlocks;
  if (on_scc && !dead.is_false())
    on_scc(dead, true);

  const auto next_in = [&](const diagram &s, const diagram &within) {
    return bdd_and(eng, relnext(eng, s, sm.relation, tier), within);
  };
  const auto prev_in = [&](const diagram &s, const diagram &within) {
    return bdd_and(eng, relprev(eng, s, sm.relation, tier), within);
  };

  // each entry: a union of components, and a preferred region for its pivot
  std::vector<std::pair<diagram, diagram>> work{{bdd_diff(eng, reach, dead), diagram::terminal(false)}};
  while (!work.empty()) {
    auto [space, hint] = std::move(work.back());
    work.pop_back();
    if (space.is_false())
      continue;
    const diagram hinted = bdd_and(eng, hint, space);
    const diagram pivot = detail::pivot_of(eng, sm, hinted.is_false() ? space : hinted);

    diagram fwd = pivot, layer = pivot;
    for (;;) {
      const diagram fresh = bdd_diff(eng, next_in(layer, space), fwd);
      if (fresh.is_false())
        break;
      fwd = bdd_or(eng, fwd, fresh);
      layer = fresh;
    }
    diagram scc = pivot, blayer = pivot;
    for (;;) {
      const diagram fresh = bdd_diff(eng, prev_in(blayer, fwd), scc);
      if (fresh.is_false())
        break;
      scc = bdd_or(eng, scc, fresh);
      blayer = fresh;
    }
    r.components += count_t(1);
    ++r.pivots;
    if (on_scc)
      on_scc(scc, false);

    const diagram outside = bdd_diff(eng, space, fwd);
    if (!outside.is_false())
      work.emplace_back(outside, prev_in(scc, outside));
    const diagram below = bdd_diff(eng, fwd, scc);
    if (!below.is_false())
      work.emplace_back(below, bdd_diff(eng, layer, scc));
  }
  return r;
}

struct task_report {
  std::string task;
  std::string model;
  double wall_ms = 0;
  std::uint64_t iterations = 0;
  count_t state_count;
  std::uint64_t result_nodes = 0;
  std::size_t peak_resident_records = 0;
  io_counters io;
  std::uint64_t largest_intermediate_nodes = 0;
  opt_tier tier = opt_tier::shift_replace;
  std::optional<partition> part;
  std::optional<count_t> scc_count;
  std::optional<count_t> deadlock_count;
  diagram result = diagram::terminal(false);
};

namespace detail {

/// Resets the engine's counters, runs `body`, and fills in the measurements
template <class Body>
task_report measured(engine &eng, std::string task, std::string model_name, opt_tier tier,
                     Body &&body) {
  task_report rep;
  rep.task = std::move(task);
  rep.model = std::move(model_name);
  rep.tier = tier;
  eng.reset_counters();
  eng.stats() = {};
  eng.reset_peak();
  const auto start = std::chrono::steady_clock::now();
  body(rep);
  rep.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  rep.io = eng.snapshot();
  rep.peak_resident_records = eng.peak_resident();
  rep.largest_intermediate_nodes =
      std::max(eng.stats().largest_unreduced_nodes, eng.stats().largest_reduced_nodes);
  rep.result_nodes = rep.result.node_count();
  return rep;
}

} // namespace detail

inline task_report task_reachability(engine &eng, const symbolic_model &sm,
                                     const std::string &model_name, const check_options &opt = {}) {
  return detail::measured(eng, "reach", model_name, opt.tier, [&](task_report &rep) {
    const reach_result r = reachable_states(eng, sm, opt);
    rep.iterations = r.iterations;
    rep.result = r.states;
    rep.state_count = count_assignments(eng, r.states, sm.state_levels());
  });
}

inline task_report task_deadlock(engine &eng, const symbolic_model &sm,
                                 const std::string &model_name, const check_options &opt = {}) {
  return detail::measured(eng, "deadlock", model_name, opt.tier, [&](task_report &rep) {
    const reach_result r = reachable_states(eng, sm, opt);
    rep.iterations = r.iterations;
    rep.result = deadlock_states(eng, sm, r.states, opt.tier);
    rep.state_count = count_assignments(eng, rep.result, sm.state_levels());
    rep.deadlock_count = rep.state_count;
  });
}

inline task_report task_scc(engine &eng, const symbolic_model &sm, const std::string &model_name,
                            const check_options &opt = {}) {
  return detail::measured(eng, "scc", model_name, opt.tier, [&](task_report &rep) {
    const reach_result r = reachable_states(eng, sm, opt);
    const scc_result s = decompose_scc(eng, sm, r.states, opt.tier);
    rep.iterations = r.iterations + s.pivots;
    rep.result = r.states;
    rep.state_count = count_assignments(eng, r.states, sm.state_levels());
    rep.scc_count = s.components;
    rep.deadlock_count = s.deadlocks;
  });
}

namespace detail {

/// Unprimed levels below the highest level used by `s` or `r`
inline std::vector<level_t> image_levels(const diagram &s, const diagram &r) {
  level_t bound = 0;
  for (const diagram *d : {&s, &r})
    if (!d->is_terminal())
      bound = std::max(bound, d->max_level() + 1);
  std::vector<level_t> out;
  for (level_t l = 0; l < bound; l += 2)
    out.push_back(l);
  return out;
}

} // namespace detail

/// One forward (or backward) image of `s` under the single relation `r`
inline task_report task_image(engine &eng, const diagram &s, const diagram &r, bool forward,
                              const std::string &model_name,
                              opt_tier tier = opt_tier::shift_replace) {
  return detail::measured(eng, forward ? "next" : "prev", model_name, tier,
                          [&](task_report &rep) {
                            const relation_spec spec = relation_spec::joint(r);
                            rep.result = forward ? relnext(eng, s, spec, tier)
                                                 : relprev(eng, s, spec, tier);
                            rep.iterations = 1;
                            rep.state_count =
                                count_assignments(eng, rep.result, detail::image_levels(s, r));
                          });
}

} // namespace xbdd
