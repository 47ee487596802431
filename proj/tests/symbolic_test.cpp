#include <gtest/gtest.h>

#include <xbdd/symbolic.hpp>

#include "explicit.hpp"
#include "oracle.hpp"

using namespace xbdd;

namespace {

engine make_engine() { return engine(block_config{64, 1 << 16}); }

const char *two_state_pnet = "places: s1 s2\n"
                        "initial: s1\n"
                        "transition t_a: in s1 ; out s2\n"
                        "transition t_b: in s2 ; out s1\n"
                        "transition t_c: in s2 ; out s2\n";

/// Checks R(s, s') on every pair against the explicit successor relation
void expect_sound(engine &eng, const model &m, const symbolic_model &sm, const diagram &r) {
  const std::size_t n = sm.variables.size();
  std::vector<level_t> labels;
  for (level_t l = 0; l < 2 * n; ++l)
    labels.push_back(l);
  const auto table = truth_table(eng, r, labels);
  for (std::size_t i = 0; i < table.size(); ++i) {
    explicit_state::state s = 0, t = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (oracle::bit(i, 2 * k, 2 * n))
        s |= 1u << sm.order[k];
      if (oracle::bit(i, 2 * k + 1, 2 * n))
        t |= 1u << sm.order[k];
    }
    const auto succ = explicit_state::successors(m, s);
    ASSERT_EQ(table[i], std::binary_search(succ.begin(), succ.end(), t))
        << "s=" << s << " s'=" << t;
  }
}

} // namespace

TEST(Symbolic, TwoStateInitialState) {
  engine eng = make_engine();
  const model m = parse_pnet(two_state_pnet);
  const symbolic_model sm = build_symbolic(eng, m, input_order(m));
  EXPECT_EQ(sm.variables, (std::vector<std::string>{"s1", "s2"}));
  EXPECT_TRUE(equal(eng, sm.initial, make_cube(eng, {{0, true}, {2, false}})));
}

TEST(Symbolic, TwoStateRelationOnOneHotStatesIsTheThreeCubes) {
  engine eng = make_engine();
  const model m = parse_pnet(two_state_pnet);
  const symbolic_model sm = build_symbolic(eng, m, input_order(m));
  ASSERT_EQ(sm.relation.parts.size(), 1u);
  const diagram onehot =
      bdd_and(eng, apply_reduce(eng, make_literal(eng, 0), make_literal(eng, 2), ops::xor_),
              apply_reduce(eng, make_literal(eng, 1), make_literal(eng, 3), ops::xor_));
  diagram cubes = make_cube(eng, {{0, true}, {1, false}, {2, false}, {3, true}});
  cubes = bdd_or(eng, cubes, make_cube(eng, {{0, false}, {1, true}, {2, true}, {3, false}}));
  cubes = bdd_or(eng, cubes, make_cube(eng, {{0, false}, {1, false}, {2, true}, {3, true}}));
  EXPECT_TRUE(equal(eng, bdd_and(eng, sm.relation.parts[0], onehot), cubes));
  expect_sound(eng, m, sm, sm.relation.parts[0]);
}

TEST(Symbolic, SingleTransitionHasNoFrame) {
  engine eng = make_engine();
  const model m = parse_pnet("places: s1 s2\ntransition t: in s1 ; out s2\n");
  const symbolic_model sm = build_symbolic(eng, m, input_order(m));
  EXPECT_TRUE(equal(eng, sm.relation.parts[0], make_cube(eng, {{0, true}, {1, false}, {3, true}})));
}

TEST(Symbolic, BooleanNetworkMatchesAsyncSteps) {
  engine eng = make_engine();
  const model m = parse_bnet("targets, factors\na, b & !c\nb, a | c\nc, !c\ninitial: a\n");
  const symbolic_model sm = build_symbolic(eng, m, input_order(m));
  expect_sound(eng, m, sm, sm.relation.parts[0]);
  EXPECT_TRUE(equal(eng, sm.initial, make_cube(eng, {{0, true}, {2, false}, {4, false}})));
}

TEST(Symbolic, RandomModelsAreSoundUnderAnyOrder) {
  for (int seed = 0; seed < 30; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 3 + seed % 4;
    const model m = seed % 2 == 0 ? model(explicit_state::random_net(rng, n, 2 + seed % 5))
                                  : model(explicit_state::random_bnet(rng, n));
    std::vector<std::size_t> order = input_order(m);
    std::shuffle(order.begin(), order.end(), rng);
    engine eng = make_engine();
    const symbolic_model sm = build_symbolic(eng, m, order, partition::joint);
    SCOPED_TRACE(seed);
    expect_sound(eng, m, sm, sm.relation.parts[0]);

    // interleaving: relation below 2n, initial set only on unprimed levels
    if (!sm.relation.parts[0].is_terminal())
      EXPECT_LT(sm.relation.parts[0].max_level(), 2 * n);
    for (const level_info &li : sm.initial.levels())
      EXPECT_EQ(li.level % 2, 0u);
  }
}

TEST(Symbolic, JointIsTheDisjunctionOfTheParts) {
  for (int seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    const model m = seed % 2 == 0 ? model(explicit_state::random_net(rng, 6, 5))
                                  : model(explicit_state::random_bnet(rng, 5));
    engine eng = make_engine();
    const symbolic_model joint = build_symbolic(eng, m, order_variables_sloan(m), partition::joint);
    const symbolic_model split = build_symbolic(eng, m, order_variables_sloan(m), partition::disjoint);
    ASSERT_TRUE(split.relation.disjoint);
    diagram acc = diagram::terminal(false);
    for (const diagram &p : split.relation.parts)
      acc = bdd_or(eng, acc, p);
    EXPECT_TRUE(equal(eng, acc, joint.relation.parts[0]));
  }
}

TEST(Symbolic, SloanKeepsTheTwoStatePlacesAdjacent) {
  const model m = parse_pnet(two_state_pnet);
  const auto order = order_variables_sloan(m);
  ASSERT_EQ(order.size(), 2u);
  EXPECT_NE(order[0], order[1]);
}

TEST(Symbolic, RejectsBadOrders) {
  engine eng = make_engine();
  const model m = parse_pnet(two_state_pnet);
  EXPECT_THROW(build_symbolic(eng, m, {0}), input_error);
  EXPECT_THROW(build_symbolic(eng, m, {0, 0}), input_error);
  EXPECT_THROW(build_symbolic(eng, m, {0, 2}), input_error);
}

TEST(Symbolic, EmptyNetHasEmptyRelation) {
  engine eng = make_engine();
  const model m = parse_pnet("places: a\ninitial: a\n");
  EXPECT_TRUE(build_symbolic(eng, m, {0}).relation.parts[0].is_false());
  EXPECT_TRUE(build_symbolic(eng, m, {0}, partition::disjoint).relation.parts.empty());
}
