#include <gtest/gtest.h>

#include <xbdd/models.hpp>
#include <xbdd/sloan.hpp>

#include <algorithm>
#include <numeric>
#include <random>

using namespace xbdd;

namespace {

bool eval_with(const bool_expr &e, std::map<std::string, bool> env) {
  return e.eval([&](const std::string &n) { return env.at(n); });
}

const char *two_state_pnet = "# two-place cycle\n"
                        "places: s1 s2\n"
                        "initial: s1\n"
                        "transition t_a: in s1 ; out s2\n"
                        "transition t_b: in s2 ; out s1\n"
                        "transition t_c: in s2 ; out s2\n";

} // namespace

TEST(BoolExpr, ParsesAndEvaluates) {
  const bool_expr e = parse_bool_expr("a & !b");
  EXPECT_TRUE(eval_with(e, {{"a", true}, {"b", false}}));
  EXPECT_FALSE(eval_with(e, {{"a", true}, {"b", true}}));
  EXPECT_EQ(e.support(), (std::set<std::string>{"a", "b"}));
}

TEST(BoolExpr, AndBindsTighterThanOr) {
  const bool_expr e = parse_bool_expr("a | b & c");
  ASSERT_EQ(e.what(), bool_expr::kind::or_);
  EXPECT_EQ(e.operand(1).what(), bool_expr::kind::and_);
  EXPECT_TRUE(eval_with(e, {{"a", true}, {"b", false}, {"c", false}}));
  EXPECT_FALSE(eval_with(e, {{"a", false}, {"b", true}, {"c", false}}));
}

TEST(BoolExpr, ConstantsAndXor) {
  EXPECT_TRUE(eval_with(parse_bool_expr("!(a ^ 1)"), {{"a", true}}));
  EXPECT_FALSE(eval_with(parse_bool_expr("!(a ^ 1)"), {{"a", false}}));
  EXPECT_TRUE(eval_with(parse_bool_expr("0 -> a"), {{"a", false}}));
}

TEST(BoolExpr, ImplicationIsRightAssociative) {
  const bool_expr e = parse_bool_expr("a -> b -> c");
  ASSERT_EQ(e.what(), bool_expr::kind::implies);
  EXPECT_EQ(e.operand(1).what(), bool_expr::kind::implies);
}

TEST(BoolExpr, ErrorsCarryOffsets) {
  try {
    parse_bool_expr("a & ");
    FAIL();
  } catch (const parse_error &e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  try {
    parse_bool_expr("(a | b");
    FAIL();
  } catch (const parse_error &e) {
    EXPECT_EQ(e.offset(), 6u);
  }
  EXPECT_THROW(parse_bool_expr("a $ b"), parse_error);
  EXPECT_THROW(parse_bool_expr("10"), parse_error);
}

TEST(BoolExpr, PrintParseRoundTrip) {
  for (const char *text : {"a & !b", "(a | b) & c", "a | b & c", "a ^ (b ^ c)", "!(a -> b) -> c",
                           "(a -> b) -> c", "!!a", "a & (b | !(c ^ 1))"}) {
    const bool_expr e = parse_bool_expr(text);
    EXPECT_EQ(parse_bool_expr(e.to_string()), e) << text << " printed as " << e.to_string();
  }
}

TEST(Pnet, ParsesTheTwoPlaceCycle) {
  const petri_net net = parse_pnet(two_state_pnet);
  EXPECT_EQ(net.places, (std::vector<std::string>{"s1", "s2"}));
  ASSERT_EQ(net.transitions.size(), 3u);
  EXPECT_EQ(net.transitions[0].pre, std::vector<std::size_t>{0});
  EXPECT_EQ(net.transitions[0].post, std::vector<std::size_t>{1});
  EXPECT_EQ(net.transitions[2].pre, net.transitions[2].post);
  EXPECT_EQ(net.initial, (std::vector<bool>{true, false}));
}

TEST(Pnet, AcceptsCrlf) {
  std::string text = two_state_pnet;
  for (std::size_t p = 0; (p = text.find('\n', p)) != std::string::npos; p += 2)
    text.insert(p, "\r");
  EXPECT_EQ(parse_pnet(text), parse_pnet(two_state_pnet));
}

TEST(Pnet, RoundTrips) {
  const petri_net net = parse_pnet(two_state_pnet);
  EXPECT_EQ(parse_pnet(print_pnet(net)), net);
}

TEST(Pnet, RejectsBadInput) {
  EXPECT_THROW(parse_pnet(""), input_error);
  EXPECT_THROW(parse_pnet("# only a comment\n"), input_error);
  EXPECT_THROW(parse_pnet("places: a a\n"), parse_error);
  EXPECT_THROW(parse_pnet("places: a\ntransition t: in b ; out a\n"), parse_error);
  EXPECT_THROW(parse_pnet("places: a\ntransition t: in a out a\n"), parse_error);
  EXPECT_THROW(parse_pnet("places: a\ninitial: z\n"), parse_error);
  EXPECT_THROW(parse_pnet("places: a\nplaces: b\n"), parse_error);
  EXPECT_THROW(parse_pnet("places: a\nfoo\n"), parse_error);
  try {
    parse_pnet("places: a\ntransition t: in q ; out a\n");
    FAIL();
  } catch (const parse_error &e) {
    EXPECT_EQ(e.offset(), 10u);
  }
}

TEST(Bnet, RoundTripsThreeVariables) {
  const char *text = "targets, factors\n"
                     "a, b & !c\n"
                     "b, a | c\n"
                     "c, 1\n"
                     "initial: a !b\n";
  const boolean_network bn = parse_bnet(text);
  EXPECT_EQ(bn.variables, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(bn.initial, (std::vector<bool>{true, false, false}));
  EXPECT_EQ(parse_bnet(print_bnet(bn)), bn);
}

TEST(Bnet, RejectsBadInput) {
  EXPECT_THROW(parse_bnet(""), input_error);
  EXPECT_THROW(parse_bnet("targets, factors\n"), input_error);
  EXPECT_THROW(parse_bnet("a, b\n"), parse_error);
  EXPECT_THROW(parse_bnet("targets, factors\na, b\n"), parse_error);
  EXPECT_THROW(parse_bnet("targets, factors\na, a\na, !a\n"), parse_error);
  EXPECT_THROW(parse_bnet("targets, factors\na, a &\n"), parse_error);
  EXPECT_THROW(parse_bnet("targets, factors\na, a\ninitial: a !a\n"), parse_error);
}

TEST(Models, FormatFromExtension) {
  EXPECT_EQ(format_from_extension("x/y.pnet"), model_format::pnet);
  EXPECT_EQ(format_from_extension("y.bnet"), model_format::bnet);
  EXPECT_THROW(format_from_extension("y.txt"), input_error);
  EXPECT_THROW(load_model("/nonexistent/file.pnet"), input_error);
}

TEST(Models, InteractionGroups) {
  const model m = parse_pnet(two_state_pnet);
  const auto groups = interaction_groups(m);
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(groups[0], (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(groups[2], (std::vector<std::size_t>{1}));

  const model b = parse_bnet("targets, factors\na, c\nb, b\nc, 1\n");
  EXPECT_EQ(interaction_groups(b)[0], (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(interaction_groups(b)[1], (std::vector<std::size_t>{1}));
}

TEST(Sloan, PathIsOrderedEndToEnd) {
  interaction_graph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.finish();
  EXPECT_EQ(sloan_order(g), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Sloan, ScrambledPathIsUnscrambled) {
  // path 3 - 0 - 4 - 1 - 2
  interaction_graph g(5);
  g.add_edge(3, 0);
  g.add_edge(0, 4);
  g.add_edge(4, 1);
  g.add_edge(1, 2);
  g.finish();
  const auto order = sloan_order(g);
  EXPECT_EQ(profile(g, order), 4u);
}

TEST(Sloan, IsAPermutationAcrossComponents) {
  interaction_graph g(7);
  g.add_edge(5, 6);
  g.add_edge(1, 3);
  g.add_edge(3, 0);
  g.finish();
  auto order = sloan_order(g);
  ASSERT_EQ(order.size(), 7u);
  // the component of vertex 0 comes first
  EXPECT_TRUE(std::is_permutation(order.begin(), order.begin() + 3,
                                  std::vector<std::size_t>{0, 1, 3}.begin()));
  std::sort(order.begin(), order.end());
  std::vector<std::size_t> all(7);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_EQ(order, all);
}

TEST(Sloan, UsuallyReducesTheProfileOfRandomGraphs) {
  int better_or_equal = 0;
  constexpr int runs = 50;
  for (int seed = 0; seed < runs; ++seed) {
    std::mt19937_64 rng(seed);
    constexpr std::size_t n = 20;
    // a banded graph under a random relabelling
    std::vector<std::size_t> label(n);
    std::iota(label.begin(), label.end(), 0);
    std::shuffle(label.begin(), label.end(), rng);
    interaction_graph g(n);
    std::uniform_int_distribution<std::size_t> width(1, 3);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 1, w = width(rng); d <= w && i + d < n; ++d)
        g.add_edge(label[i], label[i + d]);
    g.finish();
    std::vector<std::size_t> input(n);
    std::iota(input.begin(), input.end(), 0);
    const auto order = sloan_order(g);
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    ASSERT_EQ(sorted, input);
    if (profile(g, order) <= profile(g, input))
      ++better_or_equal;
  }
  EXPECT_GE(better_or_equal * 10, runs * 9);
}
