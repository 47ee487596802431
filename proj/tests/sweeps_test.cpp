#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"

using namespace xbdd;

namespace {

const ptr F = ptr::terminal(false);
const ptr T = ptr::terminal(true);

arc_stream make_stream(engine &eng, std::vector<arc> internal, std::vector<arc> terminal,
                       std::vector<level_info> levels) {
  std::sort(internal.begin(), internal.end(), arc_by_target{});
  std::sort(terminal.begin(), terminal.end(), arc_by_source{});
  arc_stream u;
  u.internal = write_all(eng, internal);
  u.terminal = write_all(eng, terminal);
  u.levels = std::move(levels);
  return u;
}

ptr lo(level_t l, std::uint64_t i) { return ptr::node(l, i); }
ptr hi(level_t l, std::uint64_t i) { return ptr::node(l, i).with_flag(true); }

} // namespace

TEST(Apply, SoundForEveryOperator) {
  std::mt19937_64 rng(17);
  engine eng({16, 8192});
  const std::size_t n = 9;
  const auto labels = oracle::iota_levels(n);
  for (const boolean_op &op : ops::all) {
    for (int round = 0; round < 6; ++round) {
      const auto tf = oracle::random_table(rng, n, 0.2 + 0.1 * round);
      const auto tg = oracle::random_table(rng, n, 0.7 - 0.1 * round);
      const diagram f = oracle::build(eng, labels, tf);
      const diagram g = oracle::build(eng, labels, tg);
      const diagram h = apply_reduce(eng, f, g, op);
      EXPECT_EQ(truth_table(eng, h, labels), oracle::pointwise(tf, tg, op)) << op.name();
      EXPECT_TRUE(oracle::is_reduced(eng, h));
    }
  }
}

TEST(Apply, SoundOnFourteenVariablesWithSparseFunctions) {
  std::mt19937_64 rng(23);
  engine eng({64, 1 << 16});
  const std::size_t n = 14;
  const auto labels = oracle::iota_levels(n);
  for (const boolean_op &op : {ops::and_, ops::or_, ops::xor_}) {
    const auto tf = oracle::random_table(rng, n, 0.05);
    const auto tg = oracle::random_table(rng, n, 0.9);
    const diagram h = apply_reduce(eng, oracle::build(eng, labels, tf), oracle::build(eng, labels, tg), op);
    EXPECT_EQ(truth_table(eng, h, labels), oracle::pointwise(tf, tg, op)) << op.name();
  }
}

TEST(Apply, OperandsOnDisjointLevels) {
  engine eng;
  const diagram f = make_literal(eng, 1);
  const diagram g = make_literal(eng, 4, false);
  const diagram h = bdd_and(eng, f, g);
  EXPECT_EQ(truth_table(eng, h, {1, 4}), (oracle::table{0, 0, 1, 0}));
  const diagram k = bdd_or(eng, g, f);
  EXPECT_EQ(truth_table(eng, k, {1, 4}), (oracle::table{1, 0, 1, 1}));
}

TEST(Apply, ConjunctionWithTrueIsIdentity) {
  std::mt19937_64 rng(1);
  engine eng;
  const auto labels = oracle::iota_levels(6);
  const diagram f = oracle::build(eng, labels, oracle::random_table(rng, 6));
  EXPECT_TRUE(equal(eng, bdd_and(eng, f, diagram::terminal(true)), f));
  EXPECT_TRUE(equal(eng, bdd_and(eng, diagram::terminal(true), f), f));
}

TEST(Apply, XorWithItselfIsFalse) {
  std::mt19937_64 rng(2);
  engine eng;
  const auto labels = oracle::iota_levels(7);
  const diagram f = oracle::build(eng, labels, oracle::random_table(rng, 7));
  const diagram h = apply_reduce(eng, f, f, ops::xor_);
  EXPECT_TRUE(h.is_false());
}

TEST(Apply, ExampleInitialStateAndRelation) {
  // x1 & !x2 conjoined with the three-transition relation keeps exactly the
  // transition 1 -> 2
  engine eng;
  const diagram s = make_cube(eng, {{0, true}, {2, false}});
  const diagram r = bdd_or(eng,
                           bdd_or(eng, make_cube(eng, {{0, true}, {1, false}, {2, false}, {3, true}}),
                                  make_cube(eng, {{0, false}, {1, true}, {2, true}, {3, false}})),
                           make_cube(eng, {{0, false}, {1, false}, {2, true}, {3, true}}));
  const diagram h = bdd_and(eng, s, r);
  const auto t = truth_table(eng, h, {0, 1, 2, 3});
  for (std::size_t i = 0; i < t.size(); ++i)
    EXPECT_EQ(t[i], i == 0b1001) << i;
}

TEST(Apply, TerminalOperandsNeedNoSweep) {
  engine eng;
  const arc_stream u = apply(eng, diagram::terminal(true), diagram::terminal(false), ops::or_);
  ASSERT_TRUE(u.terminal_root.has_value());
  EXPECT_TRUE(*u.terminal_root);
  EXPECT_EQ(eng.snapshot().blocks_written, 0u);
}

TEST(Apply, PruningIsOnlyForConjunction) {
  engine eng;
  const std::vector<bool> vs{true};
  EXPECT_THROW(apply(eng, make_literal(eng, 0), make_literal(eng, 0), ops::or_, &vs), input_error);
}

TEST(Reduce, RuleOneSuppressesRedundantTests) {
  engine eng;
  // (0,0): low F, high (1,0); (1,0): low T, high T
  const arc_stream u = make_stream(eng, {{hi(0, 0), lo(1, 0)}},
                                   {{lo(0, 0), F}, {lo(1, 0), T}, {hi(1, 0), T}},
                                   {{0, 1}, {1, 1}});
  const diagram d = reduce(eng, u);
  EXPECT_EQ(count_nodes(d), 1u);
  EXPECT_EQ(truth_table(eng, d, {0}), (oracle::table{0, 1}));
}

TEST(Reduce, RuleTwoMergesDuplicates) {
  engine eng;
  // (0,0): low (1,0), high (1,1); both level-1 nodes are (F, T)
  const arc_stream u = make_stream(
      eng, {{lo(0, 0), lo(1, 0)}, {hi(0, 0), lo(1, 1)}},
      {{lo(1, 0), F}, {hi(1, 0), T}, {lo(1, 1), F}, {hi(1, 1), T}}, {{0, 1}, {1, 2}});
  const diagram d = reduce(eng, u);
  EXPECT_EQ(count_nodes(d), 1u);
  EXPECT_EQ(d.root(), ptr::node(1, 0));
}

TEST(Reduce, DanglingArcIsAStructuralError) {
  engine eng;
  const arc_stream u = make_stream(eng, {{hi(0, 0), lo(1, 5)}},
                                   {{lo(0, 0), F}, {lo(1, 0), F}, {hi(1, 0), T}}, {{0, 1}, {1, 1}});
  EXPECT_THROW(reduce(eng, u), invariant_violation);
}

TEST(Reduce, MissingArcIsAStructuralError) {
  engine eng;
  const arc_stream u = make_stream(eng, {}, {{lo(0, 0), F}}, {{0, 1}});
  EXPECT_THROW(reduce(eng, u), invariant_violation);
}

TEST(Reduce, SubstitutionRenamesLevels) {
  engine eng;
  const diagram d = make_cube(eng, {{1, true}, {3, false}});
  const auto pi = monotone_subst::from_map({{1, 0}, {3, 2}});
  const diagram r = reduce(eng, transpose_diagram(eng, d), &pi);
  EXPECT_EQ(r.levels(), (std::vector<level_info>{{0, 1}, {2, 1}}));
  EXPECT_EQ(truth_table(eng, r, {0, 2}), truth_table(eng, d, {1, 3}));
}

TEST(Reduce, InvalidSubstitutionsAreRejected) {
  engine eng;
  const diagram d = make_cube(eng, {{1, true}, {3, false}});
  EXPECT_THROW(monotone_subst::from_map({{1, 3}, {3, 2}}), non_monotone_error);
  const auto partial = monotone_subst::from_map({{1, 0}});
  EXPECT_THROW(reduce(eng, transpose_diagram(eng, d), &partial), input_error);
  const auto negative = monotone_subst::shift(-2);
  EXPECT_THROW(reduce(eng, transpose_diagram(eng, d), &negative), input_error);
}

TEST(Reduce, ExternalPathMatchesInMemoryPath) {
  // A tiny budget forces levels wider than the in-memory threshold through
  // the sorting path.
  std::mt19937_64 rng(29);
  const std::size_t n = 12;
  const auto labels = oracle::iota_levels(n);
  const auto tf = oracle::random_table(rng, n, 0.5);
  const auto tg = oracle::random_table(rng, n, 0.5);
  engine big({64, 1 << 18});
  engine tiny({4, 128});
  const diagram f_big = oracle::build(big, labels, tf);
  const diagram g_big = oracle::build(big, labels, tg);
  const diagram f_tiny = oracle::build(tiny, labels, tf);
  const diagram g_tiny = oracle::build(tiny, labels, tg);
  const diagram h_big = bdd_and(big, f_big, g_big);
  const diagram h_tiny = bdd_and(tiny, f_tiny, g_tiny);
  EXPECT_GT(tiny.snapshot().sorts, 0u);
  EXPECT_EQ(read_all(big, h_big.file()), read_all(tiny, h_tiny.file()));
  EXPECT_EQ(h_big.levels(), h_tiny.levels());
  EXPECT_LE(tiny.peak_resident(), 128u);
}

TEST(Reduce, CanonicalAcrossConstructionOrders) {
  std::mt19937_64 rng(31);
  engine eng({16, 8192});
  const std::size_t n = 10;
  const auto labels = oracle::iota_levels(n);
  for (int round = 0; round < 5; ++round) {
    const auto ta = oracle::random_table(rng, n);
    const auto tb = oracle::random_table(rng, n);
    const auto tc = oracle::random_table(rng, n);
    const diagram a = oracle::build(eng, labels, ta);
    const diagram b = oracle::build(eng, labels, tb);
    const diagram c = oracle::build(eng, labels, tc);
    // (a | b) | c versus a | (c | b) versus direct construction
    const diagram x = bdd_or(eng, bdd_or(eng, a, b), c);
    const diagram y = bdd_or(eng, a, bdd_or(eng, c, b));
    const diagram z = oracle::build(eng, labels, oracle::pointwise(oracle::pointwise(ta, tb, ops::or_), tc, ops::or_));
    EXPECT_EQ(read_all(eng, x.file()), read_all(eng, y.file()));
    EXPECT_EQ(read_all(eng, x.file()), read_all(eng, z.file()));
    EXPECT_EQ(x.root(), z.root());
  }
}

TEST(Transpose, SortsByTarget) {
  engine eng;
  const ptr a = lo(0, 0), b = lo(1, 0), c = lo(2, 0);
  const auto out = read_all(eng, transpose(eng, write_all<arc>(eng, {{a, c}, {b, c}, {a, b}})));
  EXPECT_EQ(out, (std::vector<arc>{{a, b}, {a, c}, {b, c}}));
}

TEST(Transpose, EmptyStream) {
  engine eng;
  EXPECT_TRUE(transpose(eng, record_file<arc>{}).empty());
}

TEST(Transpose, RandomStreamIsAPermutation) {
  std::mt19937_64 rng(37);
  engine eng({8, 256});
  std::vector<arc> v(10000);
  for (auto &x : v)
    x = {ptr::node(rng() % 50, rng() % 100).with_flag(rng() & 1), ptr::node(50 + rng() % 50, rng() % 100)};
  const auto out = read_all(eng, transpose(eng, write_all(eng, v)));
  EXPECT_TRUE(std::is_sorted(out.begin(), out.end(), arc_by_target{}));
  std::sort(v.begin(), v.end(), arc_by_target{});
  EXPECT_EQ(out, v);
}

TEST(TransposeDiagram, ArcsOfTheInitialState) {
  engine eng;
  const diagram d = make_cube(eng, {{0, true}, {2, false}});
  const arc_stream u = transpose_diagram(eng, d);
  EXPECT_EQ(read_all(eng, u.internal), (std::vector<arc>{{hi(0, 0), lo(2, 0)}}));
  EXPECT_EQ(read_all(eng, u.terminal),
            (std::vector<arc>{{lo(0, 0), F}, {lo(2, 0), T}, {hi(2, 0), F}}));
}

TEST(TransposeDiagram, TerminalHasNoArcs) {
  engine eng;
  const arc_stream u = transpose_diagram(eng, diagram::terminal(true));
  EXPECT_EQ(u.records(), 0u);
  EXPECT_TRUE(reduce(eng, u).is_true());
}

TEST(TransposeDiagram, ReduceIsIdempotent) {
  std::mt19937_64 rng(41);
  engine eng({16, 8192});
  const auto labels = oracle::iota_levels(10, 2, 3);
  for (int round = 0; round < 5; ++round) {
    const diagram d = oracle::build(eng, labels, oracle::random_table(rng, 10));
    const diagram r = reduce(eng, transpose_diagram(eng, d));
    EXPECT_EQ(read_all(eng, r.file()), read_all(eng, d.file()));
    EXPECT_EQ(r.levels(), d.levels());
  }
}
