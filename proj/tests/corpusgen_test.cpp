#include <gtest/gtest.h>

#include "slicekit/slicekit.hpp"
#include "support/corpus_checks.hpp"

using namespace slicekit;

namespace {

using Pairs = std::set<std::pair<std::size_t, std::size_t>>;

using testkit::random_snippet;

}  // namespace

TEST(IndependentPairs, Examples) {
  auto u = load_unit("a = 1\nb = 2\nc = a + b", Lang::python);
  EXPECT_EQ(independent_pairs(u, build_dfg(u)), (Pairs{{0, 1}}));
  EXPECT_EQ(swappable_pairs(u, build_dfg(u)), (std::vector<StmtPair>{{0, 1}}));
}

// Statements 0 and 2 share no edge, so they are independent, but moving
// "a = 1" below "b = a" would change the flow; only the swap filter sees it.
TEST(IndependentPairs, FullChainHasNoSwappablePair) {
  auto chained = load_unit("a = 1\nb = a\nc = b", Lang::python);
  auto g = build_dfg(chained);
  EXPECT_EQ(independent_pairs(chained, g), (Pairs{{0, 2}}));
  EXPECT_TRUE(swappable_pairs(chained, g).empty());
}

TEST(IndependentPairs, MatchBruteForceScan) {
  Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    Lang lang = i % 2 ? Lang::python : Lang::java;
    std::string text = i % 3 ? testkit::straight_line(rng, lang, 8).text() : testkit::structured(rng, lang, 10);
    auto u = load_unit(text, lang);
    auto g = build_dfg(u);
    ASSERT_EQ(independent_pairs(u, g), testkit::brute_force_pairs(u, g)) << text;
  }
}

TEST(Permutation, OnlyLegalPairIsSwapped) {
  auto u = load_unit("a = 1\nb = 2\nc = a + b", Lang::python);
  Rng rng(3);
  auto ex = permute_statements(u, build_dfg(u), 1, rng);
  EXPECT_EQ(ex.original, "a = 1\nb = 2\nc = a + b");
  EXPECT_EQ(ex.permuted, "b = 2\na = 1\nc = a + b");
  EXPECT_EQ(ex.swaps, (std::vector<StmtPair>{{0, 1}}));
}

TEST(Permutation, ChainedSnippetIsUnchanged) {
  auto u = load_unit("a = 1\nb = a\nc = b\n", Lang::python);
  Rng rng(3);
  auto ex = permute_statements(u, build_dfg(u), 3, rng);
  EXPECT_EQ(ex.permuted, ex.original);
  EXPECT_TRUE(ex.swaps.empty());
}

TEST(Permutation, RejectsNonPositiveSwapBudget) {
  auto u = load_unit("a = 1\n", Lang::python);
  Rng rng(1);
  EXPECT_THROW(permute_statements(u, build_dfg(u), 0, rng), Error);
}

TEST(Permutation, PreservesDataFlowUpToTheSwaps) {
  Rng rng(1000);
  int swapped = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string text = random_snippet(rng, i);
    Lang lang = i % 2 ? Lang::python : Lang::java;
    auto u = load_unit(text, lang);
    auto g = build_dfg(u);
    auto ex = permute_statements(u, g, 3, rng);

    ASSERT_EQ(testkit::check_permutation(u, g, ex), "");
    swapped += static_cast<int>(ex.swaps.size());
  }
  EXPECT_GT(swapped, 500);
}

TEST(Permutation, DeterministicForSeed) {
  Rng gen(4);
  std::string text = testkit::straight_line(gen, Lang::java, 10).text();
  auto u = load_unit(text, Lang::java);
  auto g = build_dfg(u);
  Rng r1(99);
  Rng r2(99);
  auto a = permute_statements(u, g, 3, r1);
  auto b = permute_statements(u, g, 3, r2);
  EXPECT_EQ(a.permuted, b.permuted);
  EXPECT_EQ(a.swaps, b.swaps);
}

TEST(SpanCorruption, CoarseParentAndFineChild) {
  auto u = load_unit("a = 1\nb = 2\nc = a + b", Lang::python);
  auto g = build_dfg(u);
  std::size_t c_def = npos;
  for (const auto& v : g.nodes) {
    if (v.name == "c") c_def = v.id;
  }
  ASSERT_NE(c_def, npos);
  auto ex = corrupt_units(u, {statement_unit(u, 0), variable_unit(g, c_def)}, "MASK_{k}");
  EXPECT_EQ(ex.masked_input, "MASK_0\nb = 2\nMASK_1 = a + b");
  EXPECT_EQ(ex.target, "MASK_0 a = 1 MASK_1 c");
  EXPECT_EQ(ex.sentinels, 2u);
  EXPECT_EQ(reconstruct(ex.masked_input, ex.target, ex.sentinels, "MASK_{k}"), u.text);
}

TEST(SpanCorruption, NoVariablesMeansNoMask) {
  auto u = load_unit("print(1)\n", Lang::python);
  Rng rng(1);
  auto ex = span_corrupt(u, build_dfg(u), 0.25, rng);
  EXPECT_EQ(ex.masked_input, u.text);
  EXPECT_TRUE(ex.units.empty());
  EXPECT_TRUE(ex.target.empty());
  EXPECT_TRUE(ex.exhausted);
}

TEST(SpanCorruption, RejectsRatioOutsideUnitInterval) {
  auto u = load_unit("a = 1\n", Lang::python);
  Rng rng(1);
  EXPECT_THROW(span_corrupt(u, build_dfg(u), 0.0, rng), Error);
  EXPECT_THROW(span_corrupt(u, build_dfg(u), 1.0, rng), Error);
}

TEST(SpanCorruption, RoundTripAndRatio) {
  Rng rng(500);
  int exhausted = 0;
  for (int i = 0; i < 500; ++i) {
    std::string text = random_snippet(rng, i);
    Lang lang = i % 2 ? Lang::python : Lang::java;
    auto u = load_unit(text, lang);
    auto ex = span_corrupt(u, build_dfg(u), 0.25, rng);
    ASSERT_EQ(testkit::check_corruption(text, ex, 0.25), "");
    double goal = 0.25 * static_cast<double>(ex.total_tokens);
    if (ex.exhausted) {
      ++exhausted;
    } else {
      EXPECT_GE(static_cast<double>(ex.masked_tokens), goal);
      EXPECT_LE(static_cast<double>(ex.masked_tokens), std::ceil(goal) + static_cast<double>(ex.largest_step));
    }
    EXPECT_DOUBLE_EQ(ex.mask_ratio_used,
                     static_cast<double>(ex.masked_tokens) / static_cast<double>(ex.total_tokens));
  }
  EXPECT_LT(exhausted, 250);
}

TEST(SpanCorruption, ReconstructRejectsForeignTargets) {
  EXPECT_THROW(reconstruct("<mask_0> = 1", "<mask_1> a", 1), Error);
  EXPECT_THROW(reconstruct("<mask_0> = <mask_1>", "<mask_0> a", 2), Error);
}

TEST(Sft, ExtraneousStatementsTarget) {
  auto ex = fixtures::extraneous_statements();
  auto q = ex.query();
  auto sft = format_sft(q, oracle_slice(q));
  EXPECT_EQ(sft.target_text, "7: int temp\n8: if(C <= A){\n12: temp = B;");
  EXPECT_EQ(sft.input_text.substr(0, 7), "<code>\n");
  EXPECT_NE(sft.input_text.find("\n8: if(C <= A){\n"), std::string::npos);
  EXPECT_TRUE(sft.input_text.ends_with("<criterion> temp <line> 12 <slice>"));
}

TEST(Sft, SingleStatement) {
  SliceQuery q{load_unit("a = 1", Lang::python), "a", 1};
  EXPECT_EQ(format_sft(q, oracle_slice(q)).target_text, "1: a = 1");
}

TEST(Sft, RejectsGoldOutsideTheQuery) {
  SliceQuery q{load_unit("a = 1\nb = a\n", Lang::python), "b", 2};
  Slice bad;
  bad.line_numbers = {3};
  bad.lines = {"c = 1"};
  EXPECT_THROW(format_sft(q, bad), Error);
}

TEST(Sft, InputParsesBack) {
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    Lang lang = i % 2 ? Lang::python : Lang::java;
    std::string text = testkit::structured(rng, lang, 8);
    text.pop_back();
    auto u = load_unit(text, lang);
    SliceQuery q{u, "a", 1 + static_cast<int>(uniform_index(rng, u.lines.size()))};
    auto back = parse_sft_input(format_sft_input(q));
    EXPECT_EQ(back.code, text);
    EXPECT_EQ(back.criterion_var, "a");
    EXPECT_EQ(back.criterion_line, q.criterion_line);
  }
}
