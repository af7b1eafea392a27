#include <gtest/gtest.h>

#include "slicekit/slicekit.hpp"
#include "support/decode_fixtures.hpp"
#include "support/oracles.hpp"

using namespace slicekit;

namespace {

DecodeConfig unconstrained() {
  DecodeConfig c;
  c.lexical_mask = false;
  c.tsed_prune = false;
  return c;
}

int outside_tokens(const DecodeResult& r, const SliceQuery& q, const Tokenizer& tok) {
  auto allowed = allowed_tokens(format_sft_input(q), tok);
  int n = 0;
  for (int id : r.ids) n += allowed.contains(id) ? 0 : 1;
  return n;
}

// Generated slice weighted above the expected one, as a fine-tuned model
// that prefers the faulty continuation would.
ScriptedScorer prefer_generated(const Tokenizer& tok, const fixtures::MotivatingExample& ex) {
  return ScriptedScorer(tok, {{tok.encode(ex.generated), 0.6}, {tok.encode(ex.expected), 0.4}});
}

}  // namespace

TEST(StatementBoundary, Examples) {
  EXPECT_TRUE(is_statement_complete("7: int temp\n8: if(C <= A){", Lang::java));
  EXPECT_FALSE(is_statement_complete("10: for(int i=cnt;i>=0;", Lang::java));
  EXPECT_TRUE(is_statement_complete("x = 1\n", Lang::python));
  EXPECT_FALSE(is_statement_complete("x = f(1,\n", Lang::python));
  EXPECT_FALSE(is_statement_complete("x = 1", Lang::python));
  EXPECT_TRUE(is_statement_complete("s = \"(\";", Lang::java));
  EXPECT_FALSE(is_statement_complete("", Lang::java));
}

TEST(StatementBoundary, OnlyOnTerminatingPieces) {
  EXPECT_TRUE(is_boundary("a = 1;", ";", Lang::java));
  EXPECT_FALSE(is_boundary("a = 1;\n", "\n", Lang::java));
  EXPECT_TRUE(is_boundary("a = 1\n", "\n", Lang::python));
  EXPECT_FALSE(is_boundary("a = 1", "1", Lang::python));
}

TEST(Decode, CopyScorerReproducesTheOracleSlice) {
  CharTokenizer tok;
  for (const auto& f : testkit::decode_fixtures(11, 60)) {
    MockCopyScorer m(tok, testkit::gold_ids(tok, f.gold), 0.0, NoiseKind::out_of_input, 1);
    auto r = constrained_beam_search(f.query, m, tok);
    EXPECT_EQ(r.slice.line_numbers, f.gold.line_numbers) << f.id;
    EXPECT_EQ(r.text, f.gold.numbered_text()) << f.id;
    EXPECT_TRUE(r.terminated);
    EXPECT_FALSE(r.degraded);
  }
}

TEST(Decode, GreedyAndBeamAgreeUnderTinyNoise) {
  CharTokenizer tok;
  for (const auto& f : testkit::decode_fixtures(12, 30)) {
    for (int k : {1, 3}) {
      DecodeConfig c;
      c.beam_size = k;
      MockCopyScorer m(tok, testkit::gold_ids(tok, f.gold), k == 1 ? 0.0 : 1e-6, NoiseKind::reorder, 2);
      EXPECT_EQ(constrained_beam_search(f.query, m, tok, c).text, f.gold.numbered_text()) << f.id;
    }
  }
}

TEST(Decode, OutOfInputMassNeverSurfaces) {
  CharTokenizer tok;
  for (const auto& f : testkit::decode_fixtures(13, 50)) {
    MockCopyScorer m(tok, testkit::gold_ids(tok, f.gold), 0.2, NoiseKind::out_of_input, 3);
    auto r = constrained_beam_search(f.query, m, tok);
    EXPECT_EQ(outside_tokens(r, f.query, tok), 0) << f.id;
  }
}

TEST(Decode, HallucinationRateWithAndWithoutTheMask) {
  CharTokenizer tok;
  int unconstrained_bad = 0;
  int constrained_bad = 0;
  auto fx = testkit::decode_fixtures(14, 200);
  for (std::size_t i = 0; i < fx.size(); ++i) {
    const auto& f = fx[i];
    auto target = testkit::gold_ids(tok, f.gold);
    DecodeConfig greedy = unconstrained();
    greedy.beam_size = 1;
    MockCopyScorer m1(tok, target, 0.3, NoiseKind::out_of_input, i);
    unconstrained_bad += outside_tokens(constrained_beam_search(f.query, m1, tok, greedy), f.query, tok) > 0;
    MockCopyScorer m2(tok, target, 0.3, NoiseKind::out_of_input, i);
    constrained_bad += outside_tokens(constrained_beam_search(f.query, m2, tok), f.query, tok) > 0;
  }
  RecordProperty("unconstrained_hallucinating_fixtures", unconstrained_bad);
  EXPECT_GT(unconstrained_bad, 100);
  EXPECT_EQ(constrained_bad, 0);
}

TEST(Decode, LexicalMaskBlocksTheNonexistentVariable) {
  CharTokenizer tok;
  auto ex = fixtures::nonexistent_variable();
  auto q = ex.query();
  DecodeConfig lexical_off;
  lexical_off.lexical_mask = false;
  auto s1 = prefer_generated(tok, ex);
  EXPECT_EQ(constrained_beam_search(q, s1, tok, lexical_off).text, ex.generated);
  auto s2 = prefer_generated(tok, ex);
  auto r = constrained_beam_search(q, s2, tok);
  EXPECT_EQ(r.text, ex.expected);
  EXPECT_EQ(r.slice.line_numbers, ex.expected_lines);
}

TEST(Decode, TsedPruningDropsTheHallucinatedStatement) {
  CharTokenizer tok;
  auto ex = fixtures::hallucinated_statement();
  auto q = ex.query();
  DecodeConfig tsed_off;
  tsed_off.tsed_prune = false;
  auto s1 = prefer_generated(tok, ex);
  EXPECT_EQ(constrained_beam_search(q, s1, tok, tsed_off).text, ex.generated);
  auto s2 = prefer_generated(tok, ex);
  auto r = constrained_beam_search(q, s2, tok);
  EXPECT_EQ(r.text, ex.expected);
  EXPECT_GE(r.stats.pruned, 1);
  EXPECT_TRUE(std::is_sorted(r.boundary_tsed.begin(), r.boundary_tsed.end()));
}

TEST(Decode, RepetitionIsPrunedWhateverItsWeight) {
  CharTokenizer tok;
  auto ex = fixtures::hallucinated_statement();
  for (double w : {0.55, 0.8, 0.95, 0.999}) {
    ScriptedScorer s(tok, {{tok.encode(ex.generated), w}, {tok.encode(ex.expected), 1.0 - w}});
    auto r = constrained_beam_search(ex.query(), s, tok);
    EXPECT_EQ(r.text, ex.expected) << w;
    EXPECT_FALSE(r.degraded);
  }
}

TEST(Decode, NeitherConstraintTargetsExtraneousLines) {
  CharTokenizer tok;
  auto ex = fixtures::extraneous_statements();
  auto s = prefer_generated(tok, ex);
  EXPECT_EQ(constrained_beam_search(ex.query(), s, tok).text, ex.generated);
}

TEST(Decode, MatchesReferenceSearchWithConstraintsOff) {
  CharTokenizer tok;
  auto fx = testkit::decode_fixtures(15, 100);
  const NoiseKind kinds[] = {NoiseKind::out_of_input, NoiseKind::repetition, NoiseKind::reorder};
  for (std::size_t i = 0; i < fx.size(); ++i) {
    const auto& f = fx[i];
    auto target = testkit::gold_ids(tok, f.gold);
    NoiseKind kind = kinds[i % 3];
    double noise = 0.1 * static_cast<double>(i % 5);
    DecodeConfig c = unconstrained();
    c.max_len = static_cast<int>(target.size()) + 20;
    MockCopyScorer m1(tok, target, noise, kind, i);
    MockCopyScorer m2(tok, target, noise, kind, i);
    auto got = constrained_beam_search(f.query, m1, tok, c);
    auto want = testkit::reference_beam_search(f.query, m2, tok, c.beam_size, c.max_len);
    ASSERT_EQ(got.ids, want) << f.id << " noise " << noise << " " << to_string(kind);
  }
}

TEST(Decode, Deterministic) {
  CharTokenizer tok;
  for (const auto& f : testkit::decode_fixtures(16, 20)) {
    auto target = testkit::gold_ids(tok, f.gold);
    MockCopyScorer m1(tok, target, 0.4, NoiseKind::repetition, 5);
    MockCopyScorer m2(tok, target, 0.4, NoiseKind::repetition, 5);
    auto a = constrained_beam_search(f.query, m1, tok);
    auto b = constrained_beam_search(f.query, m2, tok);
    EXPECT_EQ(a.ids, b.ids);
    EXPECT_EQ(a.score, b.score);
  }
}

TEST(Decode, WellFormedFlagTracksLineOrder) {
  CharTokenizer tok;
  for (const auto& f : testkit::decode_fixtures(17, 40)) {
    MockCopyScorer m(tok, testkit::gold_ids(tok, f.gold), 0.3, NoiseKind::reorder, 9);
    auto r = constrained_beam_search(f.query, m, tok);
    bool increasing = !r.slice.empty();
    for (std::size_t k = 1; k < r.slice.line_numbers.size(); ++k) {
      increasing = increasing && r.slice.line_numbers[k - 1] < r.slice.line_numbers[k];
    }
    EXPECT_EQ(r.well_formed, increasing && r.slice.line_numbers.front() > 0);
    EXPECT_EQ(r.well_formed, read_prediction(r.text).has_value() && !r.slice.empty());
  }
  for (const auto& f : testkit::decode_fixtures(18, 20)) {
    MockCopyScorer m(tok, testkit::gold_ids(tok, f.gold), 0.0, NoiseKind::reorder, 9);
    EXPECT_TRUE(constrained_beam_search(f.query, m, tok).well_formed);
  }
}

namespace {

// The only scripted continuation repeats the last line after the whole
// program, so TSED falls from 1 at the final boundary.
ScriptedScorer hopeless(const Tokenizer& tok) {
  return ScriptedScorer(tok, {{tok.encode("1: a = 1;\n2: int b = a;\n3: b = 2;\n3: b = 2;"), 1.0}});
}

}  // namespace

TEST(Decode, AllBeamsPrunedFallsBackOrFails) {
  CharTokenizer tok;
  SliceQuery q{load_unit("a = 1;\nint b = a;\nb = 2;\n", Lang::java), "b", 3};
  auto s1 = hopeless(tok);
  DecodeConfig c;
  c.beam_size = 1;
  auto r = constrained_beam_search(q, s1, tok, c);
  ASSERT_TRUE(r.degraded);
  EXPECT_TRUE(r.slice.degraded);
  c.fallback_on_empty = false;
  auto s2 = hopeless(tok);
  try {
    constrained_beam_search(q, s2, tok, c);
    FAIL() << "expected no_valid_slice";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_valid_slice);
  }
}

TEST(Decode, RejectsBadConfiguration) {
  CharTokenizer tok;
  auto ex = fixtures::extraneous_statements();
  MockCopyScorer m(tok, {}, 0.0, NoiseKind::reorder, 1);
  DecodeConfig c;
  c.beam_size = 0;
  EXPECT_THROW(constrained_beam_search(ex.query(), m, tok, c), Error);
  c.beam_size = 3;
  c.max_len = 0;
  EXPECT_THROW(constrained_beam_search(ex.query(), m, tok, c), Error);
  EXPECT_THROW(MockCopyScorer(tok, {}, 1.0, NoiseKind::reorder, 1), Error);
}
