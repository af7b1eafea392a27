#include <gtest/gtest.h>

#include "slicekit/slicekit.hpp"
#include "support/oracles.hpp"

using namespace slicekit;

namespace {

std::set<int> lines_of(const Slice& s) { return {s.line_numbers.begin(), s.line_numbers.end()}; }

SliceQuery query(const std::string& code, Lang lang, const std::string& var, int line) {
  return {load_unit(code, lang), var, line};
}

std::size_t statement_on(const SourceUnit& u, int line) {
  for (const auto& s : u.statements) {
    if (std::find(s.line_numbers.begin(), s.line_numbers.end(), line) != s.line_numbers.end()) return s.index;
  }
  return npos;
}

std::set<std::size_t> enclosing_loops(const SourceUnit& u, std::size_t stmt) {
  std::set<std::size_t> out;
  for (std::size_t s = stmt; s != npos; s = u.statements[s].parent) {
    if (u.statements[s].kind == StmtKind::loop_header) out.insert(s);
  }
  return out;
}

bool share_loop(const SourceUnit& u, std::size_t a, std::size_t b) {
  if (a == npos || b == npos) return false;
  auto la = enclosing_loops(u, a);
  for (auto l : enclosing_loops(u, b)) {
    if (la.count(l)) return true;
  }
  return false;
}

}  // namespace

TEST(Oracle, MotivatingExamples) {
  for (const auto& ex : fixtures::all()) {
    auto s = oracle_slice(ex.query());
    EXPECT_EQ(s.line_numbers, ex.expected_lines) << ex.name;
    EXPECT_EQ(s.numbered_text(), ex.expected) << ex.name;
  }
}

TEST(Oracle, ExtraneousStatementsExample) {
  auto s = oracle_slice(fixtures::extraneous_statements().query());
  EXPECT_EQ(s.line_numbers, (std::vector<int>{7, 8, 12}));
}

TEST(Oracle, SingleStatement) {
  EXPECT_EQ(oracle_slice(query("a = 1", Lang::python, "a", 1)).line_numbers, std::vector<int>{1});
  EXPECT_EQ(oracle_slice(query("int a = 1;", Lang::java, "a", 1)).line_numbers, std::vector<int>{1});
}

TEST(Oracle, MissingCriterionIsReported) {
  auto expect_missing = [](const SliceQuery& q) {
    try {
      oracle_slice(q);
      FAIL() << "expected criterion_not_found";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::criterion_not_found);
    }
  };
  expect_missing(query("a = 1\nb = 2\n", Lang::python, "a", 2));
  expect_missing(query("a = 1\nb = 2\n", Lang::python, "a", 9));
  expect_missing(query("a = 1\n", Lang::python, "zz", 1));
}

TEST(Oracle, EnclosingHeadersAreIncluded) {
  auto s = oracle_slice(query(
      "x = 0\n"
      "for i in r:\n"
      "    if i > 2:\n"
      "        x = x + i\n"
      "y = 5\n",
      Lang::python, "x", 4));
  EXPECT_EQ(lines_of(s), (std::set<int>{1, 2, 3, 4}));
}

TEST(Oracle, MatchesBruteForceClosure) {
  Rng rng(300);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    Lang lang = i % 2 ? Lang::python : Lang::java;
    auto p = testkit::straight_line(rng, lang, 1 + static_cast<int>(uniform_index(rng, 12)));
    std::vector<std::pair<std::size_t, std::string>> crits;
    for (std::size_t s = 0; s < p.stmts.size(); ++s) {
      for (const auto& v : p.stmts[s].defs) crits.push_back({s, v});
      for (const auto& v : p.stmts[s].uses) crits.push_back({s, v});
    }
    auto [stmt, var] = crits[uniform_index(rng, crits.size())];
    auto s = oracle_slice(query(p.text(), lang, var, static_cast<int>(stmt) + 1));
    ASSERT_EQ(lines_of(s), testkit::closure_slice(p, var, stmt)) << p.text() << var << "@" << stmt + 1;
    ++checked;
  }
  EXPECT_EQ(checked, 300);
}

TEST(Oracle, SliceProperties) {
  Rng rng(41);
  for (int i = 0; i < 100; ++i) {
    Lang lang = i % 2 ? Lang::python : Lang::java;
    std::string code = testkit::structured(rng, lang, 12);
    auto unit = load_unit(code, lang);
    auto dfg = build_dfg(unit);
    if (dfg.nodes.empty()) continue;
    const auto& v = dfg.nodes[uniform_index(rng, dfg.nodes.size())];
    int line = unit.line_of(v.begin);
    auto s = oracle_slice({unit, v.name, line});
    ASSERT_FALSE(s.empty());
    EXPECT_TRUE(std::is_sorted(s.line_numbers.begin(), s.line_numbers.end()));
    // Lines after the criterion only arrive around a loop back edge.
    for (int n : s.line_numbers) {
      if (n <= line) continue;
      EXPECT_TRUE(share_loop(unit, statement_on(unit, n), statement_on(unit, line))) << code << v.name << "@" << line;
    }
    for (std::size_t k = 0; k < s.lines.size(); ++k) {
      EXPECT_EQ(s.lines[k], unit.line(s.line_numbers[k]).text);  // element preservation
    }
    EXPECT_EQ(lines_of(oracle_slice({unit, v.name, line})), lines_of(s));
  }
}

TEST(Oracle, StraightLineSlicesEndAtTheCriterion) {
  Rng rng(42);
  for (int i = 0; i < 100; ++i) {
    Lang lang = i % 2 ? Lang::python : Lang::java;
    auto p = testkit::straight_line(rng, lang, 10);
    auto unit = load_unit(p.text(), lang);
    auto dfg = build_dfg(unit);
    if (dfg.nodes.empty()) continue;
    const auto& v = dfg.nodes[uniform_index(rng, dfg.nodes.size())];
    auto s = oracle_slice({unit, v.name, unit.line_of(v.begin)});
    EXPECT_EQ(s.line_numbers.back(), unit.line_of(v.begin));
  }
}
