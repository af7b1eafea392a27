#pragma once

// Statement segmentation: a snippet becomes the ordered statement list
// C = {s1..sn}, with compound-statement headers ("if (c) {", "else:",
// "}") as statements of their own.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "slicekit/parse.hpp"
#include "slicekit/syntax_tree.hpp"

namespace slicekit {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

enum class StmtKind {
  simple,
  branch_header,
  loop_header,
  block_open,
  block_close,
  declaration,
  return_,
  other,
};

inline std::string_view to_string(StmtKind k) {
  switch (k) {
    case StmtKind::simple: return "simple";
    case StmtKind::branch_header: return "branch_header";
    case StmtKind::loop_header: return "loop_header";
    case StmtKind::block_open: return "block_open";
    case StmtKind::block_close: return "block_close";
    case StmtKind::declaration: return "declaration";
    case StmtKind::return_: return "return";
    case StmtKind::other: return "other";
  }
  return "other";
}

inline bool is_header(StmtKind k) {
  return k == StmtKind::branch_header || k == StmtKind::loop_header || k == StmtKind::block_open;
}

struct Statement {
  std::size_t index = 0;
  std::vector<int> line_numbers;
  std::string text;
  std::size_t begin = 0;  // character span in the unit text
  std::size_t end = 0;
  int nesting_depth = 0;
  StmtKind kind = StmtKind::simple;
  std::size_t node = npos;          // syntax node; for block_close the block
  std::size_t parent = npos;        // enclosing header statement
  std::size_t chained_from = npos;  // else/elif/catch/finally: header it continues
};

struct SourceLine {
  int number = 0;
  std::string text;
};

struct SourceUnit {
  Lang lang = Lang::java;
  std::string text;
  std::vector<Statement> statements;
  std::vector<SourceLine> lines;
  bool trailing_newline = false;

  // 1-based line number of a character offset.
  int line_of(std::size_t pos) const {
    auto it = std::upper_bound(line_starts.begin(), line_starts.end(), pos);
    return static_cast<int>(it - line_starts.begin());
  }

  // Statement whose span contains `pos`, or npos.
  std::size_t statement_at(std::size_t pos) const {
    auto it = std::upper_bound(statements.begin(), statements.end(), pos,
                               [](std::size_t p, const Statement& s) { return p < s.begin; });
    if (it == statements.begin()) return npos;
    --it;
    return pos < it->end ? it->index : npos;
  }

  const SourceLine& line(int n) const { return lines.at(static_cast<std::size_t>(n - 1)); }
  bool has_line(int n) const { return n >= 1 && static_cast<std::size_t>(n) <= lines.size(); }

  // Inverse of the line split.
  std::string join_lines() const {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (i) out += '\n';
      out += lines[i].text;
    }
    if (trailing_newline) out += '\n';
    return out;
  }

  std::vector<std::size_t> line_starts;
};

namespace detail {

inline void split_lines(SourceUnit& unit) {
  const std::string& t = unit.text;
  std::size_t start = 0;
  int n = 1;
  while (true) {
    std::size_t nl = t.find('\n', start);
    if (nl == std::string::npos) {
      if (start < t.size() || unit.lines.empty()) {
        unit.lines.push_back({n, t.substr(start)});
        unit.line_starts.push_back(start);
      }
      break;
    }
    unit.lines.push_back({n++, t.substr(start, nl - start)});
    unit.line_starts.push_back(start);
    start = nl + 1;
    if (start == t.size()) {
      unit.trailing_newline = true;
      break;
    }
  }
}

class StatementExtractor {
 public:
  StatementExtractor(const SyntaxTree& tree, SourceUnit& unit) : tree_(tree), unit_(unit) {}

  void run() {
    const auto& root = tree_.node(tree_.root());
    for (auto c : root.children) statement(c, 0, npos);
    finalize();
  }

 private:
  static bool is_block(const SyntaxNode& n) {
    return n.label == "block" || n.label == "class_body" || n.label == "switch_block";
  }

  static bool is_clause(const SyntaxNode& n) {
    return n.label == "else_clause" || n.label == "elif_clause" || n.label == "catch_clause" ||
           n.label == "finally_clause" || n.label == "except_clause" || n.label == "while_tail";
  }

  static bool is_compound(const SyntaxNode& n) {
    static constexpr std::string_view labels[] = {
        "if_statement",        "for_statement",          "enhanced_for_statement",
        "while_statement",     "do_statement",           "try_statement",
        "switch_statement",    "synchronized_statement", "labeled_statement",
        "method_declaration",  "constructor_declaration", "class_declaration",
        "function_definition", "class_definition",       "with_statement",
        "else_clause",         "elif_clause",            "catch_clause",
        "finally_clause",      "except_clause"};
    return std::find(std::begin(labels), std::end(labels), n.label) != std::end(labels);
  }

  static StmtKind header_kind(const SyntaxNode& n) {
    const std::string& l = n.label;
    if (l == "for_statement" || l == "enhanced_for_statement" || l == "while_statement" ||
        l == "do_statement" || l == "while_tail") {
      return StmtKind::loop_header;
    }
    if (l == "if_statement" || l == "else_clause" || l == "elif_clause" || l == "try_statement" ||
        l == "catch_clause" || l == "finally_clause" || l == "except_clause" ||
        l == "switch_statement") {
      return StmtKind::branch_header;
    }
    if (l == "labeled_statement") return StmtKind::other;
    return StmtKind::block_open;
  }

  static StmtKind simple_kind(const SyntaxNode& n) {
    const std::string& l = n.label;
    if (l == "local_variable_declaration" || l == "field_declaration") return StmtKind::declaration;
    if (l == "return_statement" || l == "throw_statement" || l == "break_statement" ||
        l == "continue_statement" || l == "raise_statement") {
      return StmtKind::return_;
    }
    if (l == "switch_label") return StmtKind::branch_header;
    if (l == "while_tail") return StmtKind::loop_header;
    if (l == "ERROR" || l == "import_declaration" || l == "import_statement" ||
        l == "import_from_statement" || l == "decorator" || l == "global_statement" ||
        l == "nonlocal_statement") {
      return StmtKind::other;
    }
    return StmtKind::simple;
  }

  std::size_t emit(std::size_t begin, std::size_t end, int depth, StmtKind kind, std::size_t node,
                   std::size_t parent, std::size_t chained = npos) {
    Statement s;
    s.begin = begin;
    s.end = end;
    s.nesting_depth = depth;
    s.kind = kind;
    s.node = node;
    s.parent = parent;
    s.chained_from = chained;
    out_.push_back(std::move(s));
    return out_.size() - 1;
  }

  void statement(std::size_t id, int depth, std::size_t parent, std::size_t chained = npos) {
    const SyntaxNode& n = tree_.node(id);
    if (is_block(n)) {
      // Bare block used as a statement.
      std::size_t open = emit(n.begin, std::min(n.begin + 1, n.end), depth, StmtKind::block_open,
                              id, parent, chained);
      block_body(id, depth + 1, open, depth);
      return;
    }
    if (!is_compound(n)) {
      emit(n.begin, n.end, depth, simple_kind(n), id, parent, chained);
      return;
    }
    // Java `else if (...) {`: the clause header already spans into the
    // nested if; its parts belong to this header.
    std::size_t header_owner = id;
    if (n.label == "else_clause" && !n.children.empty()) {
      const SyntaxNode& inner = tree_.node(n.children.front());
      if (inner.label == "if_statement") header_owner = n.children.front();
    }
    const SyntaxNode& h = tree_.node(header_owner);
    bool has_body = std::any_of(h.children.begin(), h.children.end(), [&](std::size_t c) {
      Field f = tree_.node(c).field;
      return f == Field::body || f == Field::consequence;
    });
    std::size_t header_end = has_body && n.header_end > n.begin ? n.header_end : header_fallback(n);
    std::size_t self = emit(n.begin, header_end, depth, header_kind(n), id, parent, chained);
    for (auto c : h.children) {
      const SyntaxNode& child = tree_.node(c);
      if (child.field == Field::body || child.field == Field::consequence) {
        if (is_block(child)) {
          block_body(c, depth + 1, self, depth);
        } else {
          statement(c, depth + 1, self);
        }
      } else if (is_clause(child)) {
        statement(c, depth, parent, self);
      }
    }
  }

  // Header end for compound nodes without a body: the whole node unless a
  // trailing clause follows.
  std::size_t header_fallback(const SyntaxNode& n) const {
    std::size_t end = n.end;
    for (auto c : n.children) {
      if (is_clause(tree_.node(c))) end = std::min(end, tree_.node(c).begin);
    }
    return std::max(end, n.begin);
  }

  void block_body(std::size_t id, int depth, std::size_t owner, int close_depth) {
    const SyntaxNode& b = tree_.node(id);
    for (auto c : b.children) statement(c, depth, owner);
    if (b.has_close) {
      emit(b.close_begin, b.close_begin + 1, close_depth, StmtKind::block_close, id, owner);
    }
  }

  void finalize() {
    std::vector<std::size_t> order(out_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return out_[a].begin < out_[b].begin; });
    // Error recovery can yield overlapping spans; clip to keep statements
    // disjoint and drop the ones that vanish.
    const std::string& text = unit_.text;
    std::vector<std::size_t> remap(out_.size(), npos);
    std::vector<Statement> kept;
    std::size_t prev_end = 0;
    for (auto i : order) {
      Statement s = out_[i];
      s.begin = std::max(s.begin, prev_end);
      while (s.begin < s.end && is_space(text[s.begin])) ++s.begin;
      while (s.end > s.begin && is_space(text[s.end - 1])) --s.end;
      if (s.begin >= s.end) continue;
      remap[i] = kept.size();
      prev_end = s.end;
      kept.push_back(std::move(s));
    }
    auto resolve = [&](std::size_t link) {
      // A dropped header hands its role to its own parent.
      while (link != npos && remap[link] == npos) link = out_[link].parent;
      return link == npos ? npos : remap[link];
    };
    for (std::size_t k = 0; k < kept.size(); ++k) {
      Statement& s = kept[k];
      s.index = k;
      s.parent = resolve(s.parent);
      s.chained_from = s.chained_from == npos ? npos : resolve(s.chained_from);
      s.text = text.substr(s.begin, s.end - s.begin);
      int first = unit_.line_of(s.begin);
      int last = unit_.line_of(s.end - 1);
      for (int l = first; l <= last; ++l) s.line_numbers.push_back(l);
    }
    unit_.statements = std::move(kept);
  }

  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

  const SyntaxTree& tree_;
  SourceUnit& unit_;

  std::vector<Statement> out_;
};

}  // namespace detail

inline SourceUnit extract_statements(const SyntaxTree& tree, std::string_view text, Lang lang) {
  SourceUnit unit;
  unit.lang = lang;
  unit.text = std::string(text);
  detail::split_lines(unit);
  if (!tree.empty()) detail::StatementExtractor(tree, unit).run();
  return unit;
}

// Parses and segments in one go.
inline SourceUnit load_unit(std::string_view text, Lang lang) {
  return extract_statements(parse(text, lang), text, lang);
}
}  // namespace slicekit
