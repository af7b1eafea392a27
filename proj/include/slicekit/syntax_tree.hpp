#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "slicekit/lexer.hpp"

namespace slicekit {

// Role of a child inside its parent, in the spirit of tree-sitter field
// names. The data-flow builder keys off these rather than child positions.
enum class Field : std::uint8_t {
  none,
  name,       // declared or invoked name
  type,
  value,      // initializer / right-hand side
  left,       // assignment target
  right,
  object,     // receiver of a call or field access
  field,      // member name after '.'
  arguments,
  condition,
  body,
  consequence,
  alternative,
  init,
  update,
  iterable,
  parameters,
  index,
};

struct SyntaxNode {
  std::string label;      // grammar symbol
  std::string text;       // token text for leaves, operator for expressions
  std::size_t begin = 0;  // character span [begin, end)
  std::size_t end = 0;
  // Compound statements: end of the header part ("if (c) {" / "if c:").
  std::size_t header_end = 0;
  // Blocks: position of the closing brace when present.
  std::size_t close_begin = 0;
  bool has_close = false;
  bool error = false;
  Field field = Field::none;
  std::vector<std::size_t> children;

  bool is_leaf() const { return children.empty(); }
};

// Rooted ordered labeled tree; node 0 is the root.
class SyntaxTree {
 public:
  SyntaxTree() = default;
  SyntaxTree(Lang lang, std::vector<SyntaxNode> nodes) : lang_(lang), nodes_(std::move(nodes)) {}

  Lang lang() const { return lang_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  std::size_t root() const { return 0; }
  const SyntaxNode& node(std::size_t id) const { return nodes_.at(id); }
  const std::vector<SyntaxNode>& nodes() const { return nodes_; }

  bool has_error() const {
    for (const auto& n : nodes_) {
      if (n.error || n.label == "ERROR") return true;
    }
    return false;
  }

  // S-expression rendering, handy in tests and debugging.
  std::string sexp(std::size_t id = 0) const {
    const auto& n = node(id);
    std::string out = "(" + n.label;
    if (n.error) out += "!";
    if (n.is_leaf() && !n.text.empty()) out += " \"" + n.text + "\"";
    for (auto c : n.children) out += " " + sexp(c);
    out += ")";
    return out;
  }

 private:
  Lang lang_ = Lang::java;
  std::vector<SyntaxNode> nodes_;
};

namespace detail {

// Shared machinery for the recursive-descent parsers.
class ParserBase {
 public:
  ParserBase(std::string_view text, std::vector<Token> tokens)
      : text_(text), tokens_(std::move(tokens)) {}

 protected:
  const Token& peek(std::size_t k = 0) const {
    std::size_t i = pos_ + k;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  bool at_eof() const { return peek().kind == TokenKind::eof; }
  bool at_op(std::string_view op) const { return peek().is_op(op); }
  bool at_kw(std::string_view kw) const { return peek().is_kw(kw); }

  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (t.kind != TokenKind::eof) {
      prev_end_ = t.end;
      ++pos_;
    }
    return t;
  }

  bool accept_op(std::string_view op) {
    if (!at_op(op)) return false;
    advance();
    return true;
  }
  bool accept_kw(std::string_view kw) {
    if (!at_kw(kw)) return false;
    advance();
    return true;
  }

  // Consumes `op` or flags `node` as missing it.
  bool expect_op(std::size_t node, std::string_view op) {
    if (accept_op(op)) return true;
    nodes_[node].error = true;
    return false;
  }

  std::size_t make(std::string label, std::size_t begin) {
    SyntaxNode n;
    n.label = std::move(label);
    n.begin = begin;
    n.end = begin;
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  std::size_t start(std::string label) { return make(std::move(label), peek().begin); }

  // Closes a node at the end of the last consumed token.
  std::size_t finish(std::size_t node) {
    nodes_[node].end = std::max(nodes_[node].begin, prev_end_);
    return node;
  }

  std::size_t leaf(std::string label) {
    const Token& t = advance();
    std::size_t id = make(std::move(label), t.begin);
    nodes_[id].text = t.text;
    nodes_[id].end = t.end;
    nodes_[id].error = t.error;
    return id;
  }

  void add(std::size_t parent, std::size_t child, Field field = Field::none) {
    if (field != Field::none) nodes_[child].field = field;
    nodes_[parent].children.push_back(child);
  }

  // Wraps the current token into an ERROR node so that parsing always
  // makes progress.
  std::size_t error_token() {
    std::size_t err = start("ERROR");
    nodes_[err].error = true;
    const Token& t = peek();
    std::string label = t.kind == TokenKind::identifier ? "identifier"
                        : t.kind == TokenKind::number   ? "number"
                        : t.kind == TokenKind::string   ? "string"
                                                        : "token";
    std::size_t l = leaf(std::move(label));
    add(err, l);
    return finish(err);
  }

  SyntaxTree take(Lang lang) {
    // Every child lies inside its parent; widen parents where recovery
    // produced children past a premature end.
    fix_spans(0);
    return SyntaxTree(lang, std::move(nodes_));
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::vector<SyntaxNode> nodes_;
  std::size_t pos_ = 0;
  std::size_t prev_end_ = 0;

 private:
  void fix_spans(std::size_t id) {
    for (auto c : nodes_[id].children) {
      fix_spans(c);
      nodes_[id].begin = std::min(nodes_[id].begin, nodes_[c].begin);
      nodes_[id].end = std::max(nodes_[id].end, nodes_[c].end);
    }
    if (nodes_[id].header_end != 0) {
      nodes_[id].header_end = std::clamp(nodes_[id].header_end, nodes_[id].begin, nodes_[id].end);
    }
  }
};

}  // namespace detail
}  // namespace slicekit
