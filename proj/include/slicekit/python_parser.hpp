#pragma once

// Error-tolerant recursive-descent parser for Python 3. Node labels follow
// tree-sitter-python where a counterpart exists.

#include <string>
#include <string_view>
#include <vector>

#include "slicekit/syntax_tree.hpp"

namespace slicekit::detail {

class PythonParser : ParserBase {
 public:
  explicit PythonParser(std::string_view text) : ParserBase(text, lex_python(text)) {}

  SyntaxTree parse() {
    std::size_t root = make("module", 0);
    while (!at_eof()) {
      if (peek().kind == TokenKind::newline || peek().kind == TokenKind::dedent) {
        advance();
        continue;
      }
      statement(root);
    }
    nodes_[root].begin = 0;
    nodes_[root].end = text_.size();
    return take(Lang::python);
  }

 private:
  bool at_kind(TokenKind k) const { return peek().kind == k; }
  bool at_line_end() const {
    return at_kind(TokenKind::newline) || at_kind(TokenKind::eof) || at_kind(TokenKind::dedent) ||
           at_kind(TokenKind::indent);
  }

  std::size_t missing() {
    std::size_t id = make("ERROR", prev_end_);
    nodes_[id].error = true;
    return id;
  }

  // ---- statements --------------------------------------------------------

  // Parses one logical line (or one compound statement) into `parent`.
  void statement(std::size_t parent) {
    const Token& t = peek();
    if (t.kind == TokenKind::indent) {
      // Unexpected indent: keep the statements, flag the block.
      std::size_t blk = make("block", t.begin);
      nodes_[blk].error = true;
      advance();
      while (!at_eof() && !at_kind(TokenKind::dedent)) {
        if (at_kind(TokenKind::newline)) {
          advance();
          continue;
        }
        statement(blk);
      }
      if (at_kind(TokenKind::dedent)) advance();
      add(parent, finish(blk));
      return;
    }
    if (t.kind == TokenKind::keyword) {
      if (t.text == "if") return add(parent, if_statement());
      if (t.text == "for") return add(parent, for_statement());
      if (t.text == "while") return add(parent, while_statement());
      if (t.text == "def") return add(parent, function_definition());
      if (t.text == "class") return add(parent, class_definition());
      if (t.text == "try") return add(parent, try_statement());
      if (t.text == "with") return add(parent, with_statement());
      if (t.text == "elif" || t.text == "else" || t.text == "except" || t.text == "finally") {
        return add(parent, stray_clause());
      }
      if (t.text == "async" && (peek(1).is_kw("def") || peek(1).is_kw("for") ||
                                peek(1).is_kw("with"))) {
        advance();
        return statement(parent);
      }
    }
    if (t.is_op("@")) {
      std::size_t id = start("decorator");
      advance();
      add(id, expression());
      finish(id);
      end_of_line(id);
      return add(parent, id);
    }
    simple_statements(parent);
  }

  void end_of_line(std::size_t id) {
    if (at_kind(TokenKind::newline)) {
      advance();
    } else if (!at_eof() && !at_kind(TokenKind::dedent)) {
      nodes_[id].error = true;
      // Swallow the remainder of the line into an ERROR node.
      std::size_t err = start("ERROR");
      nodes_[err].error = true;
      while (!at_line_end()) {
        std::string label = peek().kind == TokenKind::identifier ? "identifier" : "token";
        add(err, leaf(std::move(label)));
      }
      if (!nodes_[err].children.empty()) nodes_[id].children.push_back(finish(err));
      else nodes_.pop_back();
      if (at_kind(TokenKind::newline)) advance();
    }
  }

  void simple_statements(std::size_t parent) {
    std::size_t last = 0;
    bool any = false;
    while (true) {
      std::size_t mark = nodes_.size();
      std::size_t before = pos_;
      std::size_t s = simple_statement();
      if (pos_ == before) {
        nodes_.resize(mark);
        s = error_token();
      }
      add(parent, s);
      last = s;
      any = true;
      if (!accept_op(";") || at_line_end()) break;
    }
    if (any) {
      std::size_t children_before = nodes_[last].children.size();
      end_of_line(last);
      (void)children_before;
    }
  }

  std::size_t simple_statement() {
    const Token& t = peek();
    if (t.kind == TokenKind::keyword) {
      if (t.text == "pass" || t.text == "break" || t.text == "continue") {
        std::size_t id = start(t.text + "_statement");
        advance();
        return finish(id);
      }
      if (t.text == "return") {
        std::size_t id = start("return_statement");
        advance();
        if (!at_line_end() && !at_op(";")) add(id, expression_list(), Field::value);
        return finish(id);
      }
      if (t.text == "raise") {
        std::size_t id = start("raise_statement");
        advance();
        if (!at_line_end() && !at_op(";")) add(id, expression(), Field::value);
        if (accept_kw("from")) add(id, expression(), Field::value);
        return finish(id);
      }
      if (t.text == "global" || t.text == "nonlocal") {
        std::size_t id = start(t.text + "_statement");
        advance();
        while (at_kind(TokenKind::identifier)) {
          std::size_t name = leaf("identifier");
          nodes_[name].field = Field::field;  // not a variable occurrence
          add(id, name);
          if (!accept_op(",")) break;
        }
        return finish(id);
      }
      if (t.text == "del") {
        std::size_t id = start("delete_statement");
        advance();
        add(id, expression_list(), Field::value);
        return finish(id);
      }
      if (t.text == "assert") {
        std::size_t id = start("assert_statement");
        advance();
        add(id, expression(), Field::value);
        if (accept_op(",")) add(id, expression(), Field::value);
        return finish(id);
      }
      if (t.text == "import" || t.text == "from") return import_statement();
    }
    std::size_t lhs = expression_list();
    if (at_op("=")) {
      std::size_t id = make("assignment", nodes_[lhs].begin);
      advance();
      add(id, lhs, Field::left);
      add(id, assignment_rhs(), Field::right);
      return finish(id);
    }
    if (at_op(":") ) {
      // Annotated assignment.
      std::size_t id = make("assignment", nodes_[lhs].begin);
      advance();
      add(id, lhs, Field::left);
      std::size_t ty = expression();
      add(id, ty, Field::type);
      if (accept_op("=")) add(id, assignment_rhs(), Field::right);
      return finish(id);
    }
    static constexpr std::string_view aug[] = {"+=", "-=", "*=",  "/=",  "//=", "%=", "**=",
                                               "&=", "|=", "^=", "<<=", ">>=", "@="};
    for (auto op : aug) {
      if (at_op(op)) {
        std::size_t id = make("augmented_assignment", nodes_[lhs].begin);
        nodes_[id].text = advance().text;
        add(id, lhs, Field::left);
        add(id, expression_list(), Field::right);
        return finish(id);
      }
    }
    std::size_t id = make("expression_statement", nodes_[lhs].begin);
    add(id, lhs);
    return finish(id);
  }

  // Right-hand side of '=', allowing chains `a = b = c`.
  std::size_t assignment_rhs() {
    std::size_t rhs = expression_list();
    if (at_op("=")) {
      std::size_t id = make("assignment", nodes_[rhs].begin);
      advance();
      add(id, rhs, Field::left);
      add(id, assignment_rhs(), Field::right);
      return finish(id);
    }
    return rhs;
  }

  std::size_t import_statement() {
    bool from = at_kw("from");
    std::size_t id = start(from ? "import_from_statement" : "import_statement");
    advance();
    if (from) {
      std::size_t mod = start("dotted_name");
      while (at_op(".") || at_op("...")) nodes_[mod].text += advance().text;
      while (at_kind(TokenKind::identifier)) {
        nodes_[mod].text += advance().text;
        if (!at_op(".")) break;
        nodes_[mod].text += advance().text;
      }
      add(id, finish(mod));
      if (!accept_kw("import")) nodes_[id].error = true;
    }
    bool paren = accept_op("(");
    while (at_kind(TokenKind::identifier) || at_op("*")) {
      if (accept_op("*")) break;
      std::size_t first = leaf("identifier");
      std::size_t bound = first;
      std::string dotted = nodes_[first].text;
      while (at_op(".") && peek(1).kind == TokenKind::identifier) {
        advance();
        std::size_t part = leaf("identifier");
        dotted += "." + nodes_[part].text;
        nodes_.pop_back();
      }
      nodes_[first].text = dotted;
      if (accept_kw("as") && at_kind(TokenKind::identifier)) {
        std::size_t alias = start("aliased_import");
        nodes_[first].field = Field::field;
        add(alias, first);
        bound = leaf("identifier");
        add(alias, bound, Field::name);
        add(id, finish(alias));
      } else {
        // `import a.b` binds `a`.
        add(id, first, Field::name);
      }
      if (!accept_op(",")) break;
    }
    if (paren) expect_op(id, ")");
    return finish(id);
  }

  // Parses ':' and the suite that follows into `owner`.
  void suite(std::size_t owner) {
    if (!accept_op(":")) nodes_[owner].error = true;
    nodes_[owner].header_end = prev_end_;
    std::size_t blk = make("block", peek().begin);
    if (at_kind(TokenKind::newline)) {
      advance();
      if (at_kind(TokenKind::indent)) {
        advance();
        nodes_[blk].begin = peek().begin;
        while (!at_eof() && !at_kind(TokenKind::dedent)) {
          if (at_kind(TokenKind::newline)) {
            advance();
            continue;
          }
          statement(blk);
        }
        if (at_kind(TokenKind::dedent)) advance();
      } else {
        nodes_[blk].error = true;
        nodes_[owner].error = true;
      }
    } else if (at_eof() || at_kind(TokenKind::dedent)) {
      nodes_[blk].error = true;
      nodes_[owner].error = true;
    } else {
      simple_statements(blk);
    }
    if (nodes_[blk].children.empty()) {
      nodes_.pop_back();
      nodes_[owner].error = true;
      return;
    }
    finish(blk);
    nodes_[blk].end = std::max(nodes_[blk].end, nodes_[blk].begin);
    add(owner, blk, Field::body);
  }

  std::size_t if_statement() {
    std::size_t id = start("if_statement");
    advance();
    add(id, named_expression(), Field::condition);
    suite(id);
    while (at_kw("elif")) {
      std::size_t el = start("elif_clause");
      advance();
      add(el, named_expression(), Field::condition);
      suite(el);
      add(id, finish(el), Field::alternative);
    }
    if (at_kw("else")) add(id, else_clause(), Field::alternative);
    return finish(id);
  }

  std::size_t else_clause() {
    std::size_t el = start("else_clause");
    advance();
    suite(el);
    return finish(el);
  }

  std::size_t stray_clause() {
    const std::string kw = peek().text;
    std::size_t id = start(kw == "elif" ? "elif_clause"
                           : kw == "else" ? "else_clause"
                           : kw == "except" ? "except_clause"
                                            : "finally_clause");
    nodes_[id].error = true;
    advance();
    if (kw == "elif" || (kw == "except" && !at_op(":"))) add(id, expression(), Field::condition);
    suite(id);
    return finish(id);
  }

  std::size_t for_statement() {
    std::size_t id = start("for_statement");
    advance();
    ++no_in_;
    add(id, expression_list(), Field::left);
    --no_in_;
    if (!accept_kw("in")) nodes_[id].error = true;
    add(id, expression_list(), Field::iterable);
    suite(id);
    if (at_kw("else")) add(id, else_clause(), Field::alternative);
    return finish(id);
  }

  std::size_t while_statement() {
    std::size_t id = start("while_statement");
    advance();
    add(id, named_expression(), Field::condition);
    suite(id);
    if (at_kw("else")) add(id, else_clause(), Field::alternative);
    return finish(id);
  }

  std::size_t function_definition() {
    std::size_t id = start("function_definition");
    advance();
    if (at_kind(TokenKind::identifier)) {
      std::size_t name = leaf("identifier");
      add(id, name, Field::name);
    } else {
      nodes_[id].error = true;
    }
    add(id, parameters(), Field::parameters);
    if (accept_op("->")) add(id, expression(), Field::type);
    suite(id);
    return finish(id);
  }

  std::size_t parameters() {
    std::size_t id = start("parameters");
    if (!accept_op("(")) {
      nodes_[id].error = true;
      return finish(id);
    }
    while (!at_eof() && !at_op(")") && !at_op(":") && !at_line_end()) {
      if (accept_op("*") || accept_op("**") || accept_op("/")) {
        if (!at_kind(TokenKind::identifier)) {
          accept_op(",");
          continue;
        }
      }
      if (!at_kind(TokenKind::identifier)) {
        add(id, error_token());
        continue;
      }
      std::size_t p = start("parameter");
      add(p, leaf("identifier"), Field::name);
      if (accept_op(":")) add(p, expression(), Field::type);
      if (accept_op("=")) add(p, expression(), Field::value);
      add(id, finish(p));
      if (!accept_op(",")) break;
    }
    expect_op(id, ")");
    return finish(id);
  }

  std::size_t class_definition() {
    std::size_t id = start("class_definition");
    advance();
    if (at_kind(TokenKind::identifier)) {
      std::size_t name = leaf("identifier");
      add(id, name, Field::name);
    } else {
      nodes_[id].error = true;
    }
    if (at_op("(")) add(id, argument_list(), Field::arguments);
    suite(id);
    return finish(id);
  }

  std::size_t try_statement() {
    std::size_t id = start("try_statement");
    advance();
    suite(id);
    while (at_kw("except") || at_kw("else") || at_kw("finally")) {
      if (at_kw("except")) {
        std::size_t c = start("except_clause");
        advance();
        accept_op("*");
        if (!at_op(":")) {
          add(c, expression(), Field::type);
          if (accept_kw("as") || accept_op(",")) {
            if (at_kind(TokenKind::identifier)) add(c, leaf("identifier"), Field::name);
          }
        }
        suite(c);
        add(id, finish(c), Field::alternative);
      } else if (at_kw("else")) {
        add(id, else_clause(), Field::alternative);
      } else {
        std::size_t f = start("finally_clause");
        advance();
        suite(f);
        add(id, finish(f), Field::alternative);
      }
    }
    return finish(id);
  }

  std::size_t with_statement() {
    std::size_t id = start("with_statement");
    advance();
    bool paren = at_op("(") && !looks_like_call_paren();
    if (paren) advance();
    while (!at_eof() && !at_op(":") && !at_line_end()) {
      std::size_t item = start("with_item");
      add(item, expression(), Field::value);
      if (accept_kw("as")) {
        ++no_in_;
        add(item, primary_chain(), Field::left);
        --no_in_;
      }
      add(id, finish(item));
      if (!accept_op(",")) break;
    }
    if (paren) expect_op(id, ")");
    suite(id);
    return finish(id);
  }

  bool looks_like_call_paren() const {
    // `with (open(x)) as f:` vs `with (a as b, c as d):` - only the latter
    // contains `as` at depth 1.
    int depth = 0;
    for (std::size_t k = 0;; ++k) {
      const Token& t = peek(k);
      if (t.kind == TokenKind::eof || t.kind == TokenKind::newline) return true;
      if (t.is_op("(") || t.is_op("[") || t.is_op("{")) ++depth;
      if (t.is_op(")") || t.is_op("]") || t.is_op("}")) {
        if (--depth == 0) return true;
      }
      if (depth == 1 && t.is_kw("as")) return false;
    }
  }

  // ---- expressions -------------------------------------------------------

  // Comma-separated list; a single element is returned unwrapped.
  std::size_t expression_list() {
    std::size_t first = star_or_expression();
    if (!at_op(",")) return first;
    std::size_t id = make("expression_list", nodes_[first].begin);
    add(id, first);
    while (accept_op(",")) {
      if (at_line_end() || at_op("=") || at_op(")") || at_op(":") || at_op(";") ||
          at_kw("in") || is_aug_op()) {
        break;
      }
      add(id, star_or_expression());
    }
    return finish(id);
  }

  bool is_aug_op() const {
    const Token& t = peek();
    return t.kind == TokenKind::op && t.text.size() >= 2 && t.text.back() == '=' &&
           t.text != "==" && t.text != "<=" && t.text != ">=" && t.text != "!=";
  }

  std::size_t star_or_expression() {
    if (at_op("*") || at_op("**")) {
      std::size_t id = start("list_splat");
      advance();
      add(id, expression_no_cond_in_targets());
      return finish(id);
    }
    return expression_no_cond_in_targets();
  }

  std::size_t expression_no_cond_in_targets() { return no_in_ ? bitwise_or() : expression(); }

  std::size_t named_expression() {
    if (at_kind(TokenKind::identifier) && peek(1).is_op(":=")) {
      std::size_t id = start("named_expression");
      add(id, leaf("identifier"), Field::left);
      advance();
      add(id, expression(), Field::right);
      return finish(id);
    }
    return expression();
  }

  std::size_t expression() {
    if (at_kw("lambda")) return lambda();
    if (at_kind(TokenKind::identifier) && peek(1).is_op(":=")) return named_expression();
    std::size_t body = disjunction();
    if (at_kw("if") && !in_comprehension_if_) {
      std::size_t id = make("conditional_expression", nodes_[body].begin);
      advance();
      add(id, body, Field::consequence);
      add(id, disjunction(), Field::condition);
      if (accept_kw("else")) {
        add(id, expression(), Field::alternative);
      } else {
        nodes_[id].error = true;
      }
      return finish(id);
    }
    return body;
  }

  std::size_t lambda() {
    std::size_t id = start("lambda");
    advance();
    std::size_t params = start("lambda_parameters");
    while (!at_eof() && !at_op(":") && !at_line_end()) {
      if (at_kind(TokenKind::identifier)) {
        add(params, leaf("identifier"), Field::name);
        if (accept_op("=")) add(params, expression(), Field::value);
      } else {
        advance();
      }
      accept_op(",");
    }
    add(id, finish(params), Field::parameters);
    expect_op(id, ":");
    add(id, expression(), Field::body);
    return finish(id);
  }

  std::size_t disjunction() {
    std::size_t left = conjunction();
    while (at_kw("or")) {
      std::size_t id = make("boolean_operator", nodes_[left].begin);
      nodes_[id].text = advance().text;
      add(id, left, Field::left);
      add(id, conjunction(), Field::right);
      left = finish(id);
    }
    return left;
  }

  std::size_t conjunction() {
    std::size_t left = inversion();
    while (at_kw("and")) {
      std::size_t id = make("boolean_operator", nodes_[left].begin);
      nodes_[id].text = advance().text;
      add(id, left, Field::left);
      add(id, inversion(), Field::right);
      left = finish(id);
    }
    return left;
  }

  std::size_t inversion() {
    if (at_kw("not")) {
      std::size_t id = start("not_operator");
      advance();
      add(id, inversion(), Field::value);
      return finish(id);
    }
    return comparison();
  }

  // Returns the comparison operator at the cursor and its token count.
  std::pair<std::string, std::size_t> comparison_op() const {
    const Token& t = peek();
    if (t.kind == TokenKind::op &&
        (t.text == "<" || t.text == ">" || t.text == "==" || t.text == ">=" ||
         t.text == "<=" || t.text == "!=")) {
      return {t.text, 1};
    }
    if (t.is_kw("in") && !no_in_) return {"in", 1};
    if (t.is_kw("not") && peek(1).is_kw("in")) return {"not in", 2};
    if (t.is_kw("is")) return peek(1).is_kw("not") ? std::pair<std::string, std::size_t>{"is not", 2}
                                                   : std::pair<std::string, std::size_t>{"is", 1};
    return {"", 0};
  }

  std::size_t comparison() {
    std::size_t left = bitwise_or();
    auto [op, count] = comparison_op();
    if (count == 0) return left;
    std::size_t id = make("comparison_operator", nodes_[left].begin);
    add(id, left);
    while (count > 0) {
      if (!nodes_[id].text.empty()) nodes_[id].text += " ";
      nodes_[id].text += op;
      for (std::size_t i = 0; i < count; ++i) advance();
      add(id, bitwise_or());
      std::tie(op, count) = comparison_op();
    }
    return finish(id);
  }

  static int precedence(const std::string& op) {
    if (op == "|") return 1;
    if (op == "^") return 2;
    if (op == "&") return 3;
    if (op == "<<" || op == ">>") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "/" || op == "//" || op == "%" || op == "@") return 6;
    return 0;
  }

  std::size_t bitwise_or() { return binary(1); }

  std::size_t binary(int min_prec) {
    std::size_t left = unary();
    while (peek().kind == TokenKind::op) {
      int prec = precedence(peek().text);
      if (prec == 0 || prec < min_prec) break;
      std::size_t id = make("binary_operator", nodes_[left].begin);
      nodes_[id].text = advance().text;
      add(id, left, Field::left);
      add(id, binary(prec + 1), Field::right);
      left = finish(id);
    }
    return left;
  }

  std::size_t unary() {
    if (at_op("-") || at_op("+") || at_op("~")) {
      std::size_t id = start("unary_operator");
      nodes_[id].text = advance().text;
      add(id, unary(), Field::value);
      return finish(id);
    }
    return power();
  }

  std::size_t power() {
    std::size_t base = primary_chain();
    if (at_op("**")) {
      std::size_t id = make("binary_operator", nodes_[base].begin);
      nodes_[id].text = advance().text;
      add(id, base, Field::left);
      add(id, unary(), Field::right);
      return finish(id);
    }
    return base;
  }

  std::size_t primary_chain() {
    if (at_kw("await")) {
      std::size_t id = start("await");
      advance();
      add(id, primary_chain(), Field::value);
      return finish(id);
    }
    std::size_t expr = atom();
    while (true) {
      if (at_op(".")) {
        advance();
        std::size_t id = make("attribute", nodes_[expr].begin);
        add(id, expr, Field::object);
        if (at_kind(TokenKind::identifier) || at_kind(TokenKind::keyword)) {
          add(id, leaf("identifier"), Field::field);
        } else {
          nodes_[id].error = true;
        }
        expr = finish(id);
      } else if (at_op("(")) {
        std::size_t id = make("call", nodes_[expr].begin);
        add(id, expr, Field::name);
        add(id, argument_list(), Field::arguments);
        expr = finish(id);
      } else if (at_op("[")) {
        std::size_t id = make("subscript", nodes_[expr].begin);
        advance();
        add(id, expr, Field::object);
        while (!at_eof() && !at_op("]")) {
          std::size_t before = pos_;
          add(id, subscript_item(), Field::index);
          if (pos_ == before) break;
          if (!accept_op(",")) break;
        }
        expect_op(id, "]");
        expr = finish(id);
      } else {
        break;
      }
    }
    return expr;
  }

  std::size_t subscript_item() {
    std::size_t begin = peek().begin;
    std::size_t lower = 0;
    bool has_lower = false;
    if (!at_op(":")) {
      lower = expression();
      has_lower = true;
    }
    if (!at_op(":")) return lower;
    std::size_t id = make("slice", begin);
    if (has_lower) add(id, lower);
    while (accept_op(":")) {
      if (!at_op(":") && !at_op("]") && !at_op(",")) add(id, expression());
    }
    return finish(id);
  }

  std::size_t argument_list() {
    std::size_t id = start("argument_list");
    advance();  // '('
    while (!at_eof() && !at_op(")")) {
      std::size_t mark = nodes_.size();
      std::size_t before = pos_;
      if (at_kind(TokenKind::identifier) && peek(1).is_op("=")) {
        std::size_t kw = start("keyword_argument");
        std::size_t name = leaf("identifier");
        add(kw, name, Field::field);
        advance();
        add(kw, expression(), Field::value);
        add(id, finish(kw));
      } else if (at_op("*") || at_op("**")) {
        std::size_t sp = start(peek().text == "*" ? "list_splat" : "dictionary_splat");
        advance();
        add(sp, expression());
        add(id, finish(sp));
      } else {
        std::size_t e = named_expression();
        if (pos_ == before) {
          nodes_.resize(mark);
          break;
        }
        if (at_kw("for")) e = comprehension("generator_expression", e, nodes_[e].begin);
        add(id, e);
      }
      if (!accept_op(",")) break;
    }
    expect_op(id, ")");
    return finish(id);
  }

  // Wraps `element` followed by for/if clauses.
  std::size_t comprehension(std::string label, std::size_t element, std::size_t begin) {
    std::size_t id = make(std::move(label), begin);
    add(id, element, Field::body);
    while (at_kw("for") || at_kw("async")) {
      accept_kw("async");
      std::size_t clause = start("for_in_clause");
      advance();
      ++no_in_;
      add(clause, expression_list(), Field::left);
      --no_in_;
      if (!accept_kw("in")) nodes_[clause].error = true;
      ++in_comprehension_if_;
      add(clause, disjunction(), Field::iterable);
      while (at_kw("if")) {
        std::size_t cond = start("if_clause");
        advance();
        add(cond, disjunction(), Field::condition);
        add(clause, finish(cond));
      }
      --in_comprehension_if_;
      add(id, finish(clause));
    }
    return id;
  }

  std::size_t atom() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::identifier: return leaf("identifier");
      case TokenKind::number: {
        bool is_float = t.text.find_first_of(".eEjJ") != std::string::npos &&
                        t.text.rfind("0x", 0) != 0 && t.text.rfind("0X", 0) != 0;
        return leaf(is_float ? "float" : "integer");
      }
      case TokenKind::string: {
        std::size_t s = leaf("string");
        if (!at_kind(TokenKind::string)) return s;
        std::size_t id = make("concatenated_string", nodes_[s].begin);
        add(id, s);
        while (at_kind(TokenKind::string)) add(id, leaf("string"));
        return finish(id);
      }
      case TokenKind::keyword:
        if (t.text == "True") return leaf("true");
        if (t.text == "False") return leaf("false");
        if (t.text == "None") return leaf("none");
        if (t.text == "lambda") return lambda();
        break;
      case TokenKind::op:
        if (t.text == "(") return enclosure("(", ")", "parenthesized_expression", "tuple");
        if (t.text == "[") return enclosure("[", "]", "list", "list");
        if (t.text == "{") return enclosure("{", "}", "set", "set");
        if (t.text == "...") return leaf("ellipsis");
        break;
      default: break;
    }
    if (t.kind == TokenKind::eof || t.kind == TokenKind::newline || t.kind == TokenKind::indent ||
        t.kind == TokenKind::dedent || t.is_op(")") || t.is_op("]") || t.is_op("}") ||
        t.is_op(",") || t.is_op(":") || t.is_op("=") || t.is_op(";") ||
        t.kind == TokenKind::keyword) {
      return missing();
    }
    return error_token();
  }

  std::size_t enclosure(std::string_view open, std::string_view close, std::string single,
                        std::string multi) {
    std::size_t begin = peek().begin;
    advance();
    int saved_no_in = no_in_;
    int saved_if = in_comprehension_if_;
    no_in_ = 0;
    in_comprehension_if_ = 0;
    std::vector<std::size_t> items;
    bool trailing_comma = false;
    bool dict = false;
    std::size_t result = 0;
    bool done = false;
    while (!at_eof() && !at_op(close)) {
      std::size_t mark = nodes_.size();
      std::size_t before = pos_;
      std::size_t item;
      if (at_op("*") || at_op("**")) {
        item = start(peek().text == "*" ? "list_splat" : "dictionary_splat");
        advance();
        add(item, bitwise_or());
        finish(item);
      } else {
        item = named_expression();
      }
      if (pos_ == before) {
        nodes_.resize(mark);
        break;
      }
      if (open == "{" && accept_op(":")) {
        dict = true;
        std::size_t pair = make("pair", nodes_[item].begin);
        add(pair, item, Field::left);
        add(pair, expression(), Field::value);
        item = finish(pair);
      }
      if (at_kw("for") && items.empty()) {
        std::string label = open == "(" ? "generator_expression"
                            : open == "[" ? "list_comprehension"
                            : dict        ? "dictionary_comprehension"
                                          : "set_comprehension";
        result = comprehension(std::move(label), item, begin);
        done = true;
        break;
      }
      items.push_back(item);
      trailing_comma = accept_op(",");
      if (!trailing_comma) break;
    }
    no_in_ = saved_no_in;
    in_comprehension_if_ = saved_if;
    if (!done) {
      std::string label = dict ? "dictionary"
                          : (items.size() == 1 && !trailing_comma) ? single
                          : (open == "(" ? multi : single);
      if (open == "(" && items.empty()) label = "tuple";
      if (open == "{" && items.empty()) label = "dictionary";
      result = make(std::move(label), begin);
      for (auto i : items) add(result, i);
    }
    if (!accept_op(close)) nodes_[result].error = true;
    return finish(result);
  }

  int no_in_ = 0;
  int in_comprehension_if_ = 0;
};

}  // namespace slicekit::detail
