#pragma once

// Error-tolerant recursive-descent parser for Java method bodies, methods
// and classes. Node labels follow tree-sitter-java where a counterpart
// exists. Types collapse into a single `type` node.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slicekit/syntax_tree.hpp"

namespace slicekit::detail {

class JavaParser : ParserBase {
 public:
  explicit JavaParser(std::string_view text) : ParserBase(text, lex_java(text)) {
    int balance = 0;
    for (const auto& t : tokens_) {
      if (t.is_op("{")) ++balance;
      if (t.is_op("}")) --balance;
    }
    bool indented = false;
    for (const auto& t : tokens_) {
      if (t.kind != TokenKind::eof && first_on_line(t.begin) && column(t.begin) > 0) {
        indented = true;
        break;
      }
    }
    // Unclosed braces in indented text (typically a slice or a truncated
    // prefix) are closed by dedent, the way a reader would.
    indent_recovery_ = balance > 0 && indented;
  }

  SyntaxTree parse() {
    std::size_t root = make("program", 0);
    while (!at_eof()) add(root, statement(false));
    nodes_[root].begin = 0;
    nodes_[root].end = text_.size();
    return take(Lang::java);
  }

 private:
  static constexpr std::string_view kPrimitives[] = {"int",   "long", "short",  "byte",
                                                     "char",  "boolean", "float", "double",
                                                     "void"};
  static constexpr std::string_view kModifiers[] = {
      "public", "private",   "protected", "static",   "final",   "abstract",
      "native", "transient", "volatile",  "strictfp", "default", "synchronized"};

  static bool is_primitive(const Token& t) {
    if (t.kind != TokenKind::keyword) return false;
    for (auto p : kPrimitives) {
      if (t.text == p) return true;
    }
    return false;
  }

  bool at_modifier() const {
    const Token& t = peek();
    if (t.is_op("@") && !peek(1).is_kw("interface")) return true;
    if (t.kind != TokenKind::keyword) return false;
    if (t.text == "synchronized" && peek(1).is_op("(")) return false;
    if (t.text == "default" && (peek(1).is_op(":") || peek(1).is_op("->"))) return false;
    for (auto m : kModifiers) {
      if (t.text == m) return true;
    }
    return false;
  }

  bool first_on_line(std::size_t pos) const {
    while (pos > 0) {
      char c = text_[pos - 1];
      if (c == '\n') return true;
      if (c != ' ' && c != '\t' && c != '\r') return false;
      --pos;
    }
    return true;
  }

  std::size_t column(std::size_t pos) const {
    std::size_t line_start = text_.rfind('\n', pos == 0 ? 0 : pos - 1);
    line_start = line_start == std::string_view::npos ? 0 : line_start + 1;
    if (pos == 0) line_start = 0;
    std::size_t col = 0;
    for (std::size_t i = line_start; i < pos && (text_[i] == ' ' || text_[i] == '\t'); ++i) {
      col += text_[i] == '\t' ? 4 : 1;
    }
    return col;
  }

  std::size_t missing() {
    std::size_t id = make("ERROR", prev_end_);
    nodes_[id].error = true;
    return id;
  }

  // ---- types -------------------------------------------------------------

  bool skip_type_args() {
    if (!at_op("<")) return true;
    int depth = 0;
    do {
      const Token& t = peek();
      if (t.is_op("<")) {
        ++depth;
      } else if (t.is_op(">")) {
        --depth;
      } else if (t.kind == TokenKind::identifier || t.is_op(",") || t.is_op(".") ||
                 t.is_op("?") || t.is_op("[") || t.is_op("]") || t.is_kw("extends") ||
                 t.is_kw("super") || is_primitive(t)) {
      } else {
        return false;
      }
      advance();
    } while (depth > 0 && !at_eof());
    return depth == 0;
  }

  bool skip_type() {
    if (is_primitive(peek())) {
      advance();
    } else if (peek().kind == TokenKind::identifier) {
      advance();
      if (!skip_type_args()) return false;
      while (at_op(".") && peek(1).kind == TokenKind::identifier) {
        advance();
        advance();
        if (!skip_type_args()) return false;
      }
    } else {
      return false;
    }
    while (at_op("[") && peek(1).is_op("]")) {
      advance();
      advance();
    }
    if (at_op("...")) advance();
    return true;
  }

  std::size_t type_node() {
    std::size_t id = start("type");
    std::size_t from = pos_;
    if (!skip_type()) {
      pos_ = from;
      return error_token();
    }
    for (std::size_t i = from; i < pos_; ++i) nodes_[id].text += tokens_[i].text;
    return finish(id);
  }

  // Declaration lookahead: `Type name` followed by something a declarator
  // can be followed by.
  enum class DeclShape { none, variable, method };

  DeclShape declaration_shape() {
    std::size_t save = pos_;
    std::size_t save_end = prev_end_;
    DeclShape shape = DeclShape::none;
    bool primitive = is_primitive(peek());
    if (skip_type() && peek().kind == TokenKind::identifier) {
      const Token& after = peek(1);
      if (after.is_op("(")) {
        shape = DeclShape::method;
      } else if (after.is_op("=") || after.is_op(";") || after.is_op(",") || after.is_op("[") ||
                 after.is_op(":") || after.kind == TokenKind::eof || primitive ||
                 first_on_line(after.begin)) {
        shape = DeclShape::variable;
      }
    }
    pos_ = save;
    prev_end_ = save_end;
    return shape;
  }

  // ---- statements --------------------------------------------------------

  std::size_t statement(bool in_class) {
    const Token& t = peek();
    if (t.is_op("{")) return block("block", column_of_line(t.begin));
    if (t.is_op(";")) {
      std::size_t id = start("empty_statement");
      advance();
      return finish(id);
    }
    if (t.is_op("}") || t.is_op(")") || t.is_op("]")) return error_token();
    if (t.kind == TokenKind::keyword) {
      if (t.text == "if") return if_statement();
      if (t.text == "for") return for_statement();
      if (t.text == "while") return while_statement();
      if (t.text == "do") return do_statement();
      if (t.text == "try") return try_statement();
      if (t.text == "switch") return switch_statement();
      if (t.text == "return" || t.text == "throw") return jump_statement(t.text + "_statement", true);
      if (t.text == "break" || t.text == "continue") return jump_statement(t.text + "_statement", false);
      if (t.text == "else") return stray_else();
      if (t.text == "case" || (t.text == "default" && !at_modifier())) return switch_label();
      if (t.text == "synchronized") return synchronized_statement();
      if (t.text == "assert") return jump_statement("assert_statement", true);
      if (t.text == "import" || t.text == "package") return import_declaration();
      if (t.text == "class" || t.text == "interface" || t.text == "enum") {
        return declaration(start("class_declaration"), in_class);
      }
    }
    if (at_modifier()) return declaration(start("declaration"), in_class);
    if (t.kind == TokenKind::identifier && peek(1).is_op(":")) return labeled_statement();
    if (in_class && t.kind == TokenKind::identifier && peek(1).is_op("(")) {
      return declaration(start("declaration"), in_class);
    }
    if (t.is_op("<")) return declaration(start("declaration"), in_class);
    DeclShape shape = declaration_shape();
    if (shape != DeclShape::none) return declaration(start("declaration"), in_class);
    return expression_statement();
  }

  std::size_t column_of_line(std::size_t pos) const {
    std::size_t line_start = pos;
    while (line_start > 0 && text_[line_start - 1] != '\n') --line_start;
    std::size_t i = line_start;
    while (i < text_.size() && (text_[i] == ' ' || text_[i] == '\t')) ++i;
    return column(i);
  }

  // Closes the block by indentation when braces are missing.
  bool dedent_closes(std::size_t owner_column) const {
    if (!indent_recovery_ || at_eof()) return false;
    const Token& t = peek();
    return first_on_line(t.begin) && column(t.begin) <= owner_column && !t.is_op("}");
  }

  std::size_t block(std::string label, std::size_t owner_column, bool in_class = false) {
    std::size_t id = start(std::move(label));
    advance();  // '{'
    while (!at_eof() && !at_op("}")) {
      if (dedent_closes(owner_column)) break;
      add(id, statement(in_class));
    }
    if (at_op("}")) {
      nodes_[id].has_close = true;
      nodes_[id].close_begin = peek().begin;
      advance();
    } else {
      nodes_[id].error = true;
    }
    return finish(id);
  }

  // Parses the body of a compound statement and records where its header
  // ends (after the opening brace when the body is a block).
  void body(std::size_t owner, Field field, std::size_t owner_column) {
    if (at_op("{")) {
      nodes_[owner].header_end = peek().end;
      add(owner, block("block", owner_column), field);
      return;
    }
    nodes_[owner].header_end = prev_end_;
    if (at_eof() || at_op("}") || dedent_closes(owner_column)) {
      nodes_[owner].error = true;
      return;
    }
    add(owner, statement(false), field);
  }

  std::size_t paren_condition(std::size_t owner) {
    std::size_t id = start("parenthesized_expression");
    if (!accept_op("(")) {
      nodes_[owner].error = true;
      nodes_[id].error = true;
    }
    add(id, expression());
    if (!accept_op(")")) {
      nodes_[id].error = true;
      nodes_[owner].error = true;
    }
    return finish(id);
  }

  std::size_t if_statement() {
    std::size_t col = column_of_line(peek().begin);
    std::size_t id = start("if_statement");
    advance();
    add(id, paren_condition(id), Field::condition);
    body(id, Field::consequence, col);
    if (at_kw("else") && !dedent_closes_else(col)) {
      std::size_t el = start("else_clause");
      advance();
      if (at_kw("if")) {
        std::size_t inner = if_statement();
        nodes_[el].header_end = nodes_[inner].header_end;
        add(el, inner, Field::body);
      } else {
        body(el, Field::body, col);
      }
      add(id, finish(el), Field::alternative);
    }
    return finish(id);
  }

  bool dedent_closes_else(std::size_t col) const {
    return indent_recovery_ && first_on_line(peek().begin) && column(peek().begin) < col;
  }

  std::size_t stray_else() {
    std::size_t col = column_of_line(peek().begin);
    std::size_t el = start("else_clause");
    nodes_[el].error = true;
    advance();
    if (at_kw("if")) {
      std::size_t inner = if_statement();
      nodes_[el].header_end = nodes_[inner].header_end;
      add(el, inner, Field::body);
    } else {
      body(el, Field::body, col);
    }
    return finish(el);
  }

  std::size_t for_statement() {
    std::size_t col = column_of_line(peek().begin);
    std::size_t id = start("for_statement");
    advance();
    if (!accept_op("(")) nodes_[id].error = true;
    // Enhanced for: [final] Type name ':'
    std::size_t save = pos_;
    std::size_t save_end = prev_end_;
    while (at_kw("final") || at_op("@")) advance();
    bool enhanced = skip_type() && peek().kind == TokenKind::identifier && peek(1).is_op(":");
    pos_ = save;
    prev_end_ = save_end;
    if (enhanced) {
      nodes_[id].label = "enhanced_for_statement";
      while (at_kw("final") || at_op("@")) advance();
      add(id, type_node(), Field::type);
      add(id, leaf("identifier"), Field::name);
      advance();  // ':'
      add(id, expression(), Field::iterable);
    } else {
      if (!at_op(";")) {
        if (declaration_shape() == DeclShape::variable) {
          std::size_t decl = start("local_variable_declaration");
          add(decl, type_node(), Field::type);
          declarators(decl);
          add(id, finish(decl), Field::init);
        } else {
          expression_list(id, Field::init);
        }
      }
      if (!accept_op(";")) nodes_[id].error = true;
      if (!at_op(";") && !at_op(")")) add(id, expression(), Field::condition);
      if (!accept_op(";")) nodes_[id].error = true;
      if (!at_op(")") && !at_op("{")) expression_list(id, Field::update);
    }
    if (!accept_op(")")) nodes_[id].error = true;
    body(id, Field::body, col);
    return finish(id);
  }

  void expression_list(std::size_t owner, Field field) {
    do {
      std::size_t mark = nodes_.size();
      std::size_t before = pos_;
      std::size_t e = expression();
      if (pos_ == before) {
        nodes_.resize(mark);
        nodes_[owner].error = true;
        return;
      }
      add(owner, e, field);
    } while (accept_op(","));
  }

  std::size_t while_statement() {
    std::size_t col = column_of_line(peek().begin);
    std::size_t id = start("while_statement");
    advance();
    add(id, paren_condition(id), Field::condition);
    body(id, Field::body, col);
    return finish(id);
  }

  std::size_t do_statement() {
    std::size_t col = column_of_line(peek().begin);
    std::size_t id = start("do_statement");
    advance();
    body(id, Field::body, col);
    if (at_kw("while")) {
      std::size_t tail = start("while_tail");
      advance();
      add(tail, paren_condition(tail), Field::condition);
      expect_op(tail, ";");
      add(id, finish(tail), Field::condition);
    } else {
      nodes_[id].error = true;
    }
    return finish(id);
  }

  std::size_t try_statement() {
    std::size_t col = column_of_line(peek().begin);
    std::size_t id = start("try_statement");
    advance();
    if (at_op("(")) {
      // try-with-resources: declarations separated by ';'
      std::size_t res = start("resource_specification");
      advance();
      while (!at_eof() && !at_op(")") && !at_op("{")) {
        if (declaration_shape() == DeclShape::variable) {
          std::size_t decl = start("local_variable_declaration");
          add(decl, type_node(), Field::type);
          declarators(decl);
          add(res, finish(decl));
        } else {
          std::size_t before = pos_;
          add(res, expression());
          if (pos_ == before) add(res, error_token());
        }
        accept_op(";");
      }
      expect_op(res, ")");
      add(id, finish(res), Field::init);
    }
    body(id, Field::body, col);
    while (at_kw("catch") || at_kw("finally")) {
      if (dedent_closes_else(col)) break;
      if (at_kw("catch")) {
        std::size_t c = start("catch_clause");
        advance();
        expect_op(c, "(");
        std::size_t param = start("catch_formal_parameter");
        while (at_kw("final") || at_op("@")) advance();
        add(param, type_node(), Field::type);
        while (accept_op("|")) add(param, type_node(), Field::type);
        if (peek().kind == TokenKind::identifier) {
          add(param, leaf("identifier"), Field::name);
        } else {
          nodes_[param].error = true;
        }
        add(c, finish(param), Field::parameters);
        expect_op(c, ")");
        body(c, Field::body, col);
        add(id, finish(c), Field::alternative);
      } else {
        std::size_t f = start("finally_clause");
        advance();
        body(f, Field::body, col);
        add(id, finish(f), Field::alternative);
      }
    }
    return finish(id);
  }

  std::size_t switch_statement() {
    std::size_t col = column_of_line(peek().begin);
    std::size_t id = start("switch_statement");
    advance();
    add(id, paren_condition(id), Field::condition);
    if (at_op("{")) {
      nodes_[id].header_end = peek().end;
      add(id, block("switch_block", col), Field::body);
    } else {
      nodes_[id].header_end = prev_end_;
      nodes_[id].error = true;
    }
    return finish(id);
  }

  std::size_t switch_label() {
    std::size_t id = start("switch_label");
    if (accept_kw("case")) {
      expression_list(id, Field::value);
    } else {
      advance();  // default
    }
    if (!accept_op(":") && !accept_op("->")) nodes_[id].error = true;
    return finish(id);
  }

  std::size_t synchronized_statement() {
    std::size_t col = column_of_line(peek().begin);
    std::size_t id = start("synchronized_statement");
    advance();
    add(id, paren_condition(id), Field::condition);
    body(id, Field::body, col);
    return finish(id);
  }

  std::size_t jump_statement(std::string label, bool with_value) {
    std::size_t id = start(std::move(label));
    advance();
    if (with_value && !at_op(";") && !at_op("}") && !at_eof()) {
      add(id, expression(), Field::value);
      if (accept_op(":")) add(id, expression(), Field::value);  // assert detail
    } else if (!with_value && peek().kind == TokenKind::identifier) {
      add(id, leaf("identifier"), Field::name);
    }
    expect_op(id, ";");
    return finish(id);
  }

  std::size_t import_declaration() {
    std::size_t id = start("import_declaration");
    advance();
    std::string path;
    while (!at_eof() && !at_op(";") && !first_on_line_after(id)) path += advance().text;
    nodes_[id].text = path;
    expect_op(id, ";");
    return finish(id);
  }

  bool first_on_line_after(std::size_t id) const {
    return peek().begin > nodes_[id].begin && first_on_line(peek().begin);
  }

  std::size_t labeled_statement() {
    std::size_t id = start("labeled_statement");
    add(id, leaf("identifier"), Field::name);
    advance();  // ':'
    nodes_[id].header_end = prev_end_;
    if (!at_eof() && !at_op("}")) add(id, statement(false), Field::body);
    return finish(id);
  }

  // Declarations that may carry modifiers: classes, methods, constructors,
  // fields and local variables. `id` was started at the first token.
  std::size_t declaration(std::size_t id, bool in_class) {
    std::size_t col = column_of_line(nodes_[id].begin);
    if (at_modifier()) {
      std::size_t mods = start("modifiers");
      while (at_modifier()) {
        if (accept_op("@")) {
          nodes_[mods].text += "@";
          if (peek().kind == TokenKind::identifier) nodes_[mods].text += advance().text;
          while (at_op(".") && peek(1).kind == TokenKind::identifier) {
            advance();
            nodes_[mods].text += "." + advance().text;
          }
          if (at_op("(")) skip_balanced("(", ")");
        } else {
          if (!nodes_[mods].text.empty()) nodes_[mods].text += " ";
          nodes_[mods].text += advance().text;
        }
      }
      add(id, finish(mods));
    }
    if (at_kw("class") || at_kw("interface") || at_kw("enum") ||
        (at_op("@") && peek(1).is_kw("interface"))) {
      nodes_[id].label = "class_declaration";
      if (at_op("@")) advance();
      advance();
      if (peek().kind == TokenKind::identifier) {
        add(id, leaf("identifier"), Field::name);
      } else {
        nodes_[id].error = true;
      }
      skip_type_args();
      while (!at_eof() && !at_op("{") && !at_op(";") && !first_on_line_after(id)) advance();
      if (at_op("{")) {
        nodes_[id].header_end = peek().end;
        add(id, block("class_body", col, true), Field::body);
      } else {
        nodes_[id].header_end = prev_end_;
        nodes_[id].error = true;
      }
      return finish(id);
    }
    if (at_op("<")) skip_balanced("<", ">");
    bool constructor = peek().kind == TokenKind::identifier && peek(1).is_op("(");
    if (constructor || declaration_shape() == DeclShape::method) {
      nodes_[id].label = constructor ? "constructor_declaration" : "method_declaration";
      if (!constructor) add(id, type_node(), Field::type);
      add(id, leaf("identifier"), Field::name);
      add(id, formal_parameters(), Field::parameters);
      while (at_op("[")) skip_balanced("[", "]");
      if (accept_kw("throws")) {
        while (!at_eof() && !at_op("{") && !at_op(";")) advance();
      }
      if (at_op("{")) {
        nodes_[id].header_end = peek().end;
        add(id, block("block", col), Field::body);
      } else {
        nodes_[id].header_end = prev_end_;
        if (!accept_op(";") && in_class) nodes_[id].error = true;
      }
      return finish(id);
    }
    nodes_[id].label = in_class ? "field_declaration" : "local_variable_declaration";
    if (declaration_shape() == DeclShape::none) {
      // Modifiers followed by something unrecognisable.
      nodes_[id].error = true;
      if (!at_eof() && !at_op("}")) add(id, error_token());
      return finish(id);
    }
    add(id, type_node(), Field::type);
    declarators(id);
    expect_op(id, ";");
    return finish(id);
  }

  void skip_balanced(std::string_view open, std::string_view close) {
    int depth = 0;
    do {
      if (at_op(open)) ++depth;
      if (at_op(close)) --depth;
      advance();
    } while (depth > 0 && !at_eof());
  }

  std::size_t formal_parameters() {
    std::size_t id = start("formal_parameters");
    if (!accept_op("(")) {
      nodes_[id].error = true;
      return finish(id);
    }
    while (!at_eof() && !at_op(")") && !at_op("{")) {
      std::size_t p = start("formal_parameter");
      while (at_kw("final") || at_op("@")) {
        if (accept_op("@")) {
          if (peek().kind == TokenKind::identifier) advance();
        } else {
          advance();
        }
      }
      add(p, type_node(), Field::type);
      if (peek().kind == TokenKind::identifier) {
        add(p, leaf("identifier"), Field::name);
      } else {
        nodes_[p].error = true;
      }
      while (at_op("[") && peek(1).is_op("]")) {
        advance();
        advance();
      }
      add(id, finish(p));
      if (!accept_op(",")) break;
    }
    expect_op(id, ")");
    return finish(id);
  }

  void declarators(std::size_t decl) {
    do {
      std::size_t d = start("variable_declarator");
      if (peek().kind == TokenKind::identifier) {
        add(d, leaf("identifier"), Field::name);
      } else {
        nodes_[d].error = true;
        nodes_[decl].error = true;
        add(decl, finish(d));
        return;
      }
      while (at_op("[") && peek(1).is_op("]")) {
        advance();
        advance();
      }
      if (accept_op("=")) {
        add(d, at_op("{") ? array_initializer() : expression(), Field::value);
      }
      add(decl, finish(d));
    } while (accept_op(","));
  }

  std::size_t expression_statement() {
    std::size_t id = start("expression_statement");
    std::size_t mark = nodes_.size();
    std::size_t before = pos_;
    std::size_t e = expression();
    if (pos_ == before) {
      nodes_.resize(mark - 1);
      return error_token();
    }
    add(id, e);
    expect_op(id, ";");
    return finish(id);
  }

  // ---- expressions -------------------------------------------------------

  static bool is_assign_op(const Token& t) {
    if (t.kind != TokenKind::op) return false;
    static constexpr std::string_view ops[] = {"=",  "+=", "-=", "*=",  "/=",  "%=",
                                               "&=", "|=", "^=", "<<=", ">>=", ">>>="};
    for (auto o : ops) {
      if (t.text == o) return true;
    }
    return false;
  }

  std::size_t expression() {
    std::size_t lhs = ternary();
    if (is_assign_op(peek())) {
      std::size_t id = make("assignment_expression", nodes_[lhs].begin);
      nodes_[id].text = advance().text;
      add(id, lhs, Field::left);
      add(id, at_op("{") ? array_initializer() : expression(), Field::right);
      return finish(id);
    }
    return lhs;
  }

  std::size_t ternary() {
    std::size_t cond = binary(1);
    if (!at_op("?")) return cond;
    std::size_t id = make("ternary_expression", nodes_[cond].begin);
    advance();
    add(id, cond, Field::condition);
    add(id, expression(), Field::consequence);
    expect_op(id, ":");
    add(id, ternary(), Field::alternative);
    return finish(id);
  }

  // Returns the operator text and token count at the cursor, joining
  // adjacent '>' tokens into shifts.
  std::pair<std::string, std::size_t> binary_op() const {
    const Token& t = peek();
    if (t.is_kw("instanceof")) return {"instanceof", 1};
    if (t.kind != TokenKind::op) return {"", 0};
    if (t.text == ">" && peek(1).is_op(">") && peek(1).begin == t.end) {
      if (peek(2).is_op(">") && peek(2).begin == peek(1).end) return {">>>", 3};
      return {">>", 2};
    }
    return {t.text, 1};
  }

  static int precedence(const std::string& op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "|") return 3;
    if (op == "^") return 4;
    if (op == "&") return 5;
    if (op == "==" || op == "!=") return 6;
    if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "instanceof") return 7;
    if (op == "<<" || op == ">>" || op == ">>>") return 8;
    if (op == "+" || op == "-") return 9;
    if (op == "*" || op == "/" || op == "%") return 10;
    return 0;
  }

  std::size_t binary(int min_prec) {
    std::size_t left = unary();
    while (true) {
      auto [op, count] = binary_op();
      int prec = count ? precedence(op) : 0;
      if (prec == 0 || prec < min_prec) break;
      if (op == "instanceof") {
        std::size_t id = make("instanceof_expression", nodes_[left].begin);
        advance();
        add(id, left, Field::left);
        accept_kw("final");
        add(id, type_node(), Field::type);
        if (peek().kind == TokenKind::identifier) add(id, leaf("identifier"), Field::name);
        left = finish(id);
        continue;
      }
      std::size_t id = make("binary_expression", nodes_[left].begin);
      nodes_[id].text = op;
      for (std::size_t i = 0; i < count; ++i) advance();
      add(id, left, Field::left);
      add(id, binary(prec + 1), Field::right);
      left = finish(id);
    }
    return left;
  }

  bool looks_like_cast() {
    if (!at_op("(")) return false;
    std::size_t save = pos_;
    std::size_t save_end = prev_end_;
    advance();
    bool primitive = is_primitive(peek());
    bool ok = skip_type() && at_op(")");
    if (ok) {
      const Token& next = peek(1);
      ok = primitive || next.kind == TokenKind::identifier || next.kind == TokenKind::number ||
           next.kind == TokenKind::string || next.kind == TokenKind::character ||
           next.is_op("(") || next.is_op("!") || next.is_op("~") || next.is_kw("this") ||
           next.is_kw("new") || next.is_kw("super") || next.is_kw("true") ||
           next.is_kw("false") || next.is_kw("null");
    }
    pos_ = save;
    prev_end_ = save_end;
    return ok;
  }

  std::size_t unary() {
    const Token& t = peek();
    if (t.is_op("+") || t.is_op("-") || t.is_op("!") || t.is_op("~")) {
      std::size_t id = start("unary_expression");
      nodes_[id].text = advance().text;
      add(id, unary(), Field::value);
      return finish(id);
    }
    if (t.is_op("++") || t.is_op("--")) {
      std::size_t id = start("update_expression");
      nodes_[id].text = advance().text;
      add(id, unary(), Field::value);
      return finish(id);
    }
    if (looks_like_cast()) {
      std::size_t id = start("cast_expression");
      advance();
      add(id, type_node(), Field::type);
      advance();  // ')'
      add(id, unary(), Field::value);
      return finish(id);
    }
    return postfix(primary());
  }

  std::size_t postfix(std::size_t expr) {
    while (true) {
      if (at_op(".")) {
        advance();
        if (peek().kind == TokenKind::identifier && peek(1).is_op("(")) {
          std::size_t id = make("method_invocation", nodes_[expr].begin);
          add(id, expr, Field::object);
          add(id, leaf("identifier"), Field::name);
          add(id, argument_list(), Field::arguments);
          expr = finish(id);
        } else if (peek().kind == TokenKind::identifier || at_kw("class") || at_kw("this") ||
                   at_kw("length") || at_kw("new")) {
          if (at_kw("new")) {
            std::size_t inner = primary();
            std::size_t id = make("field_access", nodes_[expr].begin);
            add(id, expr, Field::object);
            add(id, inner, Field::field);
            expr = finish(id);
            continue;
          }
          std::size_t id = make("field_access", nodes_[expr].begin);
          add(id, expr, Field::object);
          add(id, leaf("identifier"), Field::field);
          expr = finish(id);
        } else if (at_op("<")) {
          skip_type_args();
        } else {
          nodes_[expr].error = true;
          break;
        }
      } else if (at_op("[")) {
        std::size_t id = make("array_access", nodes_[expr].begin);
        advance();
        add(id, expr, Field::object);
        add(id, expression(), Field::index);
        expect_op(id, "]");
        expr = finish(id);
      } else if (at_op("++") || at_op("--")) {
        std::size_t id = make("update_expression", nodes_[expr].begin);
        nodes_[id].text = advance().text;
        add(id, expr, Field::value);
        expr = finish(id);
      } else if (at_op("::")) {
        std::size_t id = make("method_reference", nodes_[expr].begin);
        advance();
        add(id, expr, Field::object);
        if (peek().kind == TokenKind::identifier || at_kw("new")) {
          add(id, leaf("identifier"), Field::name);
        }
        expr = finish(id);
      } else {
        break;
      }
    }
    return expr;
  }

  std::size_t argument_list() {
    std::size_t id = start("argument_list");
    advance();  // '('
    while (!at_eof() && !at_op(")")) {
      std::size_t mark = nodes_.size();
      std::size_t before = pos_;
      std::size_t e = expression();
      if (pos_ == before) {
        nodes_.resize(mark);
        break;
      }
      add(id, e);
      if (!accept_op(",")) break;
    }
    expect_op(id, ")");
    return finish(id);
  }

  std::size_t array_initializer() {
    std::size_t id = start("array_initializer");
    advance();  // '{'
    while (!at_eof() && !at_op("}")) {
      std::size_t mark = nodes_.size();
      std::size_t before = pos_;
      std::size_t e = at_op("{") ? array_initializer() : expression();
      if (pos_ == before) {
        nodes_.resize(mark);
        break;
      }
      add(id, e);
      if (!accept_op(",")) break;
    }
    expect_op(id, "}");
    return finish(id);
  }

  bool looks_like_lambda() const {
    if (peek().kind == TokenKind::identifier && peek(1).is_op("->")) return true;
    if (!at_op("(")) return false;
    int depth = 0;
    for (std::size_t k = 0; pos_ + k < tokens_.size(); ++k) {
      const Token& t = peek(k);
      if (t.is_op("(")) ++depth;
      if (t.is_op(")") && --depth == 0) return peek(k + 1).is_op("->");
      if (t.kind == TokenKind::eof || t.is_op(";") || t.is_op("{")) return false;
    }
    return false;
  }

  std::size_t lambda() {
    std::size_t id = start("lambda_expression");
    std::size_t params = start("inferred_parameters");
    if (peek().kind == TokenKind::identifier) {
      add(params, leaf("identifier"), Field::name);
    } else {
      advance();  // '('
      while (!at_eof() && !at_op(")")) {
        if (peek().kind == TokenKind::identifier &&
            (peek(1).is_op(",") || peek(1).is_op(")"))) {
          add(params, leaf("identifier"), Field::name);
        } else if (!skip_type()) {
          advance();
        }
        accept_op(",");
      }
      accept_op(")");
    }
    add(id, finish(params), Field::parameters);
    advance();  // '->'
    if (at_op("{")) {
      add(id, block("block", column_of_line(peek().begin)), Field::body);
    } else {
      add(id, expression(), Field::body);
    }
    return finish(id);
  }

  std::size_t primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::number: {
        bool is_float = t.text.find_first_of(".eEfFdD") != std::string::npos &&
                        t.text.rfind("0x", 0) != 0 && t.text.rfind("0X", 0) != 0;
        return leaf(is_float ? "floating_point_literal" : "integer_literal");
      }
      case TokenKind::string: return leaf("string_literal");
      case TokenKind::character: return leaf("character_literal");
      case TokenKind::identifier: {
        if (looks_like_lambda()) return lambda();
        if (peek(1).is_op("(")) {
          std::size_t id = start("method_invocation");
          add(id, leaf("identifier"), Field::name);
          add(id, argument_list(), Field::arguments);
          return finish(id);
        }
        return leaf("identifier");
      }
      case TokenKind::keyword: {
        if (t.text == "true" || t.text == "false") return leaf(t.text);
        if (t.text == "null") return leaf("null_literal");
        if (t.text == "this" || t.text == "super") {
          if (peek(1).is_op("(")) {
            std::size_t id = start("explicit_constructor_invocation");
            add(id, leaf(t.text), Field::name);
            add(id, argument_list(), Field::arguments);
            return finish(id);
          }
          return leaf(t.text);
        }
        if (t.text == "new") return creation();
        if (is_primitive(t)) return type_node();
        break;
      }
      case TokenKind::op: {
        if (t.text == "(") {
          if (looks_like_lambda()) return lambda();
          std::size_t id = start("parenthesized_expression");
          advance();
          add(id, expression());
          expect_op(id, ")");
          return finish(id);
        }
        if (t.text == "{") return array_initializer();
        if (t.text == "@") return error_token();
        break;
      }
      default: break;
    }
    // Nothing that can start an expression: terminators are left for the
    // caller, anything else is swallowed so parsing progresses.
    if (t.kind == TokenKind::eof || t.is_op(";") || t.is_op(")") || t.is_op("}") ||
        t.is_op("]") || t.is_op(",") || t.is_op(":") || t.kind == TokenKind::keyword) {
      return missing();
    }
    return error_token();
  }

  std::size_t creation() {
    std::size_t id = start("object_creation_expression");
    advance();  // new
    add(id, type_node_no_dims(), Field::type);
    if (at_op("[")) {
      nodes_[id].label = "array_creation_expression";
      while (at_op("[")) {
        advance();
        if (!at_op("]")) add(id, expression(), Field::index);
        expect_op(id, "]");
      }
      if (at_op("{")) add(id, array_initializer(), Field::value);
      return finish(id);
    }
    if (at_op("(")) {
      add(id, argument_list(), Field::arguments);
    } else {
      nodes_[id].error = true;
    }
    if (at_op("{")) add(id, block("class_body", column_of_line(peek().begin), true), Field::body);
    return finish(id);
  }

  std::size_t type_node_no_dims() {
    std::size_t id = start("type");
    std::size_t from = pos_;
    if (is_primitive(peek())) {
      advance();
    } else if (peek().kind == TokenKind::identifier) {
      advance();
      skip_type_args();
      while (at_op(".") && peek(1).kind == TokenKind::identifier) {
        advance();
        advance();
        skip_type_args();
      }
    } else {
      nodes_[id].error = true;
      return finish(id);
    }
    for (std::size_t i = from; i < pos_; ++i) nodes_[id].text += tokens_[i].text;
    return finish(id);
  }

  bool indent_recovery_ = false;
};

}  // namespace slicekit::detail
