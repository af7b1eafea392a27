#pragma once

// Tokenizers for the two supported source languages. Both are error
// tolerant: unknown characters become single-character operator tokens and
// unterminated literals run to the end of the line.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "slicekit/error.hpp"

namespace slicekit {

enum class Lang { java, python };

inline std::string_view to_string(Lang lang) {
  return lang == Lang::java ? "java" : "python";
}

inline Lang parse_lang(std::string_view name) {
  if (name == "java") return Lang::java;
  if (name == "python" || name == "py") return Lang::python;
  throw Error(ErrorCode::unknown_language, "unknown language: " + std::string(name));
}

enum class TokenKind {
  identifier,
  keyword,
  number,
  string,
  character,
  op,
  newline,  // python logical line end
  indent,   // python
  dedent,   // python
  eof,
};

struct Token {
  TokenKind kind = TokenKind::eof;
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
  bool error = false;  // unterminated literal or inconsistent dedent

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_op(std::string_view t) const { return is(TokenKind::op, t); }
  bool is_kw(std::string_view t) const { return is(TokenKind::keyword, t); }
};

namespace detail {

inline constexpr std::array<std::string_view, 53> kJavaKeywords = {
    "abstract", "assert",     "boolean",   "break",      "byte",      "case",
    "catch",    "char",       "class",     "const",      "continue",  "default",
    "do",       "double",     "else",      "enum",       "extends",   "final",
    "finally",  "float",      "for",       "goto",       "if",        "implements",
    "import",   "instanceof", "int",       "interface",  "long",      "native",
    "new",      "package",    "private",   "protected",  "public",    "return",
    "short",    "static",     "strictfp",  "super",      "switch",    "synchronized",
    "this",     "throw",      "throws",    "transient",  "try",       "void",
    "volatile", "while",      "true",      "false",      "null",
};

inline constexpr std::array<std::string_view, 35> kPythonKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async",
    "await", "break",  "class",   "continue", "def",      "del",    "elif",
    "else",  "except", "finally", "for",      "from",     "global", "if",
    "import", "in",    "is",      "lambda",   "nonlocal", "not",    "or",
    "pass",  "raise",  "return",  "try",      "while",    "with",   "yield",
};

inline bool is_java_keyword(std::string_view word) {
  return std::find(kJavaKeywords.begin(), kJavaKeywords.end(), word) != kJavaKeywords.end();
}

inline bool is_python_keyword(std::string_view word) {
  return std::find(kPythonKeywords.begin(), kPythonKeywords.end(), word) !=
         kPythonKeywords.end();
}

inline bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}

inline bool ident_char(char c) {
  return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

// Longest-match operator tables. Java deliberately has no ">>" / ">>>" so
// that generic closers stay separate; the expression parser re-joins them.
inline constexpr std::array<std::string_view, 36> kJavaOps = {
    ">>>=", "<<=", ">>=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=",
    "<=",   ">=",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "<<", "+",
    "-",    "*",   "/",   "%",   "=",  "<",  ">",  "!",  "~",  "?",  ":",  "@",
};

inline constexpr std::array<std::string_view, 41> kPythonOps = {
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "**", "//", "<<", ">>", "<=", ">=", "==",
    "!=",  "+=",  "-=",  "*=",  "/=",  "%=", "&=", "|=", "^=", "@=", "+",  "-",  "*",  "/",
    "%",   "@",   "&",   "|",   "^",   "~",  "<",  ">",  "=",  ":",  "!",  "?",  "$",
};

template <std::size_t N>
std::size_t match_op(std::string_view text, std::size_t pos,
                     const std::array<std::string_view, N>& table) {
  for (auto op : table) {
    if (text.compare(pos, op.size(), op) == 0) return op.size();
  }
  return 0;
}

inline std::size_t scan_number(std::string_view text, std::size_t pos) {
  std::size_t i = pos;
  auto at = [&](std::size_t k) { return k < text.size() ? text[k] : '\0'; };
  if (at(i) == '0' && (at(i + 1) == 'x' || at(i + 1) == 'X' || at(i + 1) == 'b' ||
                       at(i + 1) == 'B' || at(i + 1) == 'o' || at(i + 1) == 'O')) {
    i += 2;
    while (std::isxdigit(static_cast<unsigned char>(at(i))) || at(i) == '_') ++i;
  } else {
    while (std::isdigit(static_cast<unsigned char>(at(i))) || at(i) == '_') ++i;
    if (at(i) == '.' && std::isdigit(static_cast<unsigned char>(at(i + 1)))) {
      ++i;
      while (std::isdigit(static_cast<unsigned char>(at(i))) || at(i) == '_') ++i;
    } else if (at(i) == '.' && !ident_start(at(i + 1)) && at(i + 1) != '.') {
      ++i;
    }
    if (at(i) == 'e' || at(i) == 'E') {
      std::size_t j = i + 1;
      if (at(j) == '+' || at(j) == '-') ++j;
      if (std::isdigit(static_cast<unsigned char>(at(j)))) {
        i = j;
        while (std::isdigit(static_cast<unsigned char>(at(i)))) ++i;
      }
    }
  }
  while (std::isalpha(static_cast<unsigned char>(at(i)))) ++i;  // suffixes: L f d j
  return i - pos;
}

// Scans a quoted literal starting at `pos` (the opening quote). Returns the
// length and whether it was terminated.
inline std::pair<std::size_t, bool> scan_quoted(std::string_view text, std::size_t pos,
                                                std::string_view quote) {
  std::size_t i = pos + quote.size();
  const bool triple = quote.size() == 3;
  while (i < text.size()) {
    if (text[i] == '\\') {
      i += 2;
      continue;
    }
    if (!triple && text[i] == '\n') return {i - pos, false};
    if (text.compare(i, quote.size(), quote) == 0) return {i + quote.size() - pos, true};
    ++i;
  }
  return {text.size() - pos, false};
}

}  // namespace detail

inline std::vector<Token> lex_java(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '*') {
      auto close = text.find("*/", i + 2);
      i = close == std::string_view::npos ? n : close + 2;
      continue;
    }
    Token tok;
    tok.begin = i;
    if (detail::ident_start(c)) {
      std::size_t j = i;
      while (j < n && detail::ident_char(text[j])) ++j;
      tok.text = std::string(text.substr(i, j - i));
      tok.kind = detail::is_java_keyword(tok.text) ? TokenKind::keyword : TokenKind::identifier;
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t len = detail::scan_number(text, i);
      tok.kind = TokenKind::number;
      tok.text = std::string(text.substr(i, len));
      i += len;
    } else if (c == '"' || c == '\'') {
      std::string_view quote = (c == '"' && text.compare(i, 3, "\"\"\"") == 0)
                                   ? std::string_view("\"\"\"")
                                   : (c == '"' ? std::string_view("\"") : std::string_view("'"));
      auto [len, closed] = detail::scan_quoted(text, i, quote);
      tok.kind = c == '"' ? TokenKind::string : TokenKind::character;
      tok.text = std::string(text.substr(i, len));
      tok.error = !closed;
      i += len;
    } else {
      std::size_t len = detail::match_op(text, i, detail::kJavaOps);
      if (len == 0) len = 1;  // ( ) { } [ ] ; , . & | ^ and anything unknown
      tok.kind = TokenKind::op;
      tok.text = std::string(text.substr(i, len));
      i += len;
    }
    tok.end = i;
    out.push_back(std::move(tok));
  }
  Token eof;
  eof.begin = eof.end = n;
  out.push_back(eof);
  return out;
}

// Python tokens carry NEWLINE / INDENT / DEDENT like the reference tokenizer.
// Indentation is only tracked outside brackets; a dedent to a width that was
// never pushed is recovered by popping to the nearest lower level and
// flagging the DEDENT token.
inline std::vector<Token> lex_python(std::string_view text) {
  std::vector<Token> out;
  std::vector<std::size_t> indents{0};
  std::size_t i = 0;
  const std::size_t n = text.size();
  int bracket_depth = 0;
  bool at_line_start = true;

  auto push_simple = [&](TokenKind kind, std::size_t pos) {
    Token t;
    t.kind = kind;
    t.begin = t.end = pos;
    out.push_back(t);
  };

  while (i < n) {
    if (at_line_start && bracket_depth == 0) {
      std::size_t j = i;
      std::size_t width = 0;
      while (j < n && (text[j] == ' ' || text[j] == '\t')) {
        width += text[j] == '\t' ? 8 - (width % 8) : 1;
        ++j;
      }
      // Blank and comment-only lines do not affect indentation.
      if (j >= n || text[j] == '\n' || text[j] == '\r' || text[j] == '#') {
        while (j < n && text[j] != '\n') ++j;
        i = j < n ? j + 1 : n;
        continue;
      }
      if (width > indents.back()) {
        indents.push_back(width);
        push_simple(TokenKind::indent, j);
      } else {
        while (width < indents.back()) {
          indents.pop_back();
          push_simple(TokenKind::dedent, j);
          if (width > indents.back()) {
            out.back().error = true;
            indents.push_back(width);
            break;
          }
        }
      }
      i = j;
      at_line_start = false;
    }
    char c = text[i];
    if (c == '\n') {
      if (bracket_depth == 0) {
        if (!out.empty() && out.back().kind != TokenKind::newline &&
            out.back().kind != TokenKind::indent && out.back().kind != TokenKind::dedent) {
          push_simple(TokenKind::newline, i);
        }
        at_line_start = true;
      }
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
      ++i;
      continue;
    }
    if (c == '\\' && i + 1 < n && text[i + 1] == '\n') {
      i += 2;
      continue;
    }
    if (c == '#') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    Token tok;
    tok.begin = i;
    // String prefixes (r, b, f, u and combinations) glue onto the literal.
    std::size_t prefix = 0;
    while (prefix < 3 && i + prefix < n &&
           std::string_view("rRbBfFuU").find(text[i + prefix]) != std::string_view::npos) {
      ++prefix;
    }
    if (i + prefix < n && (text[i + prefix] == '"' || text[i + prefix] == '\'') &&
        (prefix == 0 || !detail::ident_char(i > 0 ? text[i - 1] : ' '))) {
      std::size_t q = i + prefix;
      char qc = text[q];
      std::string triple(3, qc);
      std::string single(1, qc);
      std::string_view quote = text.compare(q, 3, triple) == 0 ? std::string_view(triple)
                                                               : std::string_view(single);
      auto [len, closed] = detail::scan_quoted(text, q, quote);
      tok.kind = TokenKind::string;
      tok.text = std::string(text.substr(i, prefix + len));
      tok.error = !closed;
      i = q + len;
    } else if (detail::ident_start(c)) {
      std::size_t j = i;
      while (j < n && detail::ident_char(text[j])) ++j;
      tok.text = std::string(text.substr(i, j - i));
      tok.kind =
          detail::is_python_keyword(tok.text) ? TokenKind::keyword : TokenKind::identifier;
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t len = detail::scan_number(text, i);
      tok.kind = TokenKind::number;
      tok.text = std::string(text.substr(i, len));
      i += len;
    } else {
      std::size_t len = detail::match_op(text, i, detail::kPythonOps);
      if (len == 0) len = 1;
      tok.kind = TokenKind::op;
      tok.text = std::string(text.substr(i, len));
      if (len == 1) {
        if (c == '(' || c == '[' || c == '{') ++bracket_depth;
        if ((c == ')' || c == ']' || c == '}') && bracket_depth > 0) --bracket_depth;
      }
      i += len;
    }
    tok.end = i;
    out.push_back(std::move(tok));
  }
  if (!out.empty() && out.back().kind != TokenKind::newline &&
      out.back().kind != TokenKind::dedent && out.back().kind != TokenKind::indent) {
    push_simple(TokenKind::newline, n);
  }
  while (indents.size() > 1) {
    indents.pop_back();
    push_simple(TokenKind::dedent, n);
  }
  Token eof;
  eof.begin = eof.end = n;
  out.push_back(eof);
  return out;
}

inline std::vector<Token> lex(std::string_view text, Lang lang) {
  return lang == Lang::java ? lex_java(text) : lex_python(text);
}

}  // namespace slicekit
