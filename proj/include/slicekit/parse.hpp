#pragma once

#include <string_view>

#include "slicekit/error.hpp"
#include "slicekit/java_parser.hpp"
#include "slicekit/python_parser.hpp"
#include "slicekit/syntax_tree.hpp"

namespace slicekit {

// Never fails on malformed code; broken regions come back as ERROR nodes or
// error-flagged nodes.
inline SyntaxTree parse(std::string_view text, Lang lang) {
  if (text.empty()) throw Error(ErrorCode::empty_input, "cannot parse empty text");
  if (lang == Lang::java) return detail::JavaParser(text).parse();
  return detail::PythonParser(text).parse();
}

inline SyntaxTree parse(std::string_view text, std::string_view lang) {
  return parse(text, parse_lang(lang));
}

}  // namespace slicekit
