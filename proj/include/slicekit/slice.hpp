#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "slicekit/error.hpp"
#include "slicekit/source_unit.hpp"

namespace slicekit {

// x = {s1..sN; v; [n]}
struct SliceQuery {
  SourceUnit unit;
  std::string criterion_var;
  int criterion_line = 0;
};

struct Slice {
  std::vector<int> line_numbers;  // strictly increasing, except in raw decoder output
  std::vector<std::string> lines;  // text of each line, without the "N: " prefix
  bool degraded = false;

  bool empty() const { return line_numbers.empty(); }

  // "N: text" lines joined by newlines.
  std::string numbered_text() const {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (i) out += '\n';
      out += std::to_string(line_numbers[i]) + ": " + lines[i];
    }
    return out;
  }

  // Plain code of the slice, for parsing.
  std::string code() const {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (i) out += '\n';
      out += lines[i];
    }
    return out;
  }
};

// Slice made of the query's own lines.
inline Slice slice_from_lines(const SourceUnit& unit, std::vector<int> numbers) {
  std::sort(numbers.begin(), numbers.end());
  numbers.erase(std::unique(numbers.begin(), numbers.end()), numbers.end());
  Slice s;
  for (int n : numbers) {
    if (!unit.has_line(n)) {
      throw Error(ErrorCode::invalid_slice, "line " + std::to_string(n) + " is not in the query");
    }
    s.line_numbers.push_back(n);
    s.lines.push_back(unit.line(n).text);
  }
  return s;
}

// Splits "N: text" at the prefix; returns false when the line has none.
inline bool split_numbered(std::string_view line, int& number, std::string_view& text) {
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == 0 || i > 9 || i >= line.size() || line[i] != ':') return false;
  number = std::stoi(std::string(line.substr(0, i)));
  ++i;
  if (i < line.size() && line[i] == ' ') ++i;
  text = line.substr(i);
  return true;
}

// Removes "N: " prefixes, keeping the code. Lines without a prefix are
// kept as they are.
inline std::string strip_line_numbers(std::string_view numbered) {
  std::string out;
  std::size_t start = 0;
  bool first = true;
  while (start <= numbered.size()) {
    std::size_t nl = numbered.find('\n', start);
    std::string_view line =
        numbered.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    int n = 0;
    std::string_view text;
    if (!first) out += '\n';
    first = false;
    out += split_numbered(line, n, text) ? text : line;
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

// Reads generated "N: text" lines. Line texts are kept as generated so
// that hallucinated content stays visible to evaluation; lines without a
// number prefix are appended to the preceding line.
inline Slice parse_numbered_slice(std::string_view numbered) {
  Slice s;
  std::size_t start = 0;
  while (start < numbered.size()) {
    std::size_t nl = numbered.find('\n', start);
    std::string_view line =
        numbered.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    int n = 0;
    std::string_view text;
    if (split_numbered(line, n, text)) {
      s.line_numbers.push_back(n);
      s.lines.emplace_back(text);
    } else if (!s.lines.empty()) {
      s.lines.back() += "\n";
      s.lines.back() += line;
    } else if (!line.empty()) {
      s.line_numbers.push_back(0);
      s.lines.emplace_back(line);
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return s;
}

inline std::string rtrim(std::string_view s) {
  std::size_t e = s.size();
  while (e > 0 && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(0, e));
}

}  // namespace slicekit
