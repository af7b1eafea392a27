#pragma once

// Pretraining pairs: dataflow-preserving statement permutation, dataflow
// span corruption, and control-marker formatting of slicing examples.

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slicekit/dfg.hpp"
#include "slicekit/rng.hpp"
#include "slicekit/slice.hpp"

namespace slicekit {

// ---- permutation -----------------------------------------------------------

using StmtPair = std::pair<std::size_t, std::size_t>;

struct PermutationExample {
  std::string original;
  std::string permuted;
  std::vector<StmtPair> swaps;
};

// (i, j) with i < j in the same basic block and no edge of either kind
// between any occurrence of s_i and any of s_j.
inline std::set<StmtPair> independent_pairs(const SourceUnit& unit, const DataFlowGraph& dfg) {
  std::size_t n = unit.statements.size();
  std::vector<std::vector<bool>> linked(n, std::vector<bool>(n, false));
  for (const auto& e : dfg.edges) {
    std::size_t a = dfg.nodes[e.src].statement_index;
    std::size_t b = dfg.nodes[e.dst].statement_index;
    linked[a][b] = linked[b][a] = true;
  }
  std::set<StmtPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!linked[i][j] && same_basic_block(unit, i, j)) out.insert({i, j});
    }
  }
  return out;
}

namespace detail {

struct NameSets {
  std::set<std::string> defs;
  std::set<std::string> uses;
};

inline std::vector<NameSets> statement_names(const SourceUnit& unit, const DataFlowGraph& dfg) {
  std::vector<NameSets> out(unit.statements.size());
  for (const auto& v : dfg.nodes) {
    auto& ns = out[v.statement_index];
    (v.role == Role::definition ? ns.defs : ns.uses).insert(v.name);
  }
  return out;
}

inline bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
  for (const auto& x : a) {
    if (b.count(x)) return true;
  }
  return false;
}

// Swapping s_i and s_j also moves each of them across the statements in
// between; every such crossing must be free of def/def and def/use
// conflicts for the data flow to survive.
inline bool swap_preserves_flow(const std::vector<NameSets>& names, std::size_t i, std::size_t j) {
  auto conflict = [&](std::size_t a, std::size_t b) {
    const auto& x = names[a];
    const auto& y = names[b];
    return intersects(x.defs, y.defs) || intersects(x.defs, y.uses) || intersects(x.uses, y.defs);
  };
  for (std::size_t k = i + 1; k <= j; ++k) {
    if (conflict(i, k)) return false;
  }
  for (std::size_t k = i + 1; k < j; ++k) {
    if (conflict(k, j)) return false;
  }
  return true;
}

inline std::string swap_statements(const SourceUnit& unit, std::size_t i, std::size_t j) {
  const Statement& a = unit.statements[i];
  const Statement& b = unit.statements[j];
  const std::string& t = unit.text;
  return t.substr(0, a.begin) + b.text + t.substr(a.end, b.begin - a.end) + a.text +
         t.substr(b.end);
}

}  // namespace detail

// Pairs that statement permutation may swap: independent and, in addition, not
// breaking flows across the statements between them.
inline std::vector<StmtPair> swappable_pairs(const SourceUnit& unit, const DataFlowGraph& dfg) {
  auto names = detail::statement_names(unit, dfg);
  std::vector<StmtPair> out;
  for (const auto& p : independent_pairs(unit, dfg)) {
    if (detail::swap_preserves_flow(names, p.first, p.second)) out.push_back(p);
  }
  return out;
}

inline PermutationExample permute_statements(const SourceUnit& unit, const DataFlowGraph& dfg,
                                             int max_swaps, Rng& rng) {
  if (max_swaps < 1) throw Error(ErrorCode::invalid_argument, "max_swaps must be >= 1");
  PermutationExample ex;
  ex.original = unit.text;
  SourceUnit cur = unit;
  DataFlowGraph cur_dfg = dfg;
  for (int k = 0; k < max_swaps; ++k) {
    auto pairs = swappable_pairs(cur, cur_dfg);
    if (pairs.empty()) break;
    auto [i, j] = pairs[uniform_index(rng, pairs.size())];
    std::string text = detail::swap_statements(cur, i, j);
    SyntaxTree tree = parse(text, cur.lang);
    cur = extract_statements(tree, text, cur.lang);
    cur_dfg = build_dfg(cur, tree);
    ex.swaps.push_back({i, j});
  }
  ex.permuted = cur.text;
  return ex;
}

// ---- span corruption -------------------------------------------------------

enum class UnitKind { variable, statement };

inline std::string_view to_string(UnitKind k) {
  return k == UnitKind::variable ? "variable" : "statement";
}

struct MaskedUnit {
  UnitKind kind = UnitKind::variable;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t source = 0;  // occurrence id or statement index
};

struct CorruptionExample {
  std::string masked_input;
  std::string target;
  double mask_ratio_used = 0.0;
  std::vector<MaskedUnit> units;
  std::size_t sentinels = 0;
  std::size_t masked_tokens = 0;
  std::size_t total_tokens = 0;
  bool exhausted = false;  // V ran out before the ratio was reached
  std::size_t largest_step = 0;  // tokens masked by the largest single step
};

// "{k}" in the format is replaced by the sentinel number.
inline std::string sentinel(std::string_view format, std::size_t k) {
  std::string out(format);
  auto at = out.find("{k}");
  if (at == std::string::npos) return out + std::to_string(k);
  return out.replace(at, 3, std::to_string(k));
}

inline constexpr std::string_view kDefaultSentinel = "<mask_{k}>";

namespace detail {

inline bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Whitespace token index per character, npos on whitespace.
inline std::vector<std::size_t> token_map(std::string_view text, std::size_t& count) {
  std::vector<std::size_t> map(text.size(), npos);
  count = 0;
  bool in = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (is_ws(text[i])) {
      in = false;
      continue;
    }
    if (!in) {
      ++count;
      in = true;
    }
    map[i] = count - 1;
  }
  return map;
}

class MaskState {
 public:
  explicit MaskState(std::string_view text) : text_(text) {
    tokens_ = token_map(text, total_);
    chars_.assign(text.size(), false);
    token_hit_.assign(total_, false);
  }

  // Masks [begin, end); returns the number of newly masked tokens.
  std::size_t mask(std::size_t begin, std::size_t end) {
    std::size_t added = 0;
    for (std::size_t i = begin; i < end && i < chars_.size(); ++i) {
      chars_[i] = true;
      std::size_t t = tokens_[i];
      if (t != npos && !token_hit_[t]) {
        token_hit_[t] = true;
        ++added;
      }
    }
    masked_ += added;
    return added;
  }

  std::size_t masked() const { return masked_; }
  std::size_t total() const { return total_; }
  const std::vector<bool>& chars() const { return chars_; }

 private:
  std::string_view text_;
  std::vector<std::size_t> tokens_;
  std::vector<bool> chars_;
  std::vector<bool> token_hit_;
  std::size_t total_ = 0;
  std::size_t masked_ = 0;
};

inline void render(std::string_view text, const std::vector<bool>& chars, std::string_view format,
                   CorruptionExample& ex) {
  std::size_t k = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!chars[i]) {
      ex.masked_input += text[i++];
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && chars[j]) ++j;
    std::string s = sentinel(format, k++);
    ex.masked_input += s;
    if (!ex.target.empty()) ex.target += ' ';
    ex.target += s;
    ex.target += ' ';
    ex.target.append(text.substr(i, j - i));
    i = j;
  }
  ex.sentinels = k;
}

}  // namespace detail

// Builds an example from explicitly chosen units. Overlapping units merge
// into one sentinel.
inline CorruptionExample corrupt_units(const SourceUnit& unit, std::vector<MaskedUnit> units,
                                       std::string_view format = kDefaultSentinel) {
  CorruptionExample ex;
  detail::MaskState st(unit.text);
  for (const auto& u : units) st.mask(u.begin, u.end);
  ex.units = std::move(units);
  ex.masked_tokens = st.masked();
  ex.total_tokens = st.total();
  ex.mask_ratio_used = st.total() ? static_cast<double>(st.masked()) / st.total() : 0.0;
  detail::render(unit.text, st.chars(), format, ex);
  return ex;
}

inline MaskedUnit variable_unit(const DataFlowGraph& dfg, std::size_t occurrence) {
  const auto& v = dfg.nodes.at(occurrence);
  return {UnitKind::variable, v.begin, v.end, occurrence};
}

inline MaskedUnit statement_unit(const SourceUnit& unit, std::size_t stmt) {
  const auto& s = unit.statements.at(stmt);
  return {UnitKind::statement, s.begin, s.end, stmt};
}

inline CorruptionExample span_corrupt(const SourceUnit& unit, const DataFlowGraph& dfg,
                                      double mask_ratio, Rng& rng,
                                      std::string_view format = kDefaultSentinel) {
  if (!(mask_ratio > 0.0 && mask_ratio < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "mask ratio must lie in (0, 1)");
  }
  CorruptionExample ex;
  detail::MaskState st(unit.text);
  const double goal = mask_ratio * static_cast<double>(st.total());
  std::vector<std::size_t> pool(dfg.nodes.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  std::vector<std::vector<std::size_t>> parents(dfg.nodes.size()), children(dfg.nodes.size());
  for (const auto& e : dfg.edges) {
    parents[e.dst].push_back(e.src);
    children[e.src].push_back(e.dst);
  }
  while (static_cast<double>(st.masked()) < goal && !pool.empty()) {
    std::size_t pick = uniform_index(rng, pool.size());
    std::size_t v = pool[pick];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    if (parents[v].empty() && children[v].empty()) continue;
    bool fine = uniform01(rng) < 0.5;
    std::set<std::size_t> related(parents[v].begin(), parents[v].end());
    related.insert(children[v].begin(), children[v].end());
    std::size_t step = 0;
    if (fine) {
      for (auto o : related) {
        MaskedUnit u = variable_unit(dfg, o);
        step += st.mask(u.begin, u.end);
        ex.units.push_back(u);
      }
    } else {
      std::set<std::size_t> stmts;
      for (auto o : related) stmts.insert(dfg.nodes[o].statement_index);
      for (auto s : stmts) {
        MaskedUnit u = statement_unit(unit, s);
        step += st.mask(u.begin, u.end);
        ex.units.push_back(u);
      }
    }
    ex.largest_step = std::max(ex.largest_step, step);
  }
  ex.exhausted = static_cast<double>(st.masked()) < goal;
  ex.masked_tokens = st.masked();
  ex.total_tokens = st.total();
  ex.mask_ratio_used = st.total() ? static_cast<double>(st.masked()) / st.total() : 0.0;
  detail::render(unit.text, st.chars(), format, ex);
  return ex;
}

// Substitutes every sentinel by its target segment. Throws invalid_argument
// when the target does not describe the masked input.
inline std::string reconstruct(std::string_view masked_input, std::string_view target,
                               std::size_t sentinels, std::string_view format = kDefaultSentinel) {
  std::vector<std::string> content(sentinels);
  std::size_t pos = 0;
  for (std::size_t k = 0; k < sentinels; ++k) {
    std::string head = sentinel(format, k) + " ";
    if (target.substr(pos, head.size()) != head) {
      throw Error(ErrorCode::invalid_argument, "target is missing sentinel " + std::to_string(k));
    }
    pos += head.size();
    std::size_t end = target.size();
    if (k + 1 < sentinels) {
      end = target.find(" " + sentinel(format, k + 1) + " ", pos);
      if (end == std::string_view::npos) {
        throw Error(ErrorCode::invalid_argument, "target is missing sentinel " + std::to_string(k + 1));
      }
    }
    content[k] = std::string(target.substr(pos, end - pos));
    pos = end + (k + 1 < sentinels ? 1 : 0);
  }
  std::string out;
  std::size_t at = 0;
  for (std::size_t k = 0; k < sentinels; ++k) {
    std::string s = sentinel(format, k);
    std::size_t hit = masked_input.find(s, at);
    if (hit == std::string_view::npos) {
      throw Error(ErrorCode::invalid_argument, "masked input is missing sentinel " + std::to_string(k));
    }
    out.append(masked_input.substr(at, hit - at));
    out += content[k];
    at = hit + s.size();
  }
  out.append(masked_input.substr(at));
  return out;
}

// ---- supervised fine-tuning format -----------------------------------------

inline constexpr std::string_view kCodeMarker = "<code>";
inline constexpr std::string_view kCriterionMarker = "<criterion>";
inline constexpr std::string_view kLineMarker = "<line>";
inline constexpr std::string_view kSliceMarker = "<slice>";

struct SftExample {
  std::string input_text;
  std::string target_text;
};

// "<code>\n1: ...\nN: ...\n<criterion> v <line> n <slice>"
inline std::string format_sft_input(const SliceQuery& q) {
  std::string out(kCodeMarker);
  out += '\n';
  for (const auto& l : q.unit.lines) out += std::to_string(l.number) + ": " + l.text + "\n";
  out += std::string(kCriterionMarker) + " " + q.criterion_var + " " + std::string(kLineMarker) +
         " " + std::to_string(q.criterion_line) + " " + std::string(kSliceMarker);
  return out;
}

inline SftExample format_sft(const SliceQuery& q, const Slice& gold) {
  for (std::size_t i = 0; i < gold.line_numbers.size(); ++i) {
    int n = gold.line_numbers[i];
    if (!q.unit.has_line(n) || q.unit.line(n).text != gold.lines[i]) {
      throw Error(ErrorCode::invalid_slice,
                  "gold line " + std::to_string(n) + " is not a line of the query");
    }
    if (i && gold.line_numbers[i - 1] >= n) {
      throw Error(ErrorCode::invalid_slice, "gold lines are not strictly increasing");
    }
  }
  return {format_sft_input(q), gold.numbered_text()};
}

struct SftInput {
  std::string code;
  std::string criterion_var;
  int criterion_line = 0;
};

inline SftInput parse_sft_input(std::string_view input) {
  auto fail = [](const std::string& what) { return Error(ErrorCode::invalid_argument, what); };
  std::string head = std::string(kCodeMarker) + "\n";
  if (input.substr(0, head.size()) != head) throw fail("input does not start with the code marker");
  std::string crit = std::string(kCriterionMarker) + " ";
  std::size_t at = input.rfind(crit);
  if (at == std::string_view::npos) throw fail("input has no criterion marker");
  std::string_view body = input.substr(head.size(), at - head.size());
  std::string_view tail = input.substr(at + crit.size());
  std::string line_marker = " " + std::string(kLineMarker) + " ";
  std::size_t lm = tail.find(line_marker);
  std::string slice_marker = " " + std::string(kSliceMarker);
  std::size_t sm = tail.rfind(slice_marker);
  if (lm == std::string_view::npos || sm == std::string_view::npos || sm < lm) {
    throw fail("malformed criterion section");
  }
  SftInput out;
  out.criterion_var = std::string(tail.substr(0, lm));
  out.criterion_line = std::stoi(std::string(tail.substr(lm + line_marker.size(), sm - lm - line_marker.size())));
  if (!body.empty() && body.back() == '\n') body.remove_suffix(1);
  out.code = strip_line_numbers(body);
  return out;
}

}  // namespace slicekit
