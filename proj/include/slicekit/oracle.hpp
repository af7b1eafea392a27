#pragma once

// Reference backward slicer: reachability over data dependences, enclosing
// construct headers and variable declarations, at statement level.

#include <algorithm>
#include <deque>
#include <set>
#include <string>
#include <vector>

#include "slicekit/dfg.hpp"
#include "slicekit/slice.hpp"

namespace slicekit {

namespace detail {

// Scope owner of a declaring statement: a header declares into its own
// body (for-init, parameters, catch), anything else into its block.
inline std::size_t declaration_scope(const SourceUnit& unit, std::size_t stmt) {
  const Statement& s = unit.statements[stmt];
  return is_header(s.kind) ? stmt : s.parent;
}

inline bool encloses(const SourceUnit& unit, std::size_t scope, std::size_t stmt) {
  if (scope == npos) return true;
  for (std::size_t s = stmt; s != npos; s = unit.statements[s].parent) {
    if (s == scope) return true;
  }
  return false;
}

}  // namespace detail

// Statement holding the nearest in-scope declaration of `name` visible at
// `stmt`, or npos.
inline std::size_t declaring_statement(const SourceUnit& unit, const DataFlowGraph& dfg,
                                       const std::string& name, std::size_t stmt) {
  std::size_t best = npos;
  for (const auto& v : dfg.nodes) {
    if (!v.declaration || v.name != name || v.statement_index > stmt) continue;
    std::size_t scope = detail::declaration_scope(unit, v.statement_index);
    if (!detail::encloses(unit, scope, stmt)) continue;
    if (best == npos || v.statement_index > best) best = v.statement_index;
  }
  return best;
}

// Occurrences of the criterion variable on the criterion line.
inline std::vector<std::size_t> criterion_occurrences(const SliceQuery& q, const DataFlowGraph& dfg) {
  std::vector<std::size_t> out;
  for (const auto& v : dfg.nodes) {
    if (v.name != q.criterion_var) continue;
    if (q.unit.line_of(v.begin) == q.criterion_line) out.push_back(v.id);
  }
  return out;
}

inline Slice oracle_slice(const SliceQuery& q, const DataFlowGraph& dfg) {
  const SourceUnit& unit = q.unit;
  if (!unit.has_line(q.criterion_line)) {
    throw Error(ErrorCode::criterion_not_found,
                "line " + std::to_string(q.criterion_line) + " does not exist");
  }
  std::vector<std::size_t> seeds = criterion_occurrences(q, dfg);
  if (seeds.empty()) {
    throw Error(ErrorCode::criterion_not_found, "'" + q.criterion_var + "' does not occur on line " +
                                                    std::to_string(q.criterion_line));
  }

  std::vector<bool> included(unit.statements.size(), false);
  std::deque<std::size_t> work;
  auto include = [&](std::size_t s) {
    if (s == npos || included[s]) return;
    included[s] = true;
    work.push_back(s);
  };

  // Inside the criterion statement only the criterion occurrences and what
  // they are computed from matter.
  std::set<std::size_t> relevant(seeds.begin(), seeds.end());
  std::deque<std::size_t> local(seeds.begin(), seeds.end());
  std::set<std::size_t> criterion_stmts;
  while (!local.empty()) {
    std::size_t v = local.front();
    local.pop_front();
    std::size_t stmt = dfg.nodes[v].statement_index;
    criterion_stmts.insert(stmt);
    for (const auto& e : dfg.edges) {
      if (e.dst != v) continue;
      std::size_t src_stmt = dfg.nodes[e.src].statement_index;
      if (e.kind == EdgeKind::computed_from && src_stmt == stmt) {
        if (relevant.insert(e.src).second) local.push_back(e.src);
      } else if (e.kind == EdgeKind::comes_from) {
        include(src_stmt);
      }
    }
  }
  for (auto v : relevant) {
    std::size_t stmt = dfg.nodes[v].statement_index;
    include(declaring_statement(unit, dfg, dfg.nodes[v].name, stmt));
  }
  for (auto stmt : criterion_stmts) {
    const Statement& s = unit.statements[stmt];
    include(s.parent);
    include(s.chained_from);
    if (!included[stmt]) included[stmt] = true;  // closed over locally above
  }

  while (!work.empty()) {
    std::size_t stmt = work.front();
    work.pop_front();
    const Statement& s = unit.statements[stmt];
    include(s.parent);
    include(s.chained_from);
    for (const auto& v : dfg.nodes) {
      if (v.statement_index != stmt) continue;
      include(declaring_statement(unit, dfg, v.name, stmt));
      for (const auto& e : dfg.edges) {
        if (e.dst == v.id && e.kind == EdgeKind::comes_from) {
          include(dfg.nodes[e.src].statement_index);
        }
      }
    }
  }

  std::vector<int> lines;
  for (std::size_t i = 0; i < included.size(); ++i) {
    if (!included[i]) continue;
    const auto& ln = unit.statements[i].line_numbers;
    lines.insert(lines.end(), ln.begin(), ln.end());
  }
  return slice_from_lines(unit, std::move(lines));
}

inline Slice oracle_slice(const SliceQuery& q) {
  return oracle_slice(q, build_dfg(q.unit, parse(q.unit.text, q.unit.lang)));
}

}  // namespace slicekit
