#pragma once

// Variable-level data-flow graph over syntax-tree identifier leaves, built
// with a reaching-definitions walk (may-analysis across branches, one
// back-edge iteration for loops).

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicekit/source_unit.hpp"

namespace slicekit {

enum class Role { definition, use };

inline std::string_view to_string(Role r) { return r == Role::definition ? "definition" : "use"; }

struct VarOccurrence {
  std::size_t id = 0;
  std::string name;
  std::size_t statement_index = 0;
  std::size_t begin = 0;  // absolute character offsets
  std::size_t end = 0;
  Role role = Role::use;
  bool declaration = false;  // introduces the name (declarator, parameter)
};

enum class EdgeKind { comes_from, computed_from };

inline std::string_view to_string(EdgeKind k) {
  return k == EdgeKind::comes_from ? "comes_from" : "computed_from";
}

struct DfgEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  EdgeKind kind = EdgeKind::comes_from;

  auto operator<=>(const DfgEdge&) const = default;
};

struct DataFlowGraph {
  std::vector<VarOccurrence> nodes;
  std::vector<DfgEdge> edges;  // sorted, unique

  std::vector<std::size_t> sources(std::size_t v) const {
    std::vector<std::size_t> out;
    for (const auto& e : edges) {
      if (e.dst == v) out.push_back(e.src);
    }
    return out;
  }
  std::vector<std::size_t> targets(std::size_t v) const {
    std::vector<std::size_t> out;
    for (const auto& e : edges) {
      if (e.src == v) out.push_back(e.dst);
    }
    return out;
  }
  std::vector<std::size_t> in_statement(std::size_t stmt) const {
    std::vector<std::size_t> out;
    for (const auto& n : nodes) {
      if (n.statement_index == stmt) out.push_back(n.id);
    }
    return out;
  }
};

inline nlohmann::json to_json(const DataFlowGraph& g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : g.nodes) {
    nodes.push_back({{"id", n.id},
                     {"name", n.name},
                     {"stmt", n.statement_index},
                     {"span", {n.begin, n.end}},
                     {"role", to_string(n.role)}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges) {
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"kind", to_string(e.kind)}});
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

namespace detail {

class DfgBuilder {
 public:
  DfgBuilder(const SourceUnit& unit, const SyntaxTree& tree) : unit_(unit), tree_(tree) {}

  DataFlowGraph run() {
    if (!tree_.empty()) {
      collect_bound_names(tree_.root());
      walk(tree_.root());
    }
    return finish();
  }

 private:
  using State = std::map<std::string, std::set<std::size_t>>;

  static void merge(State& into, const State& from) {
    for (const auto& [name, defs] : from) into[name].insert(defs.begin(), defs.end());
  }

  const SyntaxNode& node(std::size_t id) const { return tree_.node(id); }

  std::string_view text(std::size_t id) const {
    const auto& n = node(id);
    return std::string_view(unit_.text).substr(n.begin, n.end - n.begin);
  }

  // Names that are ever bound in the unit. Receivers outside this set
  // ("System", "Math") are taken to be type names.
  void collect_bound_names(std::size_t id) {
    const auto& n = node(id);
    auto bind = [&](std::size_t c) {
      if (node(c).label == "identifier") bound_.insert(std::string(base_name(c)));
    };
    if (n.label == "variable_declarator" || n.label == "formal_parameter" ||
        n.label == "catch_formal_parameter" || n.label == "parameter" ||
        n.label == "enhanced_for_statement" || n.label == "lambda_parameters" ||
        n.label == "inferred_parameters" || n.label == "aliased_import" ||
        n.label == "import_statement" || n.label == "import_from_statement" ||
        n.label == "except_clause") {
      for (auto c : n.children) {
        if (node(c).field == Field::name) bind(c);
      }
    }
    if (n.label == "lambda_expression") {
      for (auto c : n.children) {
        if (node(c).label == "identifier" && node(c).field != Field::body) bind(c);
      }
    }
    if (n.label == "assignment_expression" || n.label == "assignment" ||
        n.label == "augmented_assignment" || n.label == "named_expression" ||
        n.label == "for_statement" || n.label == "for_in_clause" || n.label == "with_item") {
      for (auto c : n.children) {
        if (node(c).field == Field::left) collect_targets(c);
      }
    }
    for (auto c : n.children) collect_bound_names(c);
  }

  void collect_targets(std::size_t id) {
    const auto& n = node(id);
    if (n.label == "identifier") {
      bound_.insert(std::string(base_name(id)));
      return;
    }
    for (auto c : n.children) {
      if (node(c).field == Field::field || node(c).field == Field::index) continue;
      collect_targets(c);
    }
  }

  std::string_view base_name(std::size_t id) const {
    std::string_view t = node(id).text;
    auto dot = t.find('.');
    return dot == std::string_view::npos ? t : t.substr(0, dot);
  }

  std::size_t occurrence(std::size_t leaf, Role role, bool declaration = false) {
    const auto& n = node(leaf);
    auto key = std::make_pair(n.begin, role);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    VarOccurrence v;
    v.id = occ_.size();
    v.name = std::string(base_name(leaf));
    v.begin = n.begin;
    v.end = n.begin + v.name.size();
    v.role = role;
    v.declaration = declaration;
    std::size_t stmt = unit_.statement_at(n.begin);
    if (stmt == npos) {
      // Falls between statements after recovery; attach to the nearest
      // preceding one.
      stmt = 0;
      for (const auto& s : unit_.statements) {
        if (s.begin <= n.begin) stmt = s.index;
      }
    }
    v.statement_index = stmt;
    occ_.push_back(std::move(v));
    memo_.emplace(key, occ_.back().id);
    return occ_.back().id;
  }

  void use(std::size_t leaf) {
    std::size_t u = occurrence(leaf, Role::use);
    auto it = state_.find(occ_[u].name);
    if (it != state_.end()) {
      for (auto d : it->second) edges_.insert({d, u, EdgeKind::comes_from});
    }
    if (collect_) collected_.push_back(u);
  }

  std::size_t define(std::size_t leaf, bool declaration = false) {
    std::size_t d = occurrence(leaf, Role::definition, declaration);
    state_[occ_[d].name] = {d};
    return d;
  }

  // Adds computed_from edges from every use collected since `mark`.
  void computed(std::size_t mark, std::size_t def) {
    for (std::size_t i = mark; i < collected_.size(); ++i) {
      std::size_t u = collected_[i];
      if (occ_[u].statement_index == occ_[def].statement_index) {
        edges_.insert({u, def, EdgeKind::computed_from});
      }
    }
  }

  std::size_t child(std::size_t id, Field f) const {
    for (auto c : node(id).children) {
      if (node(c).field == f) return c;
    }
    return npos;
  }

  std::vector<std::size_t> children(std::size_t id, Field f) const {
    std::vector<std::size_t> out;
    for (auto c : node(id).children) {
      if (node(c).field == f) out.push_back(c);
    }
    return out;
  }

  void walk_opt(std::size_t id) {
    if (id != npos) walk(id);
  }

  // Assignment-style target: returns the defined occurrence, after emitting
  // uses for index expressions and for partially-updated bases.
  void target(std::size_t id, std::vector<std::size_t>& defs, bool self_use) {
    const auto& n = node(id);
    const std::string& l = n.label;
    if (l == "identifier") {
      if (self_use) use(id);
      defs.push_back(id);
      return;
    }
    if (l == "array_access" || l == "subscript") {
      for (auto c : children(id, Field::index)) walk(c);
      std::size_t base = child(id, Field::object);
      if (base != npos) partial_target(base, defs);
      return;
    }
    if (l == "field_access" || l == "attribute") {
      std::size_t base = child(id, Field::object);
      if (base != npos) partial_target(base, defs);
      return;
    }
    if (l == "expression_list" || l == "tuple" || l == "list" || l == "parenthesized_expression" ||
        l == "list_splat" || l == "pattern_list") {
      for (auto c : n.children) target(c, defs, self_use);
      return;
    }
    walk(id);
  }

  // `a[i] = v`, `a.f = v`: the base is both read and (partially) written.
  void partial_target(std::size_t base, std::vector<std::size_t>& defs) {
    const auto& b = node(base);
    if (b.label == "identifier") {
      if (bound_.count(std::string(base_name(base)))) {
        use(base);
        defs.push_back(base);
      }
      return;
    }
    if (b.label == "array_access" || b.label == "subscript" || b.label == "field_access" ||
        b.label == "attribute") {
      target(base, defs, false);
      return;
    }
    walk(base);
  }

  void define_all(const std::vector<std::size_t>& leaves, std::size_t mark, bool declaration) {
    for (auto leaf : leaves) {
      std::size_t d = define(leaf, declaration);
      computed(mark, d);
    }
  }

  void assignment(std::size_t id) {
    const auto& n = node(id);
    bool compound = n.label == "augmented_assignment" || (!n.text.empty() && n.text != "=");
    std::size_t left = child(id, Field::left);
    std::size_t right = child(id, Field::right);
    std::size_t mark = begin_collect();
    // `a = b = c`: the innermost value flows into every target.
    std::vector<std::size_t> lefts;
    if (left != npos) lefts.push_back(left);
    while (right != npos && node(right).label == "assignment" && node(right).text.empty()) {
      std::size_t l2 = child(right, Field::left);
      if (l2 != npos) lefts.push_back(l2);
      right = child(right, Field::right);
    }
    walk_opt(right);
    std::vector<std::size_t> defs;
    for (auto l : lefts) target(l, defs, compound);
    end_collect();
    define_all(defs, mark, false);
  }

  std::size_t begin_collect() {
    ++collect_;
    return collected_.size();
  }
  void end_collect() { --collect_; }

  void declarator(std::size_t id) {
    std::size_t name = child(id, Field::name);
    std::size_t mark = begin_collect();
    walk_opt(child(id, Field::value));
    end_collect();
    if (name != npos) {
      std::size_t d = define(name, true);
      computed(mark, d);
    }
  }

  void branches(std::size_t id) {
    // if / elif / else chain: each arm starts from the post-condition state.
    walk_opt(child(id, Field::condition));
    State entry = state_;
    State out;
    walk_opt(child(id, Field::consequence));
    walk_opt(child(id, Field::body));
    out = state_;
    bool has_else = false;
    for (auto alt : children(id, Field::alternative)) {
      state_ = entry;
      const auto& a = node(alt);
      if (a.label == "elif_clause") {
        walk_opt(child(alt, Field::condition));
        entry = state_;
        walk_opt(child(alt, Field::body));
      } else {
        has_else = true;
        for (auto c : a.children) walk(c);
      }
      merge(out, state_);
    }
    if (!has_else) merge(out, entry);
    state_ = std::move(out);
  }

  // Runs `body` twice so that uses see definitions from the previous
  // iteration; the exit state joins the entry state.
  template <class F>
  void loop(F&& body) {
    State entry = state_;
    body();
    State again = entry;
    merge(again, state_);
    state_ = std::move(again);
    body();
    merge(state_, entry);
  }

  void scoped_function(std::size_t id) {
    // Defaults are evaluated in the enclosing scope.
    std::size_t params = child(id, Field::parameters);
    if (params != npos) {
      for (auto p : node(params).children) {
        walk_opt(child(p, Field::value));
      }
    }
    State saved = std::move(state_);
    state_.clear();
    if (params != npos) {
      for (auto p : node(params).children) {
        std::size_t name = node(p).label == "identifier" ? p : child(p, Field::name);
        if (name != npos && node(name).label == "identifier") define(name, true);
      }
    }
    walk_opt(child(id, Field::body));
    state_ = std::move(saved);
  }

  void walk(std::size_t id) {
    const auto& n = node(id);
    const std::string& l = n.label;

    if (l == "identifier") {
      if (n.field == Field::name || n.field == Field::field || n.field == Field::type) return;
      use(id);
      return;
    }
    if (l == "type" || l == "modifiers" || l == "dotted_name" || l == "import_declaration") return;

    if (l == "variable_declarator") return declarator(id);
    if (l == "assignment_expression" || l == "assignment" || l == "augmented_assignment") {
      return assignment(id);
    }
    if (l == "named_expression") {
      std::size_t mark = begin_collect();
      walk_opt(child(id, Field::right));
      end_collect();
      std::size_t left = child(id, Field::left);
      if (left != npos) computed(mark, define(left));
      return;
    }
    if (l == "update_expression") {
      std::size_t v = child(id, Field::value);
      if (v == npos) return;
      std::vector<std::size_t> defs;
      std::size_t mark = begin_collect();
      target(v, defs, true);
      end_collect();
      define_all(defs, mark, false);
      return;
    }
    if (l == "method_invocation" || l == "call") {
      std::size_t callee = child(id, Field::name);
      std::size_t object = child(id, Field::object);
      if (object != npos) receiver(object);
      if (callee != npos && node(callee).label != "identifier") walk(callee);
      walk_opt(child(id, Field::arguments));
      return;
    }
    if (l == "field_access" || l == "attribute") {
      std::size_t object = child(id, Field::object);
      if (object != npos) receiver(object);
      return;
    }
    if (l == "method_reference") {
      std::size_t object = child(id, Field::object);
      if (object != npos) receiver(object);
      return;
    }
    if (l == "if_statement") return branches(id);
    if (l == "ternary_expression" || l == "conditional_expression") {
      for (auto c : n.children) walk(c);
      return;
    }
    if (l == "for_statement" && tree_.lang() == Lang::java) {
      for (auto c : children(id, Field::init)) walk(c);
      loop([&] {
        walk_opt(child(id, Field::condition));
        walk_opt(child(id, Field::body));
        for (auto c : children(id, Field::update)) walk(c);
      });
      return;
    }
    if (l == "enhanced_for_statement" || l == "for_statement") {
      // for (T x : xs) / for x in xs
      std::size_t mark = begin_collect();
      walk_opt(child(id, Field::iterable));
      end_collect();
      std::size_t body = child(id, Field::body);
      std::size_t name = child(id, Field::name);
      std::size_t left = child(id, Field::left);
      loop([&] {
        if (name != npos) computed(mark, define(name, true));
        if (left != npos) {
          std::vector<std::size_t> defs;
          target(left, defs, false);
          define_all(defs, mark, false);
        }
        walk_opt(body);
      });
      for (auto alt : children(id, Field::alternative)) walk(alt);
      return;
    }
    if (l == "while_statement") {
      loop([&] {
        walk_opt(child(id, Field::condition));
        walk_opt(child(id, Field::body));
      });
      for (auto alt : children(id, Field::alternative)) walk(alt);
      return;
    }
    if (l == "do_statement") {
      loop([&] {
        walk_opt(child(id, Field::body));
        walk_opt(child(id, Field::condition));
      });
      return;
    }
    if (l == "try_statement") {
      for (auto c : children(id, Field::init)) walk(c);
      State entry = state_;
      walk_opt(child(id, Field::body));
      State after_try = state_;
      State handler_entry = entry;
      merge(handler_entry, after_try);
      State out = after_try;
      std::size_t finally = npos;
      for (auto alt : children(id, Field::alternative)) {
        const auto& a = node(alt);
        if (a.label == "finally_clause") {
          finally = alt;
          continue;
        }
        state_ = a.label == "else_clause" ? after_try : handler_entry;
        walk(alt);
        merge(out, state_);
      }
      state_ = std::move(out);
      if (finally != npos) {
        for (auto c : node(finally).children) walk(c);
      }
      return;
    }
    if (l == "catch_formal_parameter" || l == "except_clause") {
      std::size_t name = child(id, Field::name);
      if (name != npos) define(name, true);
      if (l == "except_clause") walk_opt(child(id, Field::body));
      return;
    }
    if (l == "switch_statement") {
      walk_opt(child(id, Field::condition));
      State entry = state_;
      std::size_t body = child(id, Field::body);
      if (body != npos) {
        for (auto c : node(body).children) {
          if (node(c).label == "switch_label") merge(state_, entry);
          walk(c);
        }
      }
      merge(state_, entry);
      return;
    }
    if (l == "method_declaration" || l == "constructor_declaration" ||
        l == "function_definition") {
      return scoped_function(id);
    }
    if (l == "lambda_expression" || l == "lambda") {
      State saved = state_;
      std::size_t params = child(id, Field::parameters);
      if (params != npos) {
        const auto& p = node(params);
        if (p.label == "identifier") {
          define(params, true);
        } else {
          for (auto c : p.children) {
            std::size_t name = node(c).label == "identifier"
                                   ? (node(c).field == Field::name ? c : npos)
                                   : child(c, Field::name);
            if (name != npos) define(name, true);
          }
        }
      }
      walk_opt(child(id, Field::body));
      state_ = std::move(saved);
      return;
    }
    if (l == "class_declaration" || l == "class_definition") {
      walk_opt(child(id, Field::arguments));
      walk_opt(child(id, Field::body));
      return;
    }
    if (l == "keyword_argument") {
      walk_opt(child(id, Field::value));
      return;
    }
    if (l == "with_item") {
      std::size_t mark = begin_collect();
      walk_opt(child(id, Field::value));
      end_collect();
      std::size_t left = child(id, Field::left);
      if (left != npos) {
        std::vector<std::size_t> defs;
        target(left, defs, false);
        define_all(defs, mark, false);
      }
      return;
    }
    if (l == "import_statement" || l == "import_from_statement" || l == "aliased_import") {
      for (auto c : n.children) {
        if (node(c).field == Field::name && node(c).label == "identifier") define(c, true);
        if (node(c).label == "aliased_import") walk(c);
      }
      return;
    }
    if (l == "list_comprehension" || l == "set_comprehension" || l == "generator_expression" ||
        l == "dictionary_comprehension") {
      for (auto c : n.children) {
        if (node(c).label == "for_in_clause") walk(c);
      }
      walk_opt(child(id, Field::body));
      return;
    }
    if (l == "for_in_clause") {
      std::size_t mark = begin_collect();
      walk_opt(child(id, Field::iterable));
      end_collect();
      std::size_t left = child(id, Field::left);
      if (left != npos) {
        std::vector<std::size_t> defs;
        target(left, defs, false);
        define_all(defs, mark, false);
      }
      for (auto c : n.children) {
        if (node(c).label == "if_clause") walk(c);
      }
      return;
    }
    if (l == "parameters" || l == "formal_parameters") return;

    for (auto c : n.children) walk(c);
  }

  void receiver(std::size_t object) {
    const auto& o = node(object);
    if (o.label == "identifier") {
      if (bound_.count(std::string(base_name(object)))) use(object);
      return;
    }
    walk(object);
  }

  DataFlowGraph finish() {
    // Stable ids: order by statement, then position, uses before defs.
    std::vector<std::size_t> order(occ_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& x = occ_[a];
      const auto& y = occ_[b];
      return std::tuple(x.statement_index, x.begin, x.role == Role::definition) <
             std::tuple(y.statement_index, y.begin, y.role == Role::definition);
    });
    std::vector<std::size_t> remap(occ_.size());
    DataFlowGraph g;
    for (std::size_t k = 0; k < order.size(); ++k) {
      remap[order[k]] = k;
      g.nodes.push_back(occ_[order[k]]);
      g.nodes.back().id = k;
    }
    std::set<DfgEdge> edges;
    for (const auto& e : edges_) edges.insert({remap[e.src], remap[e.dst], e.kind});
    g.edges.assign(edges.begin(), edges.end());
    return g;
  }

  const SourceUnit& unit_;
  const SyntaxTree& tree_;
  State state_;
  std::vector<VarOccurrence> occ_;
  std::map<std::pair<std::size_t, Role>, std::size_t> memo_;
  std::set<DfgEdge> edges_;
  std::set<std::string> bound_;
  int collect_ = 0;
  std::vector<std::size_t> collected_;
};

}  // namespace detail

inline DataFlowGraph build_dfg(const SourceUnit& unit, const SyntaxTree& tree) {
  return detail::DfgBuilder(unit, tree).run();
}

// Parses `unit.text` again; use the two-argument form when a tree is at hand.
inline DataFlowGraph build_dfg(const SourceUnit& unit) {
  return build_dfg(unit, parse(unit.text, unit.lang));
}

// Syntactic basic-block test for the statement-permutation swap predicate.
inline bool same_basic_block(const SourceUnit& unit, std::size_t i, std::size_t j) {
  if (i >= j || j >= unit.statements.size()) return false;
  auto movable = [](StmtKind k) { return k == StmtKind::simple || k == StmtKind::declaration; };
  const Statement& a = unit.statements[i];
  const Statement& b = unit.statements[j];
  if (!movable(a.kind) || !movable(b.kind)) return false;
  if (a.nesting_depth != b.nesting_depth || a.parent != b.parent) return false;
  for (std::size_t k = i + 1; k < j; ++k) {
    const Statement& s = unit.statements[k];
    if (!movable(s.kind) || s.nesting_depth != a.nesting_depth || s.parent != a.parent) return false;
  }
  return true;
}

}  // namespace slicekit
