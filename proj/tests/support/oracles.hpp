#pragma once

// Independent reference implementations used as test oracles.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "slicekit/slicekit.hpp"
#include "support/progen.hpp"

namespace testkit {

using slicekit::DataFlowGraph;
using slicekit::LabeledTree;
using slicekit::SourceUnit;

// ---- reaching definitions --------------------------------------------------

using DefUse = std::tuple<std::size_t, std::size_t, std::string>;  // (def stmt, use stmt, name)

// Round-robin fixpoint over the straight-line CFG with gen/kill sets.
inline std::set<DefUse> reaching_def_uses(const GenProgram& p) {
  std::size_t n = p.stmts.size();
  using Defs = std::set<std::pair<std::string, std::size_t>>;
  std::vector<Defs> in(n), out(n);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      Defs nin = i ? out[i - 1] : Defs{};
      Defs nout;
      for (const auto& d : nin) {
        if (!p.stmts[i].defs.count(d.first)) nout.insert(d);
      }
      for (const auto& v : p.stmts[i].defs) nout.insert({v, i});
      if (nin != in[i] || nout != out[i]) {
        in[i] = std::move(nin);
        out[i] = std::move(nout);
        changed = true;
      }
    }
  }
  std::set<DefUse> result;
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& u : p.stmts[j].uses) {
      for (const auto& [name, i] : in[j]) {
        if (name == u) result.insert({i, j, u});
      }
    }
  }
  return result;
}

inline std::set<DefUse> dfg_def_uses(const DataFlowGraph& dfg) {
  std::set<DefUse> out;
  for (const auto& e : dfg.edges) {
    if (e.kind != slicekit::EdgeKind::comes_from) continue;
    const auto& s = dfg.nodes[e.src];
    const auto& d = dfg.nodes[e.dst];
    out.insert({s.statement_index, d.statement_index, s.name});
  }
  return out;
}

// ---- dependence closure ----------------------------------------------------

// Backward closure on a straight-line program from its own facts: the
// criterion statement contributes the criterion variable (and, when it
// defines it, everything it is computed from); other included statements
// contribute all their uses. Every involved name pulls in its nearest
// earlier declaration.
inline std::set<int> closure_slice(const GenProgram& p, const std::string& var, std::size_t stmt) {
  auto last_def_before = [&](const std::string& name, std::size_t at) -> long {
    for (long i = static_cast<long>(at) - 1; i >= 0; --i) {
      if (p.stmts[static_cast<std::size_t>(i)].defs.count(name)) return i;
    }
    return -1;
  };
  auto declaration_of = [&](const std::string& name, std::size_t at) -> long {
    for (long i = static_cast<long>(at); i >= 0; --i) {
      const auto& s = p.stmts[static_cast<std::size_t>(i)];
      if (s.declares && s.defs.count(name)) return i;
    }
    return -1;
  };

  // Materialized dependence relation: deps[s] = statements s depends on.
  std::size_t n = p.stmts.size();
  std::vector<std::set<std::size_t>> deps(n);
  for (std::size_t s = 0; s < n; ++s) {
    for (const auto& u : p.stmts[s].uses) {
      long d = last_def_before(u, s);
      if (d >= 0) deps[s].insert(static_cast<std::size_t>(d));
    }
    std::set<std::string> names = p.stmts[s].uses;
    names.insert(p.stmts[s].defs.begin(), p.stmts[s].defs.end());
    for (const auto& v : names) {
      long d = declaration_of(v, s);
      if (d >= 0 && static_cast<std::size_t>(d) != s) deps[s].insert(static_cast<std::size_t>(d));
    }
  }

  std::set<std::size_t> seeds;
  const GenStmt& c = p.stmts[stmt];
  std::set<std::string> relevant{var};
  if (c.defs.count(var)) relevant.insert(c.uses.begin(), c.uses.end());
  for (const auto& v : relevant) {
    if (c.uses.count(v)) {
      long d = last_def_before(v, stmt);
      if (d >= 0) seeds.insert(static_cast<std::size_t>(d));
    }
    long decl = declaration_of(v, stmt);
    if (decl >= 0 && static_cast<std::size_t>(decl) != stmt) seeds.insert(static_cast<std::size_t>(decl));
  }

  std::set<std::size_t> reach{stmt};
  std::vector<std::size_t> frontier(seeds.begin(), seeds.end());
  while (!frontier.empty()) {
    std::size_t s = frontier.back();
    frontier.pop_back();
    if (!reach.insert(s).second) continue;
    for (auto d : deps[s]) frontier.push_back(d);
  }
  std::set<int> lines;
  for (auto s : reach) lines.insert(static_cast<int>(s) + 1);
  return lines;
}

// ---- independent statement pairs --------------------------------------------

inline bool movable(const slicekit::Statement& s) {
  return s.kind == slicekit::StmtKind::simple || s.kind == slicekit::StmtKind::declaration;
}

// Scans every occurrence pair of every statement pair against the whole
// edge list.
inline std::set<std::pair<std::size_t, std::size_t>> brute_force_pairs(const SourceUnit& unit,
                                                                        const DataFlowGraph& dfg) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  std::size_t n = unit.statements.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = unit.statements[i];
      const auto& b = unit.statements[j];
      bool block = movable(a) && movable(b) && a.parent == b.parent && a.nesting_depth == b.nesting_depth;
      for (std::size_t k = i + 1; block && k < j; ++k) {
        const auto& m = unit.statements[k];
        block = movable(m) && m.parent == a.parent && m.nesting_depth == a.nesting_depth;
      }
      if (!block) continue;
      bool edge = false;
      for (const auto& u : dfg.nodes) {
        if (u.statement_index != i) continue;
        for (const auto& w : dfg.nodes) {
          if (w.statement_index != j) continue;
          for (const auto& e : dfg.edges) {
            if ((e.src == u.id && e.dst == w.id) || (e.src == w.id && e.dst == u.id)) edge = true;
          }
        }
      }
      if (!edge) out.insert({i, j});
    }
  }
  return out;
}

// ---- tree edit distance ----------------------------------------------------

inline LabeledTree random_tree(slicekit::Rng& rng, std::size_t max_nodes, std::size_t alphabet = 4) {
  LabeledTree t;
  std::size_t n = 1 + slicekit::uniform_index(rng, max_nodes);
  auto label = [&] { return std::string(1, static_cast<char>('A' + slicekit::uniform_index(rng, alphabet))); };
  t.add(label());
  for (std::size_t i = 1; i < n; ++i) t.add(label(), slicekit::uniform_index(rng, t.size()));
  return t;
}

// Memoized recursion on ordered forests, removing rightmost roots.
class ForestDistance {
 public:
  ForestDistance(const LabeledTree& a, const LabeledTree& b) : a_(a), b_(b) {
    size_a_ = sizes(a_);
    size_b_ = sizes(b_);
  }

  int distance() {
    std::vector<std::size_t> fa;
    std::vector<std::size_t> fb;
    if (!a_.empty()) fa.push_back(0);
    if (!b_.empty()) fb.push_back(0);
    return d(fa, fb);
  }

 private:
  static std::vector<int> sizes(const LabeledTree& t) {
    std::vector<int> s(t.size(), 1);
    for (std::size_t i = t.size(); i-- > 0;) {
      for (auto c : t.children[i]) s[i] += s[c];
    }
    return s;
  }

  int forest_size(const std::vector<std::size_t>& f, const std::vector<int>& sz) const {
    int n = 0;
    for (auto r : f) n += sz[r];
    return n;
  }

  int d(const std::vector<std::size_t>& f, const std::vector<std::size_t>& g) {
    if (f.empty()) return forest_size(g, size_b_);
    if (g.empty()) return forest_size(f, size_a_);
    auto key = std::make_pair(f, g);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    std::size_t v = f.back();
    std::size_t w = g.back();
    std::vector<std::size_t> f_minus_v(f.begin(), f.end() - 1);
    f_minus_v.insert(f_minus_v.end(), a_.children[v].begin(), a_.children[v].end());
    std::vector<std::size_t> g_minus_w(g.begin(), g.end() - 1);
    g_minus_w.insert(g_minus_w.end(), b_.children[w].begin(), b_.children[w].end());
    std::vector<std::size_t> f_rest(f.begin(), f.end() - 1);
    std::vector<std::size_t> g_rest(g.begin(), g.end() - 1);

    int best = d(f_minus_v, g) + 1;
    best = std::min(best, d(f, g_minus_w) + 1);
    best = std::min(best, d(a_.children[v], b_.children[w]) + d(f_rest, g_rest) +
                              (a_.labels[v] == b_.labels[w] ? 0 : 1));
    memo_.emplace(std::move(key), best);
    return best;
  }

  const LabeledTree& a_;
  const LabeledTree& b_;
  std::vector<int> size_a_;
  std::vector<int> size_b_;
  std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, int> memo_;
};

inline int brute_force_distance(const LabeledTree& a, const LabeledTree& b) {
  return ForestDistance(a, b).distance();
}

// Deletes the flagged nodes (children move up into their place) and
// serializes the remaining forest as nested labels.
inline std::string forest_after_removal(const LabeledTree& t, const std::vector<bool>& removed,
                                        const std::vector<std::string>& labels) {
  std::string out;
  auto emit = [&](auto&& self, std::size_t n) -> void {
    if (removed[n]) {
      for (auto c : t.children[n]) self(self, c);
      return;
    }
    out += "(" + labels[n];
    for (auto c : t.children[n]) self(self, c);
    out += ")";
  };
  if (!t.empty()) emit(emit, 0);
  return out;
}

// ---- unconstrained beam search ---------------------------------------------

// Literal reading: each beam proposes its K best tokens; EOS proposals
// finish, the rest compete for K slots by (score, beam, token). Runs until
// no beam is active or the length limit is hit; no early stopping.
inline std::vector<int> reference_beam_search(const slicekit::SliceQuery& q, slicekit::Scorer& scorer,
                                              const slicekit::Tokenizer& tok, int k, int max_len) {
  struct Hyp {
    std::vector<int> ids;
    double score;
  };
  std::string input = slicekit::format_sft_input(q);
  std::vector<int> all(static_cast<std::size_t>(tok.vocab_size()));
  for (int i = 0; i < tok.vocab_size(); ++i) all[static_cast<std::size_t>(i)] = i;
  auto session = scorer.session(tok.encode(input), all, input);
  std::vector<Hyp> beams{{{}, 0.0}};
  std::vector<Hyp> done;
  for (int step = 0; step < max_len && !beams.empty(); ++step) {
    std::vector<std::vector<int>> prefixes;
    for (const auto& b : beams) prefixes.push_back(b.ids);
    auto rows = scorer.step(session, prefixes);
    struct Cand {
      double score;
      std::size_t beam;
      int id;
    };
    std::vector<Cand> pool;
    for (std::size_t bi = 0; bi < beams.size(); ++bi) {
      std::vector<double> logits(all.size(), -INFINITY);
      for (const auto& s : rows[bi]) logits[static_cast<std::size_t>(s.id)] = s.logprob;
      double hi = *std::max_element(logits.begin(), logits.end());
      double z = 0.0;
      for (double l : logits) z += std::exp(l - hi);
      double lse = hi + std::log(z);
      std::vector<std::pair<double, int>> ranked;
      for (std::size_t i = 0; i < logits.size(); ++i) ranked.push_back({logits[i] - lse, static_cast<int>(i)});
      std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
        return x.first != y.first ? x.first > y.first : x.second < y.second;
      });
      for (int r = 0; r < k && r < static_cast<int>(ranked.size()); ++r) {
        double s = beams[bi].score + ranked[static_cast<std::size_t>(r)].first;
        int id = ranked[static_cast<std::size_t>(r)].second;
        if (id == tok.eos()) {
          auto ids = beams[bi].ids;
          ids.push_back(id);
          done.push_back({ids, s});
        } else {
          pool.push_back({s, bi, id});
        }
      }
    }
    std::sort(pool.begin(), pool.end(), [](const Cand& x, const Cand& y) {
      if (x.score != y.score) return x.score > y.score;
      if (x.beam != y.beam) return x.beam < y.beam;
      return x.id < y.id;
    });
    std::vector<Hyp> next;
    for (std::size_t i = 0; i < pool.size() && static_cast<int>(i) < k; ++i) {
      auto ids = beams[pool[i].beam].ids;
      ids.push_back(pool[i].id);
      next.push_back({ids, pool[i].score});
    }
    beams = std::move(next);
  }
  scorer.close(session);
  const std::vector<Hyp>& from = done.empty() ? beams : done;
  const Hyp* best = &from.front();
  for (const auto& h : from) {
    if (h.score > best->score ||
        (h.score == best->score && (h.ids.size() < best->ids.size() ||
                                    (h.ids.size() == best->ids.size() && h.ids < best->ids)))) {
      best = &h;
    }
  }
  std::vector<int> ids = best->ids;
  if (!done.empty()) ids.pop_back();
  return ids;
}

}  // namespace testkit
