#pragma once

// Ordered labeled tree edit distance (Zhang-Shasha, unit costs) with an
// edit-script backtrace.

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "slicekit/source_unit.hpp"
#include "slicekit/syntax_tree.hpp"

namespace slicekit {

// Plain ordered tree; node 0 is the root. Used for syntax trees and for the
// random trees of the property tests.
struct LabeledTree {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> children;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }

  std::size_t add(std::string label, std::size_t parent = npos) {
    labels.push_back(std::move(label));
    children.emplace_back();
    if (parent != npos) children[parent].push_back(labels.size() - 1);
    return labels.size() - 1;
  }
};

enum class LabelMode { symbol, symbol_text };

inline LabelMode parse_label_mode(std::string_view s) {
  if (s == "symbol") return LabelMode::symbol;
  if (s == "symbol+text") return LabelMode::symbol_text;
  throw Error(ErrorCode::invalid_argument, "unknown label mode '" + std::string(s) + "'");
}

// Copies the nodes reachable from the root. Error flags do not change a
// node's label.
inline LabeledTree to_labeled(const SyntaxTree& tree, LabelMode mode = LabelMode::symbol) {
  LabeledTree out;
  if (tree.empty()) return out;
  struct Item {
    std::size_t id;
    std::size_t parent;
  };
  std::vector<Item> stack{{tree.root(), npos}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    const SyntaxNode& n = tree.node(it.id);
    std::string label = n.label;
    if (mode == LabelMode::symbol_text && !n.text.empty()) label += ":" + n.text;
    std::size_t self = out.add(std::move(label), it.parent);
    for (auto c = n.children.rbegin(); c != n.children.rend(); ++c) stack.push_back({*c, self});
  }
  return out;
}

struct EditOp {
  enum class Kind { insert, remove, relabel };
  Kind kind = Kind::relabel;
  std::size_t x_node = npos;  // node of T_x (remove, relabel)
  std::size_t y_node = npos;  // node of T_y (insert, relabel)
  std::string from;
  std::string to;
};

struct EditScript {
  std::vector<EditOp> operations;
  double total_cost = 0.0;
};

namespace detail {

// Postorder view of a tree with interned labels, leftmost-leaf table and
// LR keyroots. Indices are 1-based postorder positions.
struct PostorderTree {
  std::vector<int> label;        // [1..n]
  std::vector<std::size_t> lml;  // leftmost leaf descendant
  std::vector<std::size_t> keyroots;
  std::vector<std::size_t> original;  // postorder position -> tree node id
  std::size_t n = 0;

  PostorderTree() = default;

  template <class Intern>
  PostorderTree(const LabeledTree& t, Intern&& intern) {
    n = t.size();
    label.assign(n + 1, 0);
    lml.assign(n + 1, 0);
    original.assign(n + 1, npos);
    if (n == 0) return;
    // Iterative postorder.
    std::vector<std::size_t> pos(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::size_t counter = 0;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < t.children[node].size()) {
        std::size_t c = t.children[node][next++];
        stack.push_back({c, 0});
        continue;
      }
      std::size_t k = ++counter;
      pos[node] = k;
      original[k] = node;
      label[k] = intern(t.labels[node]);
      lml[k] = t.children[node].empty() ? k : lml[pos[t.children[node].front()]];
      stack.pop_back();
    }
    // Keyroots: highest node for each distinct leftmost leaf.
    std::vector<std::size_t> seen(n + 1, 0);
    for (std::size_t k = n; k >= 1; --k) {
      if (!seen[lml[k]]) {
        seen[lml[k]] = k;
        keyroots.push_back(k);
      }
    }
    std::sort(keyroots.begin(), keyroots.end());
  }
};

class LabelInterner {
 public:
  int operator()(const std::string& s) {
    auto [it, inserted] = ids_.emplace(s, static_cast<int>(ids_.size()));
    return it->second;
  }
  int find(const std::string& s) const {
    auto it = ids_.find(s);
    return it == ids_.end() ? -1 : it->second;
  }
  std::size_t size() const { return ids_.size(); }

 private:
  std::unordered_map<std::string, int> ids_;
};

// Zhang-Shasha over two postorder trees. `td` is (n1+1) x (n2+1).
class ZhangShasha {
 public:
  ZhangShasha(const PostorderTree& a, const PostorderTree& b) : a_(a), b_(b) {
    td_.assign((a.n + 1) * (b.n + 1), 0);
    fd_.assign((a.n + 2) * (b.n + 2), 0);
  }

  int distance() {
    if (a_.n == 0 || b_.n == 0) return static_cast<int>(a_.n + b_.n);
    for (auto i : a_.keyroots) {
      for (auto j : b_.keyroots) forest(i, j);
    }
    return td(a_.n, b_.n);
  }

  // Requires distance() to have run.
  std::vector<EditOp> script(const LabeledTree& ta, const LabeledTree& tb) {
    std::vector<EditOp> ops;
    if (a_.n == 0 || b_.n == 0) {
      for (std::size_t i = 1; i <= a_.n; ++i) ops.push_back(remove_op(ta, i));
      for (std::size_t j = 1; j <= b_.n; ++j) ops.push_back(insert_op(tb, j));
      return ops;
    }
    std::vector<std::pair<std::size_t, std::size_t>> pending{{a_.n, b_.n}};
    while (!pending.empty()) {
      auto [i, j] = pending.back();
      pending.pop_back();
      forest(i, j);
      std::size_t li = a_.lml[i];
      std::size_t lj = b_.lml[j];
      std::size_t row = i;
      std::size_t col = j;
      while (row >= li || col >= lj) {
        int here = fd(row, col, li, lj);
        if (row >= li && fd(row - 1, col, li, lj) + 1 == here) {
          ops.push_back(remove_op(ta, row));
          --row;
        } else if (col >= lj && fd(row, col - 1, li, lj) + 1 == here) {
          ops.push_back(insert_op(tb, col));
          --col;
        } else if (a_.lml[row] == li && b_.lml[col] == lj) {
          if (a_.label[row] != b_.label[col]) {
            EditOp op;
            op.kind = EditOp::Kind::relabel;
            op.x_node = a_.original[row];
            op.y_node = b_.original[col];
            op.from = ta.labels[op.x_node];
            op.to = tb.labels[op.y_node];
            ops.push_back(std::move(op));
          }
          --row;
          --col;
        } else {
          pending.push_back({row, col});
          std::size_t nr = a_.lml[row] - 1;
          std::size_t nc = b_.lml[col] - 1;
          row = nr;
          col = nc;
        }
        if (row < li && col < lj) break;
      }
    }
    return ops;
  }

 private:
  int& td(std::size_t i, std::size_t j) { return td_[i * (b_.n + 1) + j]; }

  // Forest distance between a[li..row] and b[lj..col]; index li-1 / lj-1
  // stands for the empty forest.
  int& fd(std::size_t row, std::size_t col, std::size_t li, std::size_t lj) {
    std::size_t r = row + 1 - li;
    std::size_t c = col + 1 - lj;
    return fd_[r * (b_.n + 2) + c];
  }

  void forest(std::size_t i, std::size_t j) {
    std::size_t li = a_.lml[i];
    std::size_t lj = b_.lml[j];
    fd(li - 1, lj - 1, li, lj) = 0;
    for (std::size_t x = li; x <= i; ++x) fd(x, lj - 1, li, lj) = fd(x - 1, lj - 1, li, lj) + 1;
    for (std::size_t y = lj; y <= j; ++y) fd(li - 1, y, li, lj) = fd(li - 1, y - 1, li, lj) + 1;
    for (std::size_t x = li; x <= i; ++x) {
      for (std::size_t y = lj; y <= j; ++y) {
        int del = fd(x - 1, y, li, lj) + 1;
        int ins = fd(x, y - 1, li, lj) + 1;
        if (a_.lml[x] == li && b_.lml[y] == lj) {
          int rel = fd(x - 1, y - 1, li, lj) + (a_.label[x] == b_.label[y] ? 0 : 1);
          int v = std::min({del, ins, rel});
          fd(x, y, li, lj) = v;
          td(x, y) = v;
        } else {
          int sub = fd(a_.lml[x] - 1, b_.lml[y] - 1, li, lj) + td(x, y);
          fd(x, y, li, lj) = std::min({del, ins, sub});
        }
      }
    }
  }

  EditOp remove_op(const LabeledTree& ta, std::size_t k) const {
    EditOp op;
    op.kind = EditOp::Kind::remove;
    op.x_node = a_.original[k];
    op.from = ta.labels[op.x_node];
    return op;
  }
  EditOp insert_op(const LabeledTree& tb, std::size_t k) const {
    EditOp op;
    op.kind = EditOp::Kind::insert;
    op.y_node = b_.original[k];
    op.to = tb.labels[op.y_node];
    return op;
  }

  const PostorderTree& a_;
  const PostorderTree& b_;
  std::vector<int> td_;
  std::vector<int> fd_;
};

// Unit-cost sequence edit distance.
inline int sequence_distance(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::vector<int> preorder_labels(const LabeledTree& t, LabelInterner& intern) {
  std::vector<int> out;
  if (t.empty()) return out;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    std::size_t n = stack.back();
    stack.pop_back();
    out.push_back(intern(t.labels[n]));
    for (auto c = t.children[n].rbegin(); c != t.children[n].rend(); ++c) stack.push_back(*c);
  }
  return out;
}

}  // namespace detail

inline EditScript tree_edit_distance(const LabeledTree& tx, const LabeledTree& ty) {
  detail::LabelInterner intern;
  detail::PostorderTree a(tx, intern);
  detail::PostorderTree b(ty, intern);
  detail::ZhangShasha zs(a, b);
  EditScript s;
  s.total_cost = zs.distance();
  s.operations = zs.script(tx, ty);
  return s;
}

inline EditScript tree_edit_distance(const SyntaxTree& tx, const SyntaxTree& ty,
                                     LabelMode mode = LabelMode::symbol) {
  return tree_edit_distance(to_labeled(tx, mode), to_labeled(ty, mode));
}

// Distance only, skipping the backtrace.
inline int tree_distance(const LabeledTree& tx, const LabeledTree& ty) {
  detail::LabelInterner intern;
  detail::PostorderTree a(tx, intern);
  detail::PostorderTree b(ty, intern);
  return detail::ZhangShasha(a, b).distance();
}

// Admissible lower bound on the tree edit distance: the edit distance of
// preorder and of postorder label sequences never exceeds it.
inline int tree_distance_lower_bound(const LabeledTree& tx, const LabeledTree& ty) {
  detail::LabelInterner intern;
  auto pre_x = detail::preorder_labels(tx, intern);
  auto pre_y = detail::preorder_labels(ty, intern);
  detail::PostorderTree a(tx, intern);
  detail::PostorderTree b(ty, intern);
  std::vector<int> post_x(a.label.begin() + (a.n ? 1 : 0), a.label.end());
  std::vector<int> post_y(b.label.begin() + (b.n ? 1 : 0), b.label.end());
  int bound = std::max(detail::sequence_distance(pre_x, pre_y),
                       detail::sequence_distance(post_x, post_y));
  int size_gap = static_cast<int>(tx.size() > ty.size() ? tx.size() - ty.size() : ty.size() - tx.size());
  return std::max(bound, size_gap);
}

}  // namespace slicekit
