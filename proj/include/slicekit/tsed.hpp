#pragma once

// Tree Similarity of Edit Distance:
//   TSED = 1 - distance(T_x, T_y) / max(|T_x|, |T_y|)

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>

#include "slicekit/parse.hpp"
#include "slicekit/tree_edit.hpp"

namespace slicekit {

struct TsedScore {
  double value = 0.0;
  std::size_t nodes_x = 0;
  std::size_t nodes_y = 0;
  double distance = 0.0;
  // Set above the node budget: distance is a lower bound, value an upper
  // bound.
  bool approximate = false;
};

struct TsedOptions {
  LabelMode label_mode = LabelMode::symbol;
  std::size_t node_budget = 3000;
};

enum class Verdict { keep, prune };

// Strict: equal scores keep the beam.
inline Verdict monotonic_check(double t_prev, double t_cur) {
  return t_cur < t_prev ? Verdict::prune : Verdict::keep;
}

inline bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  });
}

inline TsedScore tsed_from_distance(double distance, std::size_t nx, std::size_t ny) {
  TsedScore s;
  s.nodes_x = nx;
  s.nodes_y = ny;
  s.distance = distance;
  std::size_t denom = std::max(nx, ny);
  s.value = denom == 0 ? 1.0 : std::clamp(1.0 - distance / static_cast<double>(denom), 0.0, 1.0);
  return s;
}

inline TsedScore tsed(const LabeledTree& tx, const LabeledTree& ty, const TsedOptions& opt = {}) {
  if (ty.empty()) return tsed_from_distance(static_cast<double>(tx.size()), tx.size(), 0);
  if (tx.size() > opt.node_budget || ty.size() > opt.node_budget) {
    TsedScore s = tsed_from_distance(tree_distance_lower_bound(tx, ty), tx.size(), ty.size());
    s.approximate = true;
    return s;
  }
  return tsed_from_distance(tree_distance(tx, ty), tx.size(), ty.size());
}

inline TsedScore tsed(std::string_view x_text, std::string_view y_text, Lang lang,
                      const TsedOptions& opt = {}) {
  LabeledTree tx = to_labeled(parse(x_text, lang), opt.label_mode);
  if (blank(y_text)) return tsed_from_distance(static_cast<double>(tx.size()), tx.size(), 0);
  return tsed(tx, to_labeled(parse(y_text, lang), opt.label_mode), opt);
}

// Reference side prepared once and scored against many candidates, as the
// decoder does at every statement boundary.
class TsedReference {
 public:
  TsedReference(std::string_view x_text, Lang lang, TsedOptions opt = {})
      : lang_(lang), opt_(opt), tree_(to_labeled(parse(x_text, lang), opt.label_mode)) {
    post_ = detail::PostorderTree(tree_, intern_);
  }

  std::size_t size() const { return tree_.size(); }
  Lang lang() const { return lang_; }

  TsedScore score(std::string_view y_text) const {
    if (blank(y_text)) return tsed_from_distance(static_cast<double>(tree_.size()), tree_.size(), 0);
    LabeledTree ty = to_labeled(parse(y_text, lang_), opt_.label_mode);
    if (tree_.size() > opt_.node_budget || ty.size() > opt_.node_budget) return tsed(tree_, ty, opt_);
    // Labels unseen in the reference map to fresh ids past the interned
    // range without touching the shared table.
    detail::LabelInterner local;
    int base = static_cast<int>(intern_.size());
    auto lookup = [&](const std::string& s) {
      int id = intern_.find(s);
      return id >= 0 ? id : base + local(s);
    };
    detail::PostorderTree py(ty, lookup);
    detail::ZhangShasha zs(post_, py);
    return tsed_from_distance(zs.distance(), tree_.size(), ty.size());
  }

 private:
  Lang lang_;
  TsedOptions opt_;
  LabeledTree tree_;
  detail::LabelInterner intern_;
  detail::PostorderTree post_;
};

}  // namespace slicekit
