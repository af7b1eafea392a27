#pragma once

// Slice metrics: Acc-D, exact match and TSED, with dataset reports.

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicekit/dataset.hpp"
#include "slicekit/slice.hpp"
#include "slicekit/tsed.hpp"

namespace slicekit {

// Share of gold lines that the prediction contains.
inline double acc_d(const Slice& pred, const Slice& gold) {
  if (gold.empty()) throw Error(ErrorCode::empty_gold, "gold slice has no lines");
  std::vector<int> p = pred.line_numbers;
  std::vector<int> g = gold.line_numbers;
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  std::vector<int> both;
  std::set_intersection(p.begin(), p.end(), g.begin(), g.end(), std::back_inserter(both));
  return static_cast<double>(both.size()) / static_cast<double>(g.size());
}

inline bool exact_match(const Slice& pred, const Slice& gold) {
  if (pred.line_numbers != gold.line_numbers || pred.lines.size() != gold.lines.size()) return false;
  for (std::size_t i = 0; i < pred.lines.size(); ++i) {
    if (rtrim(pred.lines[i]) != rtrim(gold.lines[i])) return false;
  }
  return true;
}

// A prediction reads as a slice when every line carries a positive number
// prefix and the numbers strictly increase.
inline std::optional<Slice> read_prediction(std::string_view numbered) {
  Slice s = parse_numbered_slice(numbered);
  for (std::size_t i = 0; i < s.line_numbers.size(); ++i) {
    if (s.line_numbers[i] <= 0) return std::nullopt;
    if (i && s.line_numbers[i] <= s.line_numbers[i - 1]) return std::nullopt;
  }
  return s;
}

struct ItemScore {
  std::string id;
  double acc_d = 0.0;
  bool exact_match = false;
  double tsed = 0.0;
  bool degraded = false;
  bool parse_failure = false;
};

struct EvalReport {
  std::vector<ItemScore> items;  // sorted by id
  double mean_acc_d = 0.0;
  double exact_match_pct = 0.0;
  double mean_tsed = 0.0;
  int total = 0;
  int degraded = 0;
  int parse_failures = 0;
};

inline ItemScore score_item(const DatasetItem& gold_item, const DatasetItem& pred_item,
                            const TsedOptions& opt = {}) {
  ItemScore s;
  s.id = gold_item.id;
  s.degraded = pred_item.degraded;
  Slice gold = parse_numbered_slice(gold_item.slice_text);
  auto pred = read_prediction(pred_item.slice_text);
  if (!pred) {
    s.parse_failure = true;
    s.acc_d = acc_d(Slice{}, gold);
    return s;
  }
  s.acc_d = acc_d(*pred, gold);
  s.exact_match = exact_match(*pred, gold);
  s.tsed = s.exact_match ? 1.0 : tsed(gold.code(), pred->code(), gold_item.lang, opt).value;
  return s;
}

inline EvalReport summarize(std::vector<ItemScore> items) {
  std::sort(items.begin(), items.end(), [](const ItemScore& a, const ItemScore& b) { return a.id < b.id; });
  EvalReport r;
  r.total = static_cast<int>(items.size());
  double acc = 0.0;
  double ts = 0.0;
  int em = 0;
  for (const auto& it : items) {
    acc += it.acc_d;
    ts += it.tsed;
    em += it.exact_match ? 1 : 0;
    r.degraded += it.degraded ? 1 : 0;
    r.parse_failures += it.parse_failure ? 1 : 0;
  }
  if (r.total) {
    r.mean_acc_d = acc / r.total;
    r.mean_tsed = ts / r.total;
    r.exact_match_pct = 100.0 * em / r.total;
  }
  r.items = std::move(items);
  return r;
}

// Pairs gold and predictions by id; any missing or extra id is an error.
inline std::vector<std::pair<const DatasetItem*, const DatasetItem*>> align(
    const std::vector<DatasetItem>& gold, const std::vector<DatasetItem>& pred) {
  std::map<std::string, const DatasetItem*> g;
  std::map<std::string, const DatasetItem*> p;
  for (const auto& it : gold) {
    if (!g.emplace(it.id, &it).second) throw Error(ErrorCode::id_mismatch, "duplicate gold id " + it.id);
  }
  for (const auto& it : pred) {
    if (!p.emplace(it.id, &it).second) throw Error(ErrorCode::id_mismatch, "duplicate prediction id " + it.id);
  }
  std::vector<std::string> missing;
  std::vector<std::string> extra;
  for (const auto& [id, _] : g) {
    if (!p.count(id)) missing.push_back(id);
  }
  for (const auto& [id, _] : p) {
    if (!g.count(id)) extra.push_back(id);
  }
  if (!missing.empty() || !extra.empty()) {
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
      return s.empty() ? std::string("none") : s;
    };
    throw Error(ErrorCode::id_mismatch, "missing predictions: " + join(missing) + "; extra predictions: " + join(extra));
  }
  std::vector<std::pair<const DatasetItem*, const DatasetItem*>> out;
  for (const auto& [id, gi] : g) out.emplace_back(gi, p.at(id));
  return out;
}

inline EvalReport evaluate(const std::vector<DatasetItem>& gold, const std::vector<DatasetItem>& pred,
                           const TsedOptions& opt = {}) {
  std::vector<ItemScore> items;
  for (const auto& [g, p] : align(gold, pred)) items.push_back(score_item(*g, *p, opt));
  return summarize(std::move(items));
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& it : r.items) {
    items.push_back({{"id", it.id},
                     {"acc_d", it.acc_d},
                     {"exact_match", it.exact_match},
                     {"tsed", it.tsed},
                     {"degraded", it.degraded},
                     {"parse_failure", it.parse_failure}});
  }
  return {{"items", std::move(items)},
          {"aggregates",
           {{"acc_d", r.mean_acc_d}, {"exact_match", r.exact_match_pct}, {"tsed", r.mean_tsed}, {"codebleu", nullptr}}},
          {"counts", {{"total", r.total}, {"degraded", r.degraded}, {"parse_failures", r.parse_failures}}}};
}

inline std::string format_table(const EvalReport& r) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-32s %7s %5s %7s\n", "id", "acc_d", "em", "tsed");
  out += buf;
  for (const auto& it : r.items) {
    std::snprintf(buf, sizeof buf, "%-32s %7.4f %5s %7.4f%s\n", it.id.c_str(), it.acc_d,
                  it.exact_match ? "yes" : "no", it.tsed,
                  it.parse_failure ? "  (unparsed)" : it.degraded ? "  (degraded)" : "");
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "\nAcc-D %.4f  ExactMatch %.2f%%  TSED %.4f  (n=%d, degraded=%d, parse failures=%d)\n",
                r.mean_acc_d, r.exact_match_pct, r.mean_tsed, r.total, r.degraded, r.parse_failures);
  out += buf;
  return out;
}

}  // namespace slicekit
