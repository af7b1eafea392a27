#pragma once

// Per-file corpus and ground-truth record builders, plus a deterministic
// parallel map used by the command-line tool.

#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicekit/corpusgen.hpp"
#include "slicekit/dataset.hpp"
#include "slicekit/oracle.hpp"

namespace slicekit {

// Results in index order whatever the number of workers. The first
// exception thrown by `fn` is rethrown after all workers stop.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, int jobs, Fn fn) {
  std::vector<T> out(n);
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

struct Criterion {
  std::string var;
  int line = 0;
};

// Every (variable, line) pair with an occurrence, by line then position.
inline std::vector<Criterion> candidate_criteria(const SourceUnit& unit, const DataFlowGraph& dfg) {
  std::vector<Criterion> out;
  std::set<std::pair<int, std::string>> seen;
  for (const auto& v : dfg.nodes) {
    int line = unit.line_of(v.begin);
    if (seen.emplace(line, v.name).second) out.push_back({v.name, line});
  }
  std::stable_sort(out.begin(), out.end(), [](const Criterion& a, const Criterion& b) { return a.line < b.line; });
  return out;
}

inline std::string criterion_id(const std::string& file, const Criterion& c) {
  return file + "#" + c.var + "@" + std::to_string(c.line);
}

// Ground-truth items for one file. With more candidates than
// `max_per_file` (0 = no limit), a seeded sample is kept, in line order.
inline std::vector<DatasetItem> oracle_items(const SourceFile& f, int max_per_file, std::uint64_t seed) {
  SourceUnit unit = load_unit(f.text, f.lang);
  DataFlowGraph dfg = build_dfg(unit, parse(unit.text, unit.lang));
  auto crits = candidate_criteria(unit, dfg);
  if (max_per_file > 0 && crits.size() > static_cast<std::size_t>(max_per_file)) {
    Rng rng(item_seed(seed, f.name));
    std::vector<std::size_t> idx(crits.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[uniform_index(rng, i + 1)]);
    idx.resize(static_cast<std::size_t>(max_per_file));
    std::sort(idx.begin(), idx.end());
    std::vector<Criterion> kept;
    for (auto i : idx) kept.push_back(crits[i]);
    crits = std::move(kept);
  }
  std::vector<DatasetItem> out;
  for (const auto& c : crits) {
    SliceQuery q{unit, c.var, c.line};
    out.push_back(make_item(criterion_id(f.name, c), q, oracle_slice(q, dfg)));
  }
  return out;
}

enum class CorpusTask { perm, span, sft };

inline CorpusTask parse_corpus_task(std::string_view s) {
  if (s == "perm") return CorpusTask::perm;
  if (s == "span") return CorpusTask::span;
  if (s == "sft") return CorpusTask::sft;
  throw Error(ErrorCode::invalid_argument, "unknown corpus task '" + std::string(s) + "'");
}

inline std::string_view to_string(CorpusTask t) {
  switch (t) {
    case CorpusTask::perm: return "perm";
    case CorpusTask::span: return "span";
    case CorpusTask::sft: return "sft";
  }
  return "perm";
}

struct CorpusOptions {
  CorpusTask task = CorpusTask::perm;
  double mask_ratio = 0.25;
  int max_swaps = 3;
  std::uint64_t seed = 0;
  std::string sentinel_format = std::string(kDefaultSentinel);
  int max_per_file = 0;  // sft only
};

inline std::vector<nlohmann::json> corpus_records(const SourceFile& f, const CorpusOptions& opt) {
  using nlohmann::json;
  SourceUnit unit = load_unit(f.text, f.lang);
  DataFlowGraph dfg = build_dfg(unit, parse(unit.text, unit.lang));
  std::string lang(to_string(f.lang));
  std::vector<json> out;
  switch (opt.task) {
    case CorpusTask::perm: {
      Rng rng(item_seed(opt.seed, f.name));
      auto ex = permute_statements(unit, dfg, opt.max_swaps, rng);
      json swaps = json::array();
      for (auto [i, j] : ex.swaps) swaps.push_back({i, j});
      out.push_back({{"id", f.name + "#perm"},
                     {"lang", lang},
                     {"task", "perm"},
                     {"input", ex.original},
                     {"target", ex.permuted},
                     {"meta", {{"swaps", swaps}}}});
      break;
    }
    case CorpusTask::span: {
      Rng rng(item_seed(opt.seed, f.name));
      auto ex = span_corrupt(unit, dfg, opt.mask_ratio, rng, opt.sentinel_format);
      json units = json::array();
      for (const auto& u : ex.units) {
        units.push_back({{"kind", std::string(to_string(u.kind))}, {"span", {u.begin, u.end}}});
      }
      out.push_back({{"id", f.name + "#span"},
                     {"lang", lang},
                     {"task", "span"},
                     {"input", ex.masked_input},
                     {"target", ex.target},
                     {"meta",
                      {{"units", units},
                       {"sentinels", ex.sentinels},
                       {"mask_ratio_used", ex.mask_ratio_used},
                       {"masked_tokens", ex.masked_tokens},
                       {"total_tokens", ex.total_tokens},
                       {"exhausted", ex.exhausted}}}});
      break;
    }
    case CorpusTask::sft: {
      for (const auto& item : oracle_items(f, opt.max_per_file, opt.seed)) {
        SliceQuery q{unit, item.criterion_var, item.criterion_line};
        auto ex = format_sft(q, slice_from_lines(unit, item.slice_lines));
        out.push_back({{"id", item.id},
                       {"lang", lang},
                       {"task", "sft"},
                       {"input", ex.input_text},
                       {"target", ex.target_text},
                       {"meta", {{"criterion", {{"var", item.criterion_var}, {"line", item.criterion_line}}}}}});
      }
      break;
    }
  }
  return out;
}

}  // namespace slicekit
