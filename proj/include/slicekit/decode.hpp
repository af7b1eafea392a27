#pragma once

// Constrained beam search: lexical token masking plus TSED pruning at
// statement boundaries.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "slicekit/corpusgen.hpp"
#include "slicekit/scorer.hpp"
#include "slicekit/slice.hpp"
#include "slicekit/tokenizer.hpp"
#include "slicekit/tsed.hpp"

namespace slicekit {

struct DecodeConfig {
  int beam_size = 3;
  int max_len = 512;
  bool tsed_prune = true;
  bool lexical_mask = true;
  bool fallback_on_empty = true;
  double length_penalty = 0.0;  // finished score / len^alpha; 0 disables
  TsedOptions tsed;

  void validate() const {
    if (beam_size < 1) throw Error(ErrorCode::invalid_argument, "beam size must be at least 1");
    if (max_len < 1) throw Error(ErrorCode::invalid_argument, "max length must be at least 1");
    if (length_penalty < 0.0) throw Error(ErrorCode::invalid_argument, "length penalty must be non-negative");
  }
};

namespace detail {

// Bracket depth over the text, skipping string and char literals.
inline int bracket_depth(std::string_view text, std::string_view open, std::string_view close, bool python) {
  int depth = 0;
  char quote = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == quote || (c == '\n' && !python)) {
        quote = 0;
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
    } else if (python && c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (open.find(c) != std::string_view::npos) {
      ++depth;
    } else if (close.find(c) != std::string_view::npos) {
      --depth;
    }
  }
  return depth;
}

}  // namespace detail

inline bool is_statement_complete(std::string_view text, Lang lang) {
  if (lang == Lang::python) {
    return !text.empty() && text.back() == '\n' && detail::bracket_depth(text, "([{", ")]}", true) == 0;
  }
  std::size_t e = text.size();
  while (e > 0 && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  if (e == 0) return false;
  char last = text[e - 1];
  if (last != ';' && last != '{' && last != '}') return false;
  return detail::bracket_depth(text.substr(0, e), "(", ")", false) <= 0;
}

// Whether appending `piece` closes a statement. Java boundaries fall on
// the token carrying the terminator, Python ones on the newline.
inline bool is_boundary(std::string_view new_text, std::string_view piece, Lang lang) {
  if (lang == Lang::python) {
    if (piece.find('\n') == std::string_view::npos) return false;
  } else if (std::all_of(piece.begin(), piece.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); })) {
    return false;
  }
  return is_statement_complete(new_text, lang);
}

struct DecodeStats {
  int steps = 0;
  int tsed_calls = 0;
  int tsed_cache_hits = 0;
  int pruned = 0;
  int finished = 0;
  double scorer_seconds = 0.0;
  double tsed_seconds = 0.0;
  double total_seconds = 0.0;
};

struct DecodeResult {
  Slice slice;
  std::vector<int> ids;
  std::string text;
  double score = 0.0;
  bool degraded = false;
  bool terminated = false;              // ended with EOS
  bool well_formed = false;             // numbered lines, strictly increasing
  std::vector<double> boundary_tsed;    // t_stmt after each accepted boundary
  DecodeStats stats;
};

namespace detail {

struct Beam {
  std::vector<int> ids;
  std::string text;
  double score = 0.0;
  double t_stmt = 0.0;
  std::vector<double> trace;
};

struct Candidate {
  std::size_t beam;
  int id;
  double score;
};

}  // namespace detail

// Runs the search for an already encoded input. `allowed` is the lexical
// mask; pass TokenMask::all for an unconstrained vocabulary.
class BeamSearch {
 public:
  BeamSearch(const SliceQuery& q, Scorer& scorer, const Tokenizer& tok, DecodeConfig cfg)
      : q_(q), scorer_(scorer), tok_(tok), cfg_(std::move(cfg)) {
    cfg_.validate();
  }

  DecodeResult run() {
    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    std::string input = format_sft_input(q_);
    std::vector<int> input_ids = tok_.encode(input);
    TokenMask mask = cfg_.lexical_mask ? allowed_tokens(input, tok_) : TokenMask::all(tok_.vocab_size());
    std::vector<int> allowed = mask.ids();
    if (cfg_.tsed_prune) ref_.emplace(q_.unit.text, q_.unit.lang, cfg_.tsed);

    std::int64_t session = scorer_.session(input_ids, allowed, input);
    std::vector<detail::Beam> active(1);
    std::vector<detail::Beam> finished;
    detail::Beam best_pruned;
    bool have_pruned = false;

    for (int step = 0; step < cfg_.max_len && !active.empty(); ++step) {
      ++stats_.steps;
      std::vector<std::vector<int>> prefixes;
      prefixes.reserve(active.size());
      for (const auto& b : active) prefixes.push_back(b.ids);
      auto ts = clock::now();
      auto rows = scorer_.step(session, prefixes);
      stats_.scorer_seconds += std::chrono::duration<double>(clock::now() - ts).count();
      if (rows.size() != active.size()) throw Error(ErrorCode::protocol, "scorer returned wrong row count");

      std::vector<detail::Candidate> cands;
      for (std::size_t bi = 0; bi < active.size(); ++bi) expand(bi, active[bi], rows[bi], mask, cands);
      std::sort(cands.begin(), cands.end(), [](const detail::Candidate& a, const detail::Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.beam != b.beam) return a.beam < b.beam;
        return a.id < b.id;
      });

      std::vector<detail::Beam> next;
      for (const auto& c : cands) {
        bool eos = c.id == tok_.eos();
        // Finished candidates never take a slot; the rest only until the
        // beam is full, so boundary checks stay lazy.
        if (!eos && static_cast<int>(next.size()) >= cfg_.beam_size) continue;
        const detail::Beam& parent = active[c.beam];
        detail::Beam nb;
        nb.ids = parent.ids;
        nb.ids.push_back(c.id);
        nb.score = c.score;
        nb.t_stmt = parent.t_stmt;
        nb.trace = parent.trace;
        std::string piece = eos ? std::string() : tok_.token_text(c.id);
        nb.text = parent.text + piece;
        bool check = cfg_.tsed_prune && (eos || is_boundary(nb.text, piece, q_.unit.lang));
        if (check) {
          double t_cur = boundary_tsed(nb.text);
          if (monotonic_check(nb.t_stmt, t_cur) == Verdict::prune) {
            ++stats_.pruned;
            if (!have_pruned || nb.score > best_pruned.score) {
              best_pruned = nb;
              have_pruned = true;
            }
            continue;
          }
          nb.t_stmt = t_cur;
          nb.trace.push_back(t_cur);
        }
        if (eos) {
          ++stats_.finished;
          finished.push_back(std::move(nb));
          continue;
        }
        next.push_back(std::move(nb));
      }
      active = std::move(next);

      if (cfg_.length_penalty == 0.0 && !finished.empty() && !active.empty()) {
        double best_fin = best_of(finished).score;
        double best_act = active.front().score;
        if (best_act <= best_fin) break;
      }
    }
    scorer_.close(session);

    DecodeResult r;
    const detail::Beam* pick = nullptr;
    if (!finished.empty()) {
      pick = &best_of(finished);
      r.terminated = true;
    } else if (!active.empty()) {
      pick = &active.front();
    } else if (have_pruned && cfg_.fallback_on_empty) {
      pick = &best_pruned;
      r.degraded = true;
    } else {
      throw Error(ErrorCode::no_valid_slice, "every beam was pruned");
    }
    r.ids = pick->ids;
    if (r.terminated && !r.ids.empty() && r.ids.back() == tok_.eos()) r.ids.pop_back();
    r.text = pick->text;
    r.score = pick->score;
    r.boundary_tsed = pick->trace;
    r.slice = parse_numbered_slice(r.text);
    r.well_formed = !r.slice.empty();
    for (std::size_t i = 0; i < r.slice.line_numbers.size(); ++i) {
      int n = r.slice.line_numbers[i];
      if (n <= 0 || (i && n <= r.slice.line_numbers[i - 1])) r.well_formed = false;
    }
    r.slice.degraded = r.degraded;
    stats_.total_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    r.stats = stats_;
    return r;
  }

 private:
  void expand(std::size_t bi, const detail::Beam& b, const ScoreVector& row, const TokenMask& mask,
              std::vector<detail::Candidate>& out) const {
    // Log-softmax over the returned entries, restricted to the mask.
    double hi = kNegInf;
    for (const auto& s : row) {
      if (mask.contains(s.id)) hi = std::max(hi, s.logprob);
    }
    if (hi == kNegInf) return;
    double sum = 0.0;
    for (const auto& s : row) {
      if (mask.contains(s.id) && s.logprob != kNegInf) sum += std::exp(s.logprob - hi);
    }
    double lse = hi + std::log(sum);
    std::vector<detail::Candidate> local;
    local.reserve(row.size());
    for (const auto& s : row) {
      if (!mask.contains(s.id) || s.logprob == kNegInf) continue;
      local.push_back({bi, s.id, b.score + (s.logprob - lse)});
    }
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(cfg_.beam_size), local.size());
    std::partial_sort(local.begin(), local.begin() + static_cast<std::ptrdiff_t>(k), local.end(),
                      [](const detail::Candidate& a, const detail::Candidate& c) {
                        if (a.score != c.score) return a.score > c.score;
                        return a.id < c.id;
                      });
    out.insert(out.end(), local.begin(), local.begin() + static_cast<std::ptrdiff_t>(k));
  }

  double boundary_tsed(const std::string& text) {
    std::string code = strip_line_numbers(text);
    auto it = cache_.find(code);
    if (it != cache_.end()) {
      ++stats_.tsed_cache_hits;
      return it->second;
    }
    using clock = std::chrono::steady_clock;
    auto ts = clock::now();
    double v = ref_->score(code).value;
    stats_.tsed_seconds += std::chrono::duration<double>(clock::now() - ts).count();
    ++stats_.tsed_calls;
    cache_.emplace(std::move(code), v);
    return v;
  }

  const detail::Beam& best_of(const std::vector<detail::Beam>& beams) const {
    auto adjusted = [&](const detail::Beam& b) {
      if (cfg_.length_penalty == 0.0) return b.score;
      return b.score / std::pow(static_cast<double>(std::max<std::size_t>(b.ids.size(), 1)), cfg_.length_penalty);
    };
    // Ties go to the shorter, then lexicographically smaller, sequence.
    const detail::Beam* best = &beams.front();
    for (const auto& b : beams) {
      double sb = adjusted(b);
      double sbest = adjusted(*best);
      if (sb > sbest || (sb == sbest && (b.ids.size() < best->ids.size() ||
                                         (b.ids.size() == best->ids.size() && b.ids < best->ids)))) {
        best = &b;
      }
    }
    return *best;
  }

  const SliceQuery& q_;
  Scorer& scorer_;
  const Tokenizer& tok_;
  DecodeConfig cfg_;
  std::optional<TsedReference> ref_;
  std::unordered_map<std::string, double> cache_;
  DecodeStats stats_;
};

inline DecodeResult constrained_beam_search(const SliceQuery& q, Scorer& scorer, const Tokenizer& tok,
                                            const DecodeConfig& cfg = {}) {
  return BeamSearch(q, scorer, tok, cfg).run();
}

}  // namespace slicekit
