#pragma once

// Next-token scorer abstraction and the in-process test doubles.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slicekit/rng.hpp"
#include "slicekit/tokenizer.hpp"

namespace slicekit {

struct TokenScore {
  int id = 0;
  double logprob = 0.0;
};

using ScoreVector = std::vector<TokenScore>;

class Scorer {
 public:
  virtual ~Scorer() = default;
  // Opens a session; `input_text` lets remote scorers rebuild the allowed
  // set with their own tokenizer.
  virtual std::int64_t session(const std::vector<int>& input_ids, const std::vector<int>& allowed_ids,
                               std::string_view input_text) = 0;
  // One score vector per prefix, covering exactly the session's allowed ids.
  virtual std::vector<ScoreVector> step(std::int64_t session,
                                        const std::vector<std::vector<int>>& prefixes) = 0;
  virtual void close(std::int64_t session) = 0;
};

// Base for scorers that define a full next-token distribution and report
// it restricted to the allowed ids.
class DistributionScorer : public Scorer {
 public:
  explicit DistributionScorer(const Tokenizer& tok) : tok_(tok) {}

  std::int64_t session(const std::vector<int>& input_ids, const std::vector<int>& allowed_ids,
                       std::string_view input_text) override {
    std::int64_t id = next_session_++;
    Session& s = sessions_[id];
    s.allowed = allowed_ids;
    s.input_ids = input_ids;
    s.in_input = allowed_tokens(input_text.empty() ? std::string_view(" ") : input_text, tok_);
    return id;
  }

  std::vector<ScoreVector> step(std::int64_t session,
                                const std::vector<std::vector<int>>& prefixes) override {
    auto it = sessions_.find(session);
    if (it == sessions_.end()) throw Error(ErrorCode::protocol, "unknown session " + std::to_string(session));
    const Session& s = it->second;
    std::vector<ScoreVector> out;
    out.reserve(prefixes.size());
    std::vector<double> probs;
    for (const auto& p : prefixes) {
      distribution(s, p, probs);
      ScoreVector v;
      v.reserve(s.allowed.size());
      for (int id : s.allowed) v.push_back({id, std::log(probs[static_cast<std::size_t>(id)])});
      out.push_back(std::move(v));
    }
    return out;
  }

  void close(std::int64_t session) override { sessions_.erase(session); }

 protected:
  struct Session {
    std::vector<int> allowed;
    std::vector<int> input_ids;
    TokenMask in_input;
  };

  // Fills `probs` (vocabulary-sized, strictly positive, summing to 1).
  virtual void distribution(const Session& s, const std::vector<int>& prefix,
                            std::vector<double>& probs) const = 0;

  const Tokenizer& tok_;

  static constexpr double kFloor = 1e-9;

  // Spreads `mass` over everything except the listed ids, then adds the
  // point masses.
  void fill(std::vector<double>& probs, const std::vector<std::pair<int, double>>& points) const {
    std::size_t v = static_cast<std::size_t>(tok_.vocab_size());
    probs.assign(v, kFloor);
    double rest = 1.0 - kFloor * static_cast<double>(v);
    for (const auto& [id, p] : points) probs[static_cast<std::size_t>(id)] += p * rest;
  }

 private:
  std::map<std::int64_t, Session> sessions_;
  std::int64_t next_session_ = 1;
};

enum class NoiseKind { out_of_input, repetition, reorder };

inline NoiseKind parse_noise_kind(std::string_view s) {
  if (s == "out_of_input") return NoiseKind::out_of_input;
  if (s == "repetition") return NoiseKind::repetition;
  if (s == "reorder") return NoiseKind::reorder;
  throw Error(ErrorCode::invalid_argument, "unknown noise kind '" + std::string(s) + "'");
}

inline std::string_view to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::out_of_input: return "out_of_input";
    case NoiseKind::repetition: return "repetition";
    case NoiseKind::reorder: return "reorder";
  }
  return "out_of_input";
}

// Copy scorer: at step t puts 1 - noise on target[t] and noise on one
// adversarial id. On "spike" steps, drawn with probability `noise` from the
// seed and the step index, the two masses trade places so that the
// adversary actually wins some steps.
class MockCopyScorer final : public DistributionScorer {
 public:
  MockCopyScorer(const Tokenizer& tok, std::vector<int> target, double noise, NoiseKind kind,
                 std::uint64_t seed)
      : DistributionScorer(tok), target_(std::move(target)), noise_(noise), kind_(kind), seed_(seed) {
    if (!(noise >= 0.0 && noise < 1.0)) throw Error(ErrorCode::invalid_argument, "noise must lie in [0, 1)");
  }

  // Target token at step t (EOS past the end).
  int target_at(std::size_t t) const {
    return t < target_.size() ? target_[t] : tok_.eos();
  }

  bool spike(std::size_t t) const {
    if (noise_ == 0.0) return false;
    std::uint64_t h = item_seed(seed_, std::to_string(t));
    return static_cast<double>(h >> 11) * 0x1.0p-53 < noise_;
  }

  int adversary(const Session& s, const std::vector<int>& prefix) const {
    std::size_t t = prefix.size();
    std::uint64_t h = item_seed(seed_ ^ 0x5eedULL, std::to_string(t));
    switch (kind_) {
      case NoiseKind::out_of_input: {
        // A printable byte that the input does not contain.
        std::vector<int> outside;
        for (int id = 33; id < 127; ++id) {
          if (!s.in_input.contains(id)) outside.push_back(id);
        }
        if (outside.empty()) return tok_.pad();
        return outside[h % outside.size()];
      }
      case NoiseKind::repetition: {
        if (prefix.empty()) return target_at(1);
        std::size_t back = 1 + h % std::min<std::size_t>(prefix.size(), 4);
        return prefix[prefix.size() - back];
      }
      case NoiseKind::reorder: return target_at(t + 1);
    }
    return tok_.eos();
  }

 protected:
  void distribution(const Session& s, const std::vector<int>& prefix,
                    std::vector<double>& probs) const override {
    std::size_t t = prefix.size();
    int want = target_at(t);
    if (noise_ == 0.0) {
      fill(probs, {{want, 1.0}});
      return;
    }
    int adv = adversary(s, prefix);
    double main = spike(t) ? noise_ : 1.0 - noise_;
    fill(probs, {{want, main}, {adv, 1.0 - main}});
  }

 private:
  std::vector<int> target_;
  double noise_;
  NoiseKind kind_;
  std::uint64_t seed_;
};

// Mixture of scripted continuations: each sequence whose prefix matches
// contributes its weight to its next token (EOS at its end). Prefixes
// matching no sequence get EOS.
class ScriptedScorer final : public DistributionScorer {
 public:
  ScriptedScorer(const Tokenizer& tok, std::vector<std::pair<std::vector<int>, double>> sequences)
      : DistributionScorer(tok), seqs_(std::move(sequences)) {}

 protected:
  void distribution(const Session&, const std::vector<int>& prefix,
                    std::vector<double>& probs) const override {
    std::map<int, double> next;
    double total = 0.0;
    for (const auto& [seq, w] : seqs_) {
      if (prefix.size() > seq.size()) continue;
      if (!std::equal(prefix.begin(), prefix.end(), seq.begin())) continue;
      int id = prefix.size() < seq.size() ? seq[prefix.size()] : tok_.eos();
      next[id] += w;
      total += w;
    }
    std::vector<std::pair<int, double>> points;
    if (total == 0.0) {
      points.push_back({tok_.eos(), 1.0});
    } else {
      for (const auto& [id, w] : next) points.push_back({id, w / total});
    }
    fill(probs, points);
  }

 private:
  std::vector<std::pair<std::vector<int>, double>> seqs_;
};

}  // namespace slicekit
