#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "slicekit/corpusgen.hpp"

namespace slicekit {

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<int> encode(std::string_view text) const = 0;
  virtual std::string decode(const std::vector<int>& ids) const = 0;
  virtual std::string token_text(int id) const = 0;
  virtual int vocab_size() const = 0;
  virtual int eos() const = 0;
  virtual int pad() const = 0;
  virtual std::vector<int> control_markers() const = 0;
};

// Byte-level tokenizer with the control markers as single ids. Lossless:
// decode(encode(t)) == t.
class CharTokenizer final : public Tokenizer {
 public:
  static constexpr int kEos = 256;
  static constexpr int kPad = 257;
  static constexpr int kCode = 258;
  static constexpr int kCriterion = 259;
  static constexpr int kLine = 260;
  static constexpr int kSlice = 261;

  std::vector<int> encode(std::string_view text) const override {
    std::vector<int> out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
      int marker = marker_at(text, i);
      if (marker >= 0) {
        out.push_back(marker);
        i += marker_text(marker).size();
        continue;
      }
      out.push_back(static_cast<unsigned char>(text[i++]));
    }
    return out;
  }

  std::string decode(const std::vector<int>& ids) const override {
    std::string out;
    for (int id : ids) out += token_text(id);
    return out;
  }

  std::string token_text(int id) const override {
    if (id >= 0 && id < 256) return std::string(1, static_cast<char>(id));
    if (id >= kCode && id <= kSlice) return std::string(marker_text(id));
    return "";
  }

  int vocab_size() const override { return 262; }
  int eos() const override { return kEos; }
  int pad() const override { return kPad; }
  std::vector<int> control_markers() const override { return {kCode, kCriterion, kLine, kSlice}; }

 private:
  static std::string_view marker_text(int id) {
    switch (id) {
      case kCode: return kCodeMarker;
      case kCriterion: return kCriterionMarker;
      case kLine: return kLineMarker;
      case kSlice: return kSliceMarker;
      default: return "";
    }
  }

  static int marker_at(std::string_view text, std::size_t i) {
    if (text[i] != '<') return -1;
    for (int id = kCode; id <= kSlice; ++id) {
      auto m = marker_text(id);
      if (text.substr(i, m.size()) == m) return id;
    }
    return -1;
  }
};

// Allowed-token set A.
struct TokenMask {
  std::vector<bool> allowed;

  bool contains(int id) const {
    return id >= 0 && static_cast<std::size_t>(id) < allowed.size() && allowed[id];
  }
  std::vector<int> ids() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < allowed.size(); ++i) {
      if (allowed[i]) out.push_back(static_cast<int>(i));
    }
    return out;
  }
  std::size_t count() const { return static_cast<std::size_t>(std::count(allowed.begin(), allowed.end(), true)); }

  static TokenMask all(int vocab) { return {std::vector<bool>(static_cast<std::size_t>(vocab), true)}; }
};

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

// Ids from each input line and its trimmed variant, plus EOS, the control
// markers and the pieces of "N: " line prefixes.
inline TokenMask allowed_tokens(std::string_view input_text, const Tokenizer& tok) {
  TokenMask m{std::vector<bool>(static_cast<std::size_t>(tok.vocab_size()), false)};
  auto add = [&](std::string_view piece) {
    for (int id : tok.encode(piece)) {
      if (id >= 0 && id < tok.vocab_size()) m.allowed[static_cast<std::size_t>(id)] = true;
    }
  };
  std::size_t start = 0;
  while (start <= input_text.size()) {
    std::size_t nl = input_text.find('\n', start);
    std::string_view line = input_text.substr(
        start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    add(line);
    add(trim(line));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  add("0123456789");
  add(":");
  add(" ");
  add("\n");
  m.allowed[static_cast<std::size_t>(tok.eos())] = true;
  for (int id : tok.control_markers()) m.allowed[static_cast<std::size_t>(id)] = true;
  return m;
}

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Excluded positions become -inf; allowed ones are untouched.
inline std::vector<double> apply_mask(const std::vector<double>& logits, const TokenMask& mask) {
  std::vector<double> out(logits);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!mask.contains(static_cast<int>(i))) out[i] = kNegInf;
  }
  return out;
}

inline std::vector<double> log_softmax(const std::vector<double>& logits) {
  double hi = kNegInf;
  for (double v : logits) hi = std::max(hi, v);
  std::vector<double> out(logits.size(), kNegInf);
  if (hi == kNegInf) return out;
  double sum = 0.0;
  for (double v : logits) {
    if (v != kNegInf) sum += std::exp(v - hi);
  }
  double lse = hi + std::log(sum);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (logits[i] != kNegInf) out[i] = logits[i] - lse;
  }
  return out;
}

inline std::vector<double> softmax(const std::vector<double>& logits) {
  auto out = log_softmax(logits);
  for (double& v : out) v = v == kNegInf ? 0.0 : std::exp(v);
  return out;
}

}  // namespace slicekit
