#pragma once

// Random program generators for property tests. Straight-line programs
// carry their own def/use/declaration facts, written down while the text
// is generated, so oracles never consult the analysis under test.

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "slicekit/lexer.hpp"
#include "slicekit/rng.hpp"

namespace testkit {

using slicekit::Lang;
using slicekit::Rng;
using slicekit::uniform01;
using slicekit::uniform_index;

struct GenStmt {
  std::string text;
  std::set<std::string> defs;
  std::set<std::string> uses;
  bool declares = false;  // Java "int x = ..." (declares its def)
};

struct GenProgram {
  Lang lang = Lang::java;
  std::vector<GenStmt> stmts;  // one per line

  std::string text() const {
    std::string out;
    for (const auto& s : stmts) out += s.text + "\n";
    return out;
  }
};

inline const std::vector<std::string>& var_pool() {
  static const std::vector<std::string> pool{"a", "b", "c", "d", "e", "f"};
  return pool;
}

inline std::string pick_var(Rng& rng, std::size_t nvars) {
  return var_pool()[uniform_index(rng, std::min(nvars, var_pool().size()))];
}

// Expression with 0..2 variable references; records them in `uses`.
inline std::string gen_expr(Rng& rng, std::size_t nvars, std::set<std::string>& uses) {
  static const char* ops[] = {" + ", " - ", " * "};
  int refs = static_cast<int>(uniform_index(rng, 3));
  if (refs == 0) return std::to_string(1 + uniform_index(rng, 9));
  std::string out;
  for (int i = 0; i < refs; ++i) {
    if (i) out += ops[uniform_index(rng, 3)];
    if (uniform01(rng) < 0.8) {
      std::string v = pick_var(rng, nvars);
      uses.insert(v);
      out += v;
    } else {
      out += std::to_string(1 + uniform_index(rng, 9));
    }
  }
  return out;
}

// Straight-line program of `n` statements over `nvars` variables. Java
// variables are declared ("int x = ...") at their first definition when
// `declare` is set.
inline GenProgram straight_line(Rng& rng, Lang lang, int n, std::size_t nvars = 4, bool declare = true) {
  GenProgram p;
  p.lang = lang;
  std::set<std::string> declared;
  const char* semi = lang == Lang::java ? ";" : "";
  for (int i = 0; i < n; ++i) {
    GenStmt s;
    double r = uniform01(rng);
    std::string v = pick_var(rng, nvars);
    if (r < 0.6) {
      std::string e = gen_expr(rng, nvars, s.uses);
      s.defs.insert(v);
      if (lang == Lang::java && declare && !declared.count(v) && !s.uses.count(v)) {
        s.text = "int " + v + " = " + e + semi;
        s.declares = true;
        declared.insert(v);
      } else {
        s.text = v + " = " + e + semi;
      }
    } else if (r < 0.75) {
      std::string e = gen_expr(rng, nvars, s.uses);
      s.text = v + " += " + e + semi;
      s.defs.insert(v);
      s.uses.insert(v);
    } else if (r < 0.85 && lang == Lang::java) {
      s.text = v + "++;";
      s.defs.insert(v);
      s.uses.insert(v);
    } else {
      std::string w = pick_var(rng, nvars);
      s.text = "log(" + v + ", " + w + ")" + semi;
      s.uses.insert(v);
      s.uses.insert(w);
    }
    p.stmts.push_back(std::move(s));
  }
  return p;
}

// Program with nested branches and loops, one statement per line.
class StructuredGen {
 public:
  StructuredGen(Rng& rng, Lang lang, std::size_t nvars = 4) : rng_(rng), lang_(lang), nvars_(nvars) {}

  std::string program(int budget) {
    out_.clear();
    budget_ = budget;
    block(0, 2 + static_cast<int>(uniform_index(rng_, 4)));
    while (budget_ > 0) block(0, 1);
    return out_;
  }

 private:
  void line(int depth, const std::string& text) {
    out_ += std::string(static_cast<std::size_t>(depth) * 4, ' ') + text + "\n";
  }

  std::string simple() {
    std::set<std::string> uses;
    std::string v = pick_var(rng_, nvars_);
    const char* semi = lang_ == Lang::java ? ";" : "";
    double r = uniform01(rng_);
    if (r < 0.65) return v + " = " + gen_expr(rng_, nvars_, uses) + semi;
    if (r < 0.8) return v + " += " + gen_expr(rng_, nvars_, uses) + semi;
    if (r < 0.9 && lang_ == Lang::java && !declared_.count(v)) {
      declared_.insert(v);
      return "int " + v + " = " + gen_expr(rng_, nvars_, uses) + semi;
    }
    return "log(" + v + ")" + semi;
  }

  std::string cond() {
    return pick_var(rng_, nvars_) + (uniform01(rng_) < 0.5 ? " > " : " < ") +
           (uniform01(rng_) < 0.5 ? pick_var(rng_, nvars_) : std::to_string(uniform_index(rng_, 9)));
  }

  void block(int depth, int count) {
    for (int i = 0; i < count && budget_ > 0; ++i) {
      double r = uniform01(rng_);
      if (depth < 2 && r < 0.15 && budget_ >= 3) {
        if_stmt(depth);
      } else if (depth < 2 && r < 0.25 && budget_ >= 3) {
        loop(depth);
      } else {
        --budget_;
        line(depth, simple());
      }
    }
  }

  void body(int depth) {
    int n = 1 + static_cast<int>(uniform_index(rng_, 3));
    std::size_t before = out_.size();
    block(depth, n);
    if (out_.size() == before) {
      --budget_;
      line(depth, simple());
    }
  }

  void if_stmt(int depth) {
    --budget_;
    bool java = lang_ == Lang::java;
    line(depth, java ? "if (" + cond() + ") {" : "if " + cond() + ":");
    body(depth + 1);
    if (uniform01(rng_) < 0.4) {
      line(depth, java ? "} else {" : "else:");
      body(depth + 1);
    }
    if (java) line(depth, "}");
  }

  void loop(int depth) {
    --budget_;
    bool java = lang_ == Lang::java;
    if (uniform01(rng_) < 0.5) {
      line(depth, java ? "while (" + cond() + ") {" : "while " + cond() + ":");
    } else {
      std::string v = pick_var(rng_, nvars_);
      line(depth, java ? "for (int i = 0; i < " + v + "; i++) {" : "for i in range(" + v + "):");
    }
    body(depth + 1);
    if (java) line(depth, "}");
  }

  Rng& rng_;
  Lang lang_;
  std::size_t nvars_;
  std::string out_;
  int budget_ = 0;
  std::set<std::string> declared_;
};

inline std::string structured(Rng& rng, Lang lang, int budget, std::size_t nvars = 4) {
  return StructuredGen(rng, lang, nvars).program(budget);
}

}  // namespace testkit
