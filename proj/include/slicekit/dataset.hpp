#pragma once

// JSONL records for slicing datasets and predictions, and source loading.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicekit/error.hpp"
#include "slicekit/rng.hpp"
#include "slicekit/slice.hpp"

namespace slicekit {

struct DatasetItem {
  std::string id;
  Lang lang = Lang::java;
  std::string source;
  std::string criterion_var;
  int criterion_line = 0;
  std::vector<int> slice_lines;
  std::string slice_text;  // numbered
  bool degraded = false;

  SliceQuery query() const { return {load_unit(source, lang), criterion_var, criterion_line}; }
};

inline nlohmann::json to_json(const DatasetItem& it, bool with_degraded = false) {
  nlohmann::json j{{"id", it.id},
                   {"lang", std::string(to_string(it.lang))},
                   {"source", it.source},
                   {"criterion_var", it.criterion_var},
                   {"criterion_line", it.criterion_line},
                   {"slice_lines", it.slice_lines},
                   {"slice_text", it.slice_text}};
  if (with_degraded) j["degraded"] = it.degraded;
  return j;
}

inline DatasetItem item_from_json(const nlohmann::json& j) {
  try {
    DatasetItem it;
    it.id = j.at("id").get<std::string>();
    it.lang = parse_lang(j.at("lang").get<std::string>());
    it.source = j.value("source", std::string());
    it.criterion_var = j.value("criterion_var", std::string());
    it.criterion_line = j.value("criterion_line", 0);
    it.slice_lines = j.value("slice_lines", std::vector<int>{});
    it.slice_text = j.value("slice_text", std::string());
    it.degraded = j.value("degraded", false);
    return it;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("bad dataset record: ") + e.what());
  }
}

inline DatasetItem make_item(std::string id, const SliceQuery& q, const Slice& s) {
  DatasetItem it;
  it.id = std::move(id);
  it.lang = q.unit.lang;
  it.source = q.unit.text;
  it.criterion_var = q.criterion_var;
  it.criterion_line = q.criterion_line;
  it.slice_lines = s.line_numbers;
  it.slice_text = s.numbered_text();
  it.degraded = s.degraded;
  return it;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + p.string());
  out << data;
}

inline std::vector<nlohmann::json> parse_jsonl(std::string_view text, const std::string& origin = "input") {
  std::vector<nlohmann::json> out;
  std::size_t start = 0;
  int lineno = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    ++lineno;
    if (!trim(line).empty()) {
      try {
        out.push_back(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_argument,
                    origin + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

inline std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& p) {
  return parse_jsonl(read_file(p), p.string());
}

inline std::string to_jsonl(const std::vector<nlohmann::json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

inline std::vector<DatasetItem> read_dataset(const std::filesystem::path& p) {
  std::vector<DatasetItem> out;
  for (const auto& j : read_jsonl(p)) out.push_back(item_from_json(j));
  return out;
}

// Language from a file extension, if recognized.
inline std::optional<Lang> lang_of(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  if (ext == ".java") return Lang::java;
  if (ext == ".py") return Lang::python;
  return std::nullopt;
}

struct SourceFile {
  std::string name;  // relative to the root, '/' separated
  Lang lang;
  std::string text;
};

// Source files under `root` (or the single file `root`), sorted by name.
// With `only` set, other languages are skipped.
inline std::vector<SourceFile> load_sources(const std::filesystem::path& root,
                                            std::optional<Lang> only = std::nullopt) {
  namespace fs = std::filesystem;
  std::vector<SourceFile> out;
  auto take = [&](const fs::path& p, const std::string& name) {
    auto lang = lang_of(p);
    if (!lang || (only && *only != *lang)) return;
    out.push_back({name, *lang, read_file(p)});
  };
  if (fs::is_regular_file(root)) {
    take(root, root.filename().generic_string());
  } else if (fs::is_directory(root)) {
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file()) take(e.path(), fs::relative(e.path(), root).generic_string());
    }
  } else {
    throw Error(ErrorCode::io, "no such file or directory: " + root.string());
  }
  std::sort(out.begin(), out.end(), [](const SourceFile& a, const SourceFile& b) { return a.name < b.name; });
  return out;
}

}  // namespace slicekit
