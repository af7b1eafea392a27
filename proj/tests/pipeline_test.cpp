#include <gtest/gtest.h>

#include <stdexcept>

#include "slicekit/slicekit.hpp"

using namespace slicekit;

namespace {

const std::filesystem::path kSources = std::filesystem::path(SLICEKIT_DATA_DIR) / "sources";

std::string dump_all(const std::vector<std::vector<nlohmann::json>>& per_file) {
  std::string out;
  for (const auto& recs : per_file) {
    for (const auto& r : recs) out += r.dump() + "\n";
  }
  return out;
}

}  // namespace

TEST(ParallelMap, KeepsIndexOrder) {
  for (int jobs : {1, 2, 8}) {
    auto v = parallel_map<int>(100, jobs, [](std::size_t i) { return static_cast<int>(i * i); });
    ASSERT_EQ(v.size(), 100u);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], static_cast<int>(i * i));
  }
  EXPECT_TRUE(parallel_map<int>(0, 4, [](std::size_t) { return 1; }).empty());
}

TEST(ParallelMap, RethrowsWorkerFailure) {
  for (int jobs : {1, 4}) {
    EXPECT_THROW(parallel_map<int>(50, jobs,
                                   [](std::size_t i) {
                                     if (i == 17) throw std::runtime_error("boom");
                                     return 0;
                                   }),
                 std::runtime_error);
  }
}

TEST(Sources, SamplesLoadAndParse) {
  auto files = load_sources(kSources);
  ASSERT_EQ(files.size(), 4u);
  EXPECT_TRUE(std::is_sorted(files.begin(), files.end(),
                             [](const SourceFile& a, const SourceFile& b) { return a.name < b.name; }));
  EXPECT_EQ(load_sources(kSources, Lang::java).size(), 2u);
  for (const auto& f : files) {
    auto tree = parse(f.text, f.lang);
    EXPECT_FALSE(tree.has_error()) << f.name;
  }
}

TEST(OracleItems, IdsAndSlicesAreConsistent) {
  for (const auto& f : load_sources(kSources)) {
    auto items = oracle_items(f, 0, 1);
    ASSERT_FALSE(items.empty()) << f.name;
    std::set<std::string> ids;
    for (const auto& it : items) {
      EXPECT_TRUE(ids.insert(it.id).second) << it.id;
      EXPECT_EQ(it.id, f.name + "#" + it.criterion_var + "@" + std::to_string(it.criterion_line));
      EXPECT_TRUE(std::is_sorted(it.slice_lines.begin(), it.slice_lines.end()));
      EXPECT_NE(std::find(it.slice_lines.begin(), it.slice_lines.end(), it.criterion_line), it.slice_lines.end());
      auto round = item_from_json(to_json(it));
      EXPECT_EQ(round.slice_text, it.slice_text);
    }
  }
}

TEST(OracleItems, SampleCapIsSeededAndOrdered) {
  auto files = load_sources(kSources);
  const auto& f = files.front();
  auto all = oracle_items(f, 0, 1);
  ASSERT_GT(all.size(), 3u);
  auto a = oracle_items(f, 3, 9);
  auto b = oracle_items(f, 3, 9);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].id, b[i].id);
  EXPECT_LE(a[0].criterion_line, a[1].criterion_line);
  EXPECT_LE(a[1].criterion_line, a[2].criterion_line);
}

TEST(Corpus, OutputDoesNotDependOnJobs) {
  auto files = load_sources(kSources);
  for (auto task : {CorpusTask::perm, CorpusTask::span, CorpusTask::sft}) {
    CorpusOptions opt;
    opt.task = task;
    opt.seed = 5;
    auto run = [&](int jobs) {
      return dump_all(parallel_map<std::vector<nlohmann::json>>(
          files.size(), jobs, [&](std::size_t i) { return corpus_records(files[i], opt); }));
    };
    auto serial = run(1);
    EXPECT_FALSE(serial.empty());
    EXPECT_EQ(serial, run(4)) << to_string(task);
  }
}

TEST(Corpus, RecordsRoundTrip) {
  CorpusOptions opt;
  opt.task = CorpusTask::span;
  opt.seed = 3;
  for (const auto& f : load_sources(kSources)) {
    for (const auto& r : corpus_records(f, opt)) {
      EXPECT_EQ(r["task"], "span");
      auto input = r["input"].get<std::string>();
      auto target = r["target"].get<std::string>();
      EXPECT_EQ(reconstruct(input, target, r["meta"]["sentinels"].get<std::size_t>(), opt.sentinel_format), f.text)
          << f.name;
    }
  }
  opt.task = CorpusTask::perm;
  for (const auto& f : load_sources(kSources)) {
    auto r = corpus_records(f, opt).at(0);
    EXPECT_EQ(r["input"], f.text);
  }
}

TEST(Corpus, UnknownTaskRejected) {
  EXPECT_EQ(parse_corpus_task("sft"), CorpusTask::sft);
  EXPECT_THROW(parse_corpus_task("mlm"), Error);
}
