// slicekit: dataflow inspection, corpus generation, ground truth,
// constrained slicing and evaluation.

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "slicekit/slicekit.hpp"

namespace sk = slicekit;
using nlohmann::json;

namespace {

void emit(const std::string& out_path, const std::string& data) {
  if (out_path.empty() || out_path == "-") {
    std::cout << data;
    std::cout.flush();
  } else {
    sk::write_file(out_path, data);
  }
}

sk::Lang resolve_lang(const std::string& flag, const std::string& path) {
  if (!flag.empty()) return sk::parse_lang(flag);
  if (auto l = sk::lang_of(path)) return *l;
  throw sk::Error(sk::ErrorCode::unknown_language, "cannot infer the language of " + path + "; pass --lang");
}

std::optional<sk::Lang> optional_lang(const std::string& flag) {
  if (flag.empty()) return std::nullopt;
  return sk::parse_lang(flag);
}

// mock:gold[,noise=X][,kind=K]
struct MockSpec {
  double noise = 0.0;
  sk::NoiseKind kind = sk::NoiseKind::out_of_input;
};

MockSpec parse_mock_spec(std::string_view spec) {
  std::string_view rest = spec.substr(5);
  MockSpec m;
  bool target_seen = false;
  while (!rest.empty()) {
    std::size_t comma = rest.find(',');
    std::string_view part = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
    if (part == "gold") {
      target_seen = true;
    } else if (part.substr(0, 6) == "noise=") {
      try {
        m.noise = std::stod(std::string(part.substr(6)));
      } catch (const std::exception&) {
        throw sk::Error(sk::ErrorCode::invalid_argument, "bad noise in scorer spec");
      }
    } else if (part.substr(0, 5) == "kind=") {
      m.kind = sk::parse_noise_kind(part.substr(5));
    } else {
      throw sk::Error(sk::ErrorCode::invalid_argument, "unknown scorer option '" + std::string(part) + "'");
    }
  }
  if (!target_seen) throw sk::Error(sk::ErrorCode::invalid_argument, "mock scorer needs the 'gold' target");
  if (!(m.noise >= 0.0 && m.noise < 1.0)) throw sk::Error(sk::ErrorCode::invalid_argument, "noise must lie in [0, 1)");
  return m;
}

std::string describe(const sk::DecodeResult& r) {
  std::string s = r.text;
  if (r.degraded) s += "   [degraded]";
  return s;
}

int run_demo(const sk::DecodeConfig& base) {
  sk::CharTokenizer tok;
  for (const auto& ex : sk::fixtures::all()) {
    auto q = ex.query();
    auto oracle = sk::oracle_slice(q);
    std::cout << "== " << ex.name << " (criterion " << ex.criterion_var << " @ " << ex.criterion_line << ")\n";
    std::cout << "oracle slice:\n" << oracle.numbered_text() << "\n";
    std::cout << "faulty generation:\n" << ex.generated << "\n";
    sk::ScriptedScorer scorer(tok, {{tok.encode(ex.generated), 0.6}, {tok.encode(ex.expected), 0.4}});
    struct Mode {
      const char* label;
      bool lexical;
      bool tsed;
    };
    for (Mode m : {Mode{"no constraints", false, false}, Mode{"lexical only", true, false},
                   Mode{"tsed only", false, true}, Mode{"both constraints", true, true}}) {
      sk::DecodeConfig cfg = base;
      cfg.lexical_mask = m.lexical;
      cfg.tsed_prune = m.tsed;
      auto r = sk::constrained_beam_search(q, scorer, tok, cfg);
      bool ok = r.text == ex.expected;
      std::cout << "-- " << m.label << ": " << (ok ? "expected slice" : "faulty slice")
                << " (pruned beams " << r.stats.pruned << ")\n"
                << describe(r) << "\n";
    }
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backward static slicing with constrained decoding"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Optional TOML/INI config; flags win");

  std::string log_level = "warn";
  std::uint64_t seed = 0;
  int jobs = 1;
  app.add_option("--log-level", log_level, "error|warn|info|debug")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));
  app.add_option("--seed", seed, "Global seed")->envname("SLICEKIT_SEED");
  app.add_option("--jobs", jobs, "Worker threads for per-item work")->check(CLI::PositiveNumber);

  std::string lang_flag;
  std::string in_path;
  std::string out_path;

  auto* dfg_cmd = app.add_subcommand("dfg", "Print the data flow graph as JSON");
  dfg_cmd->add_option("--lang", lang_flag, "java|python");
  dfg_cmd->add_option("--in", in_path, "Source file")->required();

  sk::CorpusOptions copt;
  std::string task_name;
  auto* corpus_cmd = app.add_subcommand("corpus", "Generate pretraining or fine-tuning pairs");
  corpus_cmd->add_option("task", task_name, "perm|span|sft")->required()->check(CLI::IsMember({"perm", "span", "sft"}));
  corpus_cmd->add_option("--lang", lang_flag, "Only this language");
  corpus_cmd->add_option("--mask-ratio", copt.mask_ratio, "Span corruption ratio")->capture_default_str();
  corpus_cmd->add_option("--max-swaps", copt.max_swaps, "Permutation swaps")->capture_default_str();
  corpus_cmd->add_option("--sentinel", copt.sentinel_format, "Sentinel format, {k} is the index")->capture_default_str();
  corpus_cmd->add_option("--max-per-file", copt.max_per_file, "Criteria per file for sft (0 = all)");
  corpus_cmd->add_option("--in", in_path, "Source file or directory")->required();
  corpus_cmd->add_option("--out", out_path, "Output JSONL (default stdout)");

  int max_per_file = 0;
  auto* oracle_cmd = app.add_subcommand("oracle", "Ground-truth slices for every criterion");
  oracle_cmd->add_option("--lang", lang_flag, "Only this language");
  oracle_cmd->add_option("--max-per-file", max_per_file, "Criteria per file (0 = all)");
  oracle_cmd->add_option("--in", in_path, "Source file or directory")->required();
  oracle_cmd->add_option("--out", out_path, "Output JSONL (default stdout)");

  sk::DecodeConfig dcfg;
  std::string scorer_spec;
  bool no_lexical = false;
  bool no_tsed = false;
  bool no_fallback = false;
  std::string label_mode = "symbol";
  auto* slice_cmd = app.add_subcommand("slice", "Decode slices for a dataset");
  slice_cmd->add_option("--scorer", scorer_spec, "mock:gold[,noise=X][,kind=K] or proto://HOST:PORT")->required();
  slice_cmd->add_option("--beam", dcfg.beam_size, "Beam size")->capture_default_str()->check(CLI::PositiveNumber);
  slice_cmd->add_option("--max-len", dcfg.max_len, "Maximum generated tokens")->capture_default_str()->check(CLI::PositiveNumber);
  slice_cmd->add_option("--length-penalty", dcfg.length_penalty, "Exponent for length normalization")->capture_default_str();
  slice_cmd->add_flag("--no-lexical", no_lexical, "Disable the lexical mask");
  slice_cmd->add_flag("--no-tsed", no_tsed, "Disable TSED pruning");
  slice_cmd->add_flag("--no-fallback", no_fallback, "Fail instead of returning a degraded slice");
  slice_cmd->add_option("--label-mode", label_mode, "symbol|symbol+text")->capture_default_str();
  slice_cmd->add_option("--in", in_path, "Dataset JSONL")->required();
  slice_cmd->add_option("--out", out_path, "Predictions JSONL (default stdout)");

  std::string a_path;
  std::string b_path;
  auto* tsed_cmd = app.add_subcommand("tsed", "Tree similarity of two files");
  tsed_cmd->add_option("a", a_path, "Reference file")->required();
  tsed_cmd->add_option("b", b_path, "Candidate file")->required();
  tsed_cmd->add_option("--lang", lang_flag, "java|python");
  tsed_cmd->add_option("--label-mode", label_mode, "symbol|symbol+text")->capture_default_str();

  std::string gold_path;
  std::string pred_path;
  bool table = false;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against gold");
  eval_cmd->add_option("--gold", gold_path, "Gold JSONL")->required();
  eval_cmd->add_option("--pred", pred_path, "Predictions JSONL")->required();
  eval_cmd->add_option("--out", out_path, "Report JSON (default stdout)");
  eval_cmd->add_flag("--table", table, "Print a table to standard error");
  eval_cmd->add_option("--label-mode", label_mode, "symbol|symbol+text")->capture_default_str();

  auto* demo_cmd = app.add_subcommand("demo", "Run the motivating examples with and without constraints");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  auto logger = spdlog::stderr_color_mt("slicekit");
  logger->set_pattern("%^%l%$: %v");
  logger->set_level(spdlog::level::from_str(log_level));

  try {
    if (*dfg_cmd) {
      auto unit = sk::load_unit(sk::read_file(in_path), resolve_lang(lang_flag, in_path));
      emit(out_path, sk::to_json(sk::build_dfg(unit)).dump(2) + "\n");
    } else if (*corpus_cmd) {
      copt.task = sk::parse_corpus_task(task_name);
      copt.seed = seed;
      if (copt.task == sk::CorpusTask::perm && copt.max_swaps < 1) {
        throw sk::Error(sk::ErrorCode::invalid_argument, "--max-swaps must be at least 1");
      }
      auto files = sk::load_sources(in_path, optional_lang(lang_flag));
      logger->info("{} source files", files.size());
      auto per_file = sk::parallel_map<std::vector<json>>(
          files.size(), jobs, [&](std::size_t i) { return sk::corpus_records(files[i], copt); });
      std::vector<json> rows;
      for (auto& v : per_file) rows.insert(rows.end(), v.begin(), v.end());
      emit(out_path, sk::to_jsonl(rows));
    } else if (*oracle_cmd) {
      auto files = sk::load_sources(in_path, optional_lang(lang_flag));
      auto per_file = sk::parallel_map<std::vector<sk::DatasetItem>>(
          files.size(), jobs, [&](std::size_t i) { return sk::oracle_items(files[i], max_per_file, seed); });
      std::vector<json> rows;
      for (const auto& v : per_file) {
        for (const auto& it : v) rows.push_back(sk::to_json(it));
      }
      logger->info("{} gold slices from {} files", rows.size(), files.size());
      emit(out_path, sk::to_jsonl(rows));
    } else if (*slice_cmd) {
      dcfg.lexical_mask = !no_lexical;
      dcfg.tsed_prune = !no_tsed;
      dcfg.fallback_on_empty = !no_fallback;
      dcfg.tsed.label_mode = sk::parse_label_mode(label_mode);
      dcfg.validate();
      auto items = sk::read_dataset(in_path);
      sk::CharTokenizer tok;
      std::vector<sk::DatasetItem> preds;
      if (scorer_spec.rfind("mock:", 0) == 0) {
        MockSpec mock = parse_mock_spec(scorer_spec);
        preds = sk::parallel_map<sk::DatasetItem>(items.size(), jobs, [&](std::size_t i) {
          const auto& it = items[i];
          sk::MockCopyScorer scorer(tok, tok.encode(it.slice_text), mock.noise, mock.kind, sk::item_seed(seed, it.id));
          auto q = it.query();
          auto r = sk::constrained_beam_search(q, scorer, tok, dcfg);
          return sk::make_item(it.id, q, r.slice);
        });
      } else if (scorer_spec.rfind("proto://", 0) == 0) {
        // One connection per worker.
        std::vector<std::unique_ptr<sk::ProtocolScorer>> conns;
        int workers = std::max(1, std::min<int>(jobs, static_cast<int>(items.size())));
        for (int w = 0; w < workers; ++w) conns.push_back(sk::connect_scorer(scorer_spec));
        std::atomic<int> next_conn{0};
        thread_local int my_conn = -1;
        preds = sk::parallel_map<sk::DatasetItem>(items.size(), workers, [&](std::size_t i) {
          if (my_conn < 0) my_conn = next_conn++;
          const auto& it = items[i];
          auto q = it.query();
          auto r = sk::constrained_beam_search(q, *conns[static_cast<std::size_t>(my_conn)], tok, dcfg);
          return sk::make_item(it.id, q, r.slice);
        });
      } else {
        throw sk::Error(sk::ErrorCode::invalid_argument, "unknown scorer '" + scorer_spec + "'");
      }
      std::vector<json> rows;
      int degraded = 0;
      for (const auto& p : preds) {
        rows.push_back(sk::to_json(p, true));
        degraded += p.degraded ? 1 : 0;
      }
      logger->info("{} slices decoded, {} degraded", rows.size(), degraded);
      emit(out_path, sk::to_jsonl(rows));
    } else if (*tsed_cmd) {
      sk::Lang lang = resolve_lang(lang_flag, a_path);
      sk::TsedOptions opt;
      opt.label_mode = sk::parse_label_mode(label_mode);
      auto s = sk::tsed(sk::read_file(a_path), sk::read_file(b_path), lang, opt);
      json j{{"value", s.value},
             {"distance", s.distance},
             {"nodes_x", s.nodes_x},
             {"nodes_y", s.nodes_y},
             {"approximate", s.approximate}};
      emit("", j.dump(2) + "\n");
    } else if (*eval_cmd) {
      sk::TsedOptions opt;
      opt.label_mode = sk::parse_label_mode(label_mode);
      auto gold = sk::read_dataset(gold_path);
      auto pred = sk::read_dataset(pred_path);
      auto pairs = sk::align(gold, pred);
      auto scores = sk::parallel_map<sk::ItemScore>(
          pairs.size(), jobs, [&](std::size_t i) { return sk::score_item(*pairs[i].first, *pairs[i].second, opt); });
      auto report = sk::summarize(std::move(scores));
      emit(out_path, sk::to_json(report).dump(2) + "\n");
      if (table) std::cerr << sk::format_table(report);
    } else if (*demo_cmd) {
      return run_demo(dcfg);
    }
  } catch (const sk::Error& e) {
    logger->error("{}", e.what());
    return 1;
  } catch (const std::logic_error& e) {
    logger->critical("internal invariant violated: {}", e.what());
    return 2;
  } catch (const std::exception& e) {
    logger->critical("{}", e.what());
    return 2;
  }
  return 0;
}
