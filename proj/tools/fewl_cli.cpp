#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fewl/cli/run_config.hpp"
#include "fewl/core/dataset.hpp"
#include "fewl/core/error.hpp"
#include "fewl/curate/curate.hpp"
#include "fewl/ranking/compare.hpp"
#include "fewl/ranking/table.hpp"
#include "fewl/theorylab/chain.hpp"
#include "fewl/theorylab/variational.hpp"
#include "fewl/util/files.hpp"
#include "fewl/util/sha256.hpp"

#ifndef FEWL_VERSION
#define FEWL_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace fewl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitPartial = 2;

struct GlobalOptions {
  std::string config;
  std::string cache_dir;
  std::string fixture_dir;
  std::string mode;
  int max_concurrency = 0;
  std::optional<std::uint64_t> seed;
};

void print_error(const std::string& code, const std::string& subject, const std::string& message) {
  json j = {{"error", {{"code", code}, {"subject", subject}, {"message", message}}}};
  std::cerr << j.dump() << "\n";
}

RunOverrides overrides_from(const GlobalOptions& g) {
  RunOverrides o;
  if (!g.mode.empty()) o.mode = parse_provider_mode(g.mode);
  if (!g.cache_dir.empty()) o.cache_dir = g.cache_dir;
  if (!g.fixture_dir.empty()) o.fixture_dir = g.fixture_dir;
  if (g.max_concurrency > 0) o.max_concurrency = g.max_concurrency;
  o.seed = g.seed;
  return o;
}

RunConfig load_run_config(const GlobalOptions& g) {
  if (g.config.empty()) throw Error(ErrorCode::ConfigError, "--config", "this command needs --config");
  RunConfig c = RunConfig::load(g.config);
  apply_overrides(c, overrides_from(g));
  c.scoring.validate();
  return c;
}

RunManifest base_manifest(const std::string& command) {
  RunManifest m;
  m.command = command;
  m.tool_version = FEWL_VERSION;
  m.started_at = utc_timestamp();
  return m;
}

// Finalizes the manifest, writes manifest.json and returns its digest.
std::string write_manifest(const fs::path& out_dir, RunManifest& m) {
  m.finished_at = utc_timestamp();
  const std::string digest = m.digest();
  json j = m.to_json();
  j["manifest_digest"] = digest;
  util::write_file_atomic(out_dir / "manifest.json", j.dump(2) + "\n");
  return digest;
}

ScoreTable load_scores(const fs::path& dir) {
  const fs::path p = fs::is_directory(dir) ? dir / "scores.json" : dir;
  return table_from_json(util::read_file(p));
}

std::string file_digest(const fs::path& p) { return util::sha256_hex(util::read_file(p)); }

// ---- score ----------------------------------------------------------------

struct ScoreArgs {
  std::string dataset;
  std::string out;
};

int cmd_score(const GlobalOptions& g, const ScoreArgs& a) {
  RunConfig cfg = load_run_config(g);
  QADataset ds = load_dataset(a.dataset);
  BuiltResources built = build_resources(cfg);

  RunManifest m = base_manifest("score");
  ScoreTable table = score_dataset(ds, built.resources, cfg.scoring);

  m.config_digest = table.config_digest;
  m.dataset_digest = file_digest(a.dataset);
  m.providers = built.identities;
  m.seed = cfg.scoring.seed;
  m.mode = std::string(to_string(cfg.mode));
  m.extra = {{"ablations", cfg.scoring.ablations}, {"skipped_questions", table.skips.size()}};

  const fs::path out(a.out);
  fs::create_directories(out);
  const std::string digest = write_manifest(out, m);
  util::write_file_atomic(out / "scores.csv", table_to_csv(table, digest));
  util::write_file_atomic(out / "scores.json", table_to_json(table, digest));

  for (const auto& s : table.skips) print_error(s.code, s.question_id, s.message);
  std::cout << "scored " << table.rows.size() << " answers, skipped " << table.skips.size() << " questions -> "
            << out.string() << "\n";
  return table.skips.empty() ? kExitOk : kExitPartial;
}

// ---- rank -----------------------------------------------------------------

struct RankArgs {
  std::vector<std::string> dirs;
  std::string out;
};

int cmd_rank(const RankArgs& a) {
  if (a.dirs.size() < 2) throw Error(ErrorCode::InvalidArgument, "rank", "rank needs at least two score directories");
  std::map<std::string, ScoreTable> tables;
  std::vector<std::string> inputs;
  for (const auto& d : a.dirs) {
    std::string id = fs::path(d).filename().string();
    if (id.empty()) id = fs::path(d).parent_path().filename().string();
    if (tables.count(id)) throw Error(ErrorCode::DuplicateId, id, "two score directories share the name " + id);
    tables.emplace(id, load_scores(d));
    inputs.push_back(id);
  }
  auto ranking = rank_models(tables);
  const std::string md = ranking_to_markdown(ranking);
  if (a.out.empty()) {
    std::cout << md;
    return kExitOk;
  }
  RunManifest m = base_manifest("rank");
  m.config_digest = tables.begin()->second.config_digest;
  m.extra = {{"models", inputs}};
  fs::create_directories(a.out);
  const std::string digest = write_manifest(a.out, m);
  json rj = json::parse(ranking_to_json(ranking));
  rj["manifest_digest"] = digest;
  util::write_file_atomic(fs::path(a.out) / "ranking.json", rj.dump(2) + "\n");
  util::write_file_atomic(fs::path(a.out) / "ranking.md", md + "\n<!-- manifest_digest=" + digest + " -->\n");
  std::cout << md;
  return kExitOk;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
  std::vector<std::string> dirs;
  std::string oracle_dataset;
  std::string out;
};

// Winner between two models' answers per question: FEWL vs the similarity
// oracle built from the labelled answers of `oracle_dataset`.
json pairwise_report(const GlobalOptions& g, const CompareArgs& a, double& agreement) {
  const ScoreTable first = load_scores(a.dirs[0]);
  const ScoreTable second = load_scores(a.dirs[1]);
  const QADataset oracle = load_dataset(a.oracle_dataset);

  std::shared_ptr<const Embedder> embedder;
  if (!g.config.empty()) {
    RunConfig cfg = load_run_config(g);
    std::shared_ptr<const ResponseCache> cache;
    if (!cfg.cache_dir.empty() && cfg.mode != ProviderMode::Replay) {
      cache = std::make_shared<const ResponseCache>(cfg.cache_dir, true);
    }
    embedder = build_embedder(cfg, nullptr, cache);
  } else {
    embedder = std::make_shared<MockEmbedder>(256, 0);
  }

  auto first_rows = [](const ScoreTable& t) {
    std::map<std::string, const ScoreRow*> m;
    for (const auto& r : t.rows) m.try_emplace(r.question_id, &r);
    return m;
  };
  const auto ra = first_rows(first);
  const auto rb = first_rows(second);
  std::set<std::string> qa, qb;
  for (const auto& [q, _] : ra) qa.insert(q);
  for (const auto& [q, _] : rb) qb.insert(q);
  if (qa != qb) throw Error(ErrorCode::QuestionSetMismatch, "compare", "the two score tables cover different questions");

  std::map<std::string, Winner> fewl_w, oracle_w;
  for (const auto& [qid, row_a] : ra) {
    const Question* q = oracle.find_question(qid);
    if (!q) throw Error(ErrorCode::CoverageGap, qid, "oracle dataset has no question " + qid);
    std::vector<EmbeddingVector> correct, incorrect;
    for (const Answer& ans : oracle.answers_for(qid)) {
      if (ans.label == Label::NonHallu) correct.push_back(embed(*embedder, ans.text));
      if (ans.label == Label::Hallu) incorrect.push_back(embed(*embedder, ans.text));
    }
    const ScoreRow* row_b = rb.at(qid);
    const double ta = tqa_metric(embed(*embedder, row_a->answer_text), correct, incorrect);
    const double tb = tqa_metric(embed(*embedder, row_b->answer_text), correct, incorrect);
    fewl_w[qid] = pick_winner(row_a->score.value, row_b->score.value);
    oracle_w[qid] = pick_winner(ta, tb);
  }
  agreement = pairwise_agreement(fewl_w, oracle_w);
  return {{"first", a.dirs[0]}, {"second", a.dirs[1]}, {"questions", fewl_w.size()}, {"agreement", agreement}};
}

int cmd_compare(const GlobalOptions& g, const CompareArgs& a) {
  json out_json;
  std::string md;
  if (a.dirs.size() == 1) {
    const ScoreTable t = load_scores(a.dirs[0]);
    const ComparisonReport r = compare_labeled(t);
    out_json = json::parse(report_to_json(r));
    md = report_to_markdown(r, t.ablations);
  } else if (a.dirs.size() == 2) {
    if (a.oracle_dataset.empty()) {
      throw Error(ErrorCode::InvalidArgument, "--oracle-dataset", "pairwise comparison needs --oracle-dataset");
    }
    double agreement = 0;
    out_json = pairwise_report(g, a, agreement);
    char pct[32];
    std::snprintf(pct, sizeof pct, "%.2f", agreement * 100.0);
    md = std::string("| Comparison | Agreement (%) |\n|---|---|\n| FEWL vs oracle | ") + pct + " |\n";
  } else {
    throw Error(ErrorCode::InvalidArgument, "compare", "compare takes one score directory, or two for pairwise mode");
  }

  if (!a.out.empty()) {
    RunManifest m = base_manifest("compare");
    m.extra = {{"inputs", a.dirs}};
    if (!a.oracle_dataset.empty()) m.dataset_digest = file_digest(a.oracle_dataset);
    fs::create_directories(a.out);
    const std::string digest = write_manifest(a.out, m);
    out_json["manifest_digest"] = digest;
    util::write_file_atomic(fs::path(a.out) / "report.json", out_json.dump(2) + "\n");
    util::write_file_atomic(fs::path(a.out) / "report.md", md + "\n<!-- manifest_digest=" + digest + " -->\n");
  }
  std::cout << md;
  return kExitOk;
}

// ---- curate ---------------------------------------------------------------

struct CurateArgs {
  std::string kind;  // icl | sft
  std::string dataset;
  std::string fewl_scores;
  std::string baseline_scores;
  std::string baseline_column = "fewl";
  std::string test_dataset;
  std::string out;
  std::size_t neighbors = 5;
  double train_fraction = 0.8;
  bool emit_judge = false;
};

std::string jsonl(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

int cmd_curate(const GlobalOptions& g, const CurateArgs& a) {
  const QADataset ds = load_dataset(a.dataset);
  const ScoreTable fewl_table = load_scores(a.fewl_scores);
  const auto fewl_top = top_answers(fewl_table, "fewl");
  const fs::path out(a.out);
  fs::create_directories(out);

  RunManifest m = base_manifest("curate");
  m.dataset_digest = file_digest(a.dataset);
  m.config_digest = fewl_table.config_digest;
  m.seed = g.seed.value_or(0);
  m.extra = {{"kind", a.kind}, {"fewl_scores", a.fewl_scores}, {"baseline_scores", a.baseline_scores},
             {"baseline_column", a.baseline_column}, {"neighbors", a.neighbors}, {"train_fraction", a.train_fraction}};

  std::map<std::string, TopChoice> baseline_top;
  if (!a.baseline_scores.empty()) baseline_top = top_answers(load_scores(a.baseline_scores), a.baseline_column);

  std::vector<std::pair<std::string, std::string>> files;
  std::string summary;
  if (a.kind == "icl") {
    if (a.baseline_scores.empty()) {
      throw Error(ErrorCode::InvalidArgument, "--baseline", "icl curation needs --baseline scores");
    }
    const auto pool = icl_candidate_pool(ds, fewl_top, baseline_top);
    std::vector<Question> tests;
    if (!a.test_dataset.empty()) {
      tests = load_dataset(a.test_dataset).questions;
    } else {
      const std::set<std::string> in_pool(pool.begin(), pool.end());
      for (const auto& q : ds.questions) {
        if (!in_pool.count(q.id)) tests.push_back(q);
      }
    }
    std::shared_ptr<const Embedder> embedder;
    if (!g.config.empty()) {
      embedder = build_embedder(load_run_config(g), nullptr, nullptr);
    } else {
      embedder = std::make_shared<MockEmbedder>(256, 0);
    }
    std::vector<std::string> lines;
    for (const auto& p : build_icl_prompts(ds, pool, tests, fewl_top, *embedder, a.neighbors)) {
      lines.push_back(json{{"question_id", p.question_id}, {"examples", p.example_ids}, {"prompt", p.prompt}}.dump());
    }
    files.emplace_back("pool.json", json{{"pool", pool}, {"size", pool.size()}}.dump(2) + "\n");
    files.emplace_back("icl_prompts.jsonl", jsonl(lines));
    summary = "pool of " + std::to_string(pool.size()) + ", " + std::to_string(lines.size()) + " ICL prompts";
  } else {
    for (const auto& q : ds.questions) {
      if (!fewl_top.count(q.id)) throw Error(ErrorCode::CoverageGap, q.id, "question " + q.id + " has no FEWL scores");
    }
    const SftSplit split = sft_export(ds, fewl_top, g.seed.value_or(0), a.train_fraction);
    files.emplace_back("sft_train.jsonl", jsonl(split.train));
    files.emplace_back("sft_test.jsonl", jsonl(split.test));
    summary = std::to_string(split.train.size()) + " train / " + std::to_string(split.test.size()) + " test";
  }

  if (a.emit_judge) {
    if (baseline_top.empty()) {
      throw Error(ErrorCode::InvalidArgument, "--emit-judge-prompts", "judge prompts need --baseline scores");
    }
    std::vector<std::string> lines;
    for (const auto& q : ds.questions) {
      auto f = fewl_top.find(q.id);
      auto b = baseline_top.find(q.id);
      if (f == fewl_top.end() || b == baseline_top.end()) {
        throw Error(ErrorCode::CoverageGap, q.id, "question " + q.id + " has no scores");
      }
      lines.push_back(json{{"question_id", q.id},
                           {"a", f->second.answer_id},
                           {"b", b->second.answer_id},
                           {"prompt", render_judge_prompt(q.text, f->second.answer_text, b->second.answer_text)}}
                          .dump());
    }
    files.emplace_back("judge_prompts.jsonl", jsonl(lines));
  }

  const std::string digest = write_manifest(out, m);
  for (const auto& [name, body] : files) {
    util::write_file_atomic(out / name, name.ends_with(".jsonl") ? "# manifest_digest=" + digest + "\n" + body : body);
  }
  std::cout << summary << " -> " << out.string() << "\n";
  return kExitOk;
}

// ---- theory ---------------------------------------------------------------

struct TheoryArgs {
  std::string kind = "tv";
  std::size_t trials = 500;
  std::vector<std::size_t> sizes{4, 4, 4};
  std::size_t pairs = 50;
  std::size_t witnesses = 100;
  std::string out;
};

int cmd_theory(const GlobalOptions& g, const TheoryArgs& a) {
  const DivergenceKind kind = parse_divergence(a.kind);
  const std::uint64_t seed = g.seed.value_or(0);
  const theory::ChainSizes sizes{a.sizes[0], a.sizes[1], a.sizes[2]};

  const auto t1 = theory::verify_theorem1(a.trials, sizes, kind, seed);
  const auto lb = theory::check_lower_bound(a.pairs, a.witnesses, kind, seed);
  const auto tight = theory::check_tightness(a.pairs, kind, seed);
  const bool passed = t1.fraction_satisfied == 1.0 && lb.violations == 0 && tight.violations == 0;

  json j = json::parse(t1.to_json());
  j["sizes"] = a.sizes;
  auto suite = [](const theory::BoundSuiteReport& r) {
    return json{{"checks", r.checks}, {"violations", r.violations}, {"max_excess", r.max_excess}};
  };
  j["lower_bound"] = suite(lb);
  j["tightness"] = suite(tight);
  j["passed"] = passed;

  if (!a.out.empty()) {
    RunManifest m = base_manifest("theory");
    m.seed = seed;
    m.extra = {{"kind", a.kind}, {"trials", a.trials}, {"sizes", a.sizes}, {"pairs", a.pairs}, {"witnesses", a.witnesses}};
    const fs::path out(a.out);
    const fs::path dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
    fs::create_directories(dir);
    j["manifest_digest"] = write_manifest(dir, m);
    util::write_file_atomic(out, j.dump(2) + "\n");
  }
  std::cout << j.dump(2) << "\n";
  return passed ? kExitOk : kExitFatal;
}

// ---- cache ----------------------------------------------------------------

fs::path cache_dir_for(const GlobalOptions& g) {
  if (!g.cache_dir.empty()) return g.cache_dir;
  if (!g.config.empty()) {
    RunConfig c = RunConfig::load(g.config);
    if (!c.cache_dir.empty()) return c.cache_dir;
  }
  throw Error(ErrorCode::ConfigError, "--cache-dir", "no cache directory given (--cache-dir or run.cache_dir)");
}

int cmd_cache_stats(const GlobalOptions& g) {
  const ResponseCache cache(cache_dir_for(g), false);
  const CacheStats s = cache.stats();
  std::cout << json{{"dir", cache.dir().string()}, {"entries", s.entries}, {"bytes", s.bytes}}.dump() << "\n";
  return kExitOk;
}

int cmd_cache_clear(const GlobalOptions& g) {
  const ResponseCache cache(cache_dir_for(g), true);
  std::cout << json{{"dir", cache.dir().string()}, {"removed", cache.clear()}}.dump() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fewl: reference-free hallucination scoring and theory checks"};
  app.set_version_flag("--version", FEWL_VERSION);
  app.require_subcommand(1);

  GlobalOptions g;
  std::uint64_t seed = 0;
  auto* global = app.add_option_group("Global");
  global->add_option("--config", g.config, "Run configuration (TOML)");
  global->add_option("--cache-dir", g.cache_dir, "Response cache directory");
  global->add_option("--fixtures", g.fixture_dir, "Replay fixture directory");
  global->add_option("--max-concurrency", g.max_concurrency, "Maximum in-flight provider requests")
      ->check(CLI::PositiveNumber);
  global->add_option("--mode", g.mode, "Provider mode")->check(CLI::IsMember({"live", "replay", "mock"}));
  auto* seed_opt = global->add_option("--seed", seed, "Master seed");

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "Score every answer of a dataset");
  score->fallthrough();
  score->add_option("--dataset", score_args.dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  score->add_option("--out", score_args.out, "Output directory")->required();

  RankArgs rank_args;
  auto* rank = app.add_subcommand("rank", "Rank models by mean FEWL");
  rank->fallthrough();
  rank->add_option("dirs", rank_args.dirs, "Score directories, one per model")->required();
  rank->add_option("--out", rank_args.out, "Output directory");

  CompareArgs cmp_args;
  auto* compare = app.add_subcommand("compare", "Labelled-pair report, or pairwise agreement with an oracle");
  compare->fallthrough();
  compare->add_option("dirs", cmp_args.dirs, "Score directory (two for pairwise mode)")->required();
  compare->add_option("--oracle-dataset", cmp_args.oracle_dataset, "Dataset with labelled answers for the oracle")
      ->check(CLI::ExistingFile);
  compare->add_option("--out", cmp_args.out, "Output directory");

  CurateArgs cur_args;
  auto* curate = app.add_subcommand("curate", "Export ICL prompts or SFT data from FEWL scores");
  curate->fallthrough();
  curate->add_option("kind", cur_args.kind, "icl or sft")->required()->check(CLI::IsMember({"icl", "sft"}));
  curate->add_option("--dataset", cur_args.dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  curate->add_option("--fewl", cur_args.fewl_scores, "FEWL score directory")->required();
  curate->add_option("--baseline", cur_args.baseline_scores, "Baseline score directory");
  curate->add_option("--baseline-column", cur_args.baseline_column, "Column of the baseline table")
      ->capture_default_str();
  curate->add_option("--test-dataset", cur_args.test_dataset, "Questions to build ICL prompts for")
      ->check(CLI::ExistingFile);
  curate->add_option("--neighbors", cur_args.neighbors, "ICL examples per prompt")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  curate->add_option("--train-fraction", cur_args.train_fraction, "SFT train share")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  curate->add_flag("--emit-judge-prompts", cur_args.emit_judge, "Also write pairwise judging prompts");
  curate->add_option("--out", cur_args.out, "Output directory")->required();

  TheoryArgs th_args;
  auto* theory_cmd = app.add_subcommand("theory", "Check the variational bound and the DPI on random chains");
  theory_cmd->fallthrough();
  theory_cmd->add_option("--kind", th_args.kind, "tv, js or kl")
      ->capture_default_str()
      ->check(CLI::IsMember({"tv", "js", "kl"}, CLI::ignore_case));
  theory_cmd->add_option("--trials", th_args.trials, "Chain trials")->capture_default_str()->check(CLI::PositiveNumber);
  theory_cmd->add_option("--sizes", th_args.sizes, "Alphabet sizes h,A*,A")
      ->expected(3)
      ->delimiter(',')
      ->capture_default_str()
      ->check(CLI::Range(theory::kMinChainAlphabet, theory::kMaxChainAlphabet));
  theory_cmd->add_option("--pairs", th_args.pairs, "Random (P,Q) pairs for the bound suites")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  theory_cmd->add_option("--witnesses", th_args.witnesses, "Random witnesses per pair")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  theory_cmd->add_option("--out", th_args.out, "Report path (JSON)");

  auto* cache = app.add_subcommand("cache", "Inspect or clear the response cache");
  cache->fallthrough();
  cache->require_subcommand(1);
  auto* cache_stats = cache->add_subcommand("stats", "Entry count and size");
  auto* cache_clear = cache->add_subcommand("clear", "Remove every entry");
  cache_stats->fallthrough();
  cache_clear->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("UsageError", e.get_name(), e.what());
    return kExitFatal;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*score) return cmd_score(g, score_args);
    if (*rank) return cmd_rank(rank_args);
    if (*compare) return cmd_compare(g, cmp_args);
    if (*curate) return cmd_curate(g, cur_args);
    if (*theory_cmd) return cmd_theory(g, th_args);
    if (*cache_stats) return cmd_cache_stats(g);
    if (*cache_clear) return cmd_cache_clear(g);
  } catch (const DatasetValidationError& e) {
    json v = json::array();
    for (const auto& x : e.violations()) {
      v.push_back({{"code", std::string(to_string(x.code))}, {"record", x.record_id}, {"detail", x.detail}});
    }
    std::cerr << json{{"error", {{"code", "InvalidDataset"}, {"message", e.what()}, {"violations", v}}}}.dump() << "\n";
    return kExitFatal;
  } catch (const Error& e) {
    print_error(std::string(to_string(e.code())), e.subject(), e.what());
    return kExitFatal;
  } catch (const std::exception& e) {
    print_error("Internal", "", e.what());
    return kExitFatal;
  }
  return kExitFatal;
}
