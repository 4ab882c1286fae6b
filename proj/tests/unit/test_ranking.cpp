#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <functional>
#include <omp.h>

#include "fewl/core/error.hpp"
#include "fewl/ranking/compare.hpp"
#include "fewl/ranking/table.hpp"

using namespace fewl;

namespace {

ScoreRow row(const std::string& q, const std::string& a, Label label, double fewl,
             std::map<std::string, double> baselines = {}) {
  ScoreRow r;
  r.question_id = q;
  r.answer_id = a;
  r.label = label;
  r.score.value = fewl;
  r.baseline_scores = std::move(baselines);
  return r;
}

ScoreTable table_of(std::vector<ScoreRow> rows, const std::string& digest = "d") {
  ScoreTable t;
  t.rows = std::move(rows);
  t.config_digest = digest;
  return t;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an fewl::Error");
  return ErrorCode::Io;
}

EmbeddingVector at(double c) { return EmbeddingVector({c, std::sqrt(1 - c * c)}); }

// Three questions with three labelled answers each, scored through mock
// providers. Question "q2" can be made to fail contrastive parsing.
struct MiniWorld {
  QADataset ds;
  ScoringResources res;
  ScoringConfig cfg;

  explicit MiniWorld(bool break_q2 = false, int threads = 4) {
    const std::vector<std::string> topics = {"rivers of europe", "planets of the solar system", "painters of italy"};
    const std::vector<std::string> good = {"The Danube flows through Vienna and Budapest.",
                                           "Jupiter is the largest planet orbiting our sun.",
                                           "Botticelli painted The Birth of Venus in Florence."};
    const std::vector<std::string> half = {"The Danube is somewhere in Europe, probably.",
                                           "Jupiter might be big, hard to say.",
                                           "Botticelli was a painter of some kind."};
    const std::vector<std::string> bad = {"Madrid sits on the banks of that river.",
                                          "Mercury outweighs every other world nearby.",
                                          "A Norwegian sculptor carved it near Oslo."};
    for (int i = 0; i < 3; ++i) {
      const std::string qid = "q" + std::to_string(i + 1);
      ds.questions.push_back({qid, "Which fact about " + topics[i] + " is true?", {}});
      ds.answers[qid] = {
          {qid + "-good", qid, good[i], Label::NonHallu, "t"},
          {qid + "-half", qid, half[i], Label::HalfHallu, "t"},
          {qid + "-bad", qid, bad[i], Label::Hallu, "t"},
      };
    }
    auto make = [=, this](const std::string& name, bool weak) {
      ProviderConfig c;
      c.name = name;
      c.model = name + "-model";
      c.mode = ProviderMode::Mock;
      return std::make_shared<const ChatProvider>(c, nullptr, nullptr, [=](const ChatRequest& r) {
        const std::size_t i = std::stoul(r.question_id.substr(1)) - 1;
        if (r.purpose == ChatPurpose::Contrastive) {
          if (break_q2 && r.question_id == "q2") return std::string("I would rather not.");
          return "1. Wrong Answer: " + bad[i] + " 1. Non-Wrong Answer: " + good[i] + "\n\n";
        }
        return weak ? bad[i] : good[i];
      });
    };
    res.references = {make("strong", false), make("weak", true)};
    res.generator = res.references[0];
    res.embedder = std::make_shared<MockEmbedder>(128, 0);
    res.max_concurrency = threads;
    cfg.n_contrastive = 1;
    cfg.n_neighbors = 2;
    cfg.neighbor_lo = -1;
    cfg.multi_samples = 2;
    cfg.ablations = {"single_no_penalty", "uniform_lambda", "ideal_lambda", "multi_no_penalty"};
  }
};

}  // namespace

TEST_SUITE("ranking") {
  TEST_CASE("compare_labeled examples") {
    auto both = table_of({row("q1", "a", Label::NonHallu, 0.5), row("q1", "b", Label::HalfHallu, 0.2),
                          row("q1", "c", Label::Hallu, 0.1), row("q2", "a", Label::NonHallu, 0.3),
                          row("q2", "b", Label::HalfHallu, 0.1), row("q2", "c", Label::Hallu, 0.0)});
    auto r = compare_labeled(both);
    CHECK(r.fewl.nonhallu_beats_halfhallu == 1.0);
    CHECK(r.fewl.nonhallu_beats_hallu == 1.0);
    CHECK(r.n_questions == 2);

    auto tie = table_of({row("q1", "a", Label::NonHallu, 0.5), row("q1", "b", Label::HalfHallu, 0.5),
                         row("q2", "a", Label::NonHallu, 0.3), row("q2", "b", Label::HalfHallu, 0.1)});
    auto t = compare_labeled(tie);
    CHECK(t.fewl.nonhallu_beats_halfhallu == 0.5);
    CHECK_FALSE(t.fewl.nonhallu_beats_hallu.has_value());
    CHECK(t.fewl.n_half == 2);
    CHECK(t.fewl.n_hallu == 0);

    auto unlabeled = table_of({row("q1", "a", Label::Unknown, 0.5), row("q1", "b", Label::Unknown, 0.1)});
    CHECK(code_of([&] { (void)compare_labeled(unlabeled); }) == ErrorCode::NoLabeledPairs);
  }

  TEST_CASE("compare_labeled uses the best answer per label and reports per mode") {
    auto t = table_of({row("q1", "a", Label::NonHallu, 0.1, {{"m", 0.9}}), row("q1", "a2", Label::NonHallu, 0.6, {{"m", 0.0}}),
                       row("q1", "b", Label::Hallu, 0.5, {{"m", 0.95}})});
    t.ablations = {"m"};
    auto r = compare_labeled(t);
    CHECK(r.fewl.nonhallu_beats_hallu == 1.0);
    CHECK(r.per_mode.at("m").nonhallu_beats_hallu == 0.0);
    const std::string md = report_to_markdown(r, t.ablations);
    CHECK(md.rfind("| Method | Non-hallu v.s. Half-hallu (%) | Non-hallu v.s. Hallu (%) |\n|---|---|---|\n", 0) == 0);
    CHECK(md.find("| m | n/a | 0.00 |") != std::string::npos);
    CHECK(md.find("| FEWL | n/a | 100.00 |") != std::string::npos);
    auto j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["fewl"]["nonhallu_beats_hallu"] == 1.0);
    CHECK(j["fewl"]["nonhallu_beats_halfhallu"].is_null());
  }

  TEST_CASE("rank_models examples") {
    std::map<std::string, ScoreTable> tables;
    tables["modelB"] = table_of({row("q1", "a", Label::Unknown, 0.02), row("q2", "a", Label::Unknown, 0.02)});
    tables["modelA"] = table_of({row("q1", "a", Label::Unknown, 0.05), row("q2", "a", Label::Unknown, 0.03)});
    auto r = rank_models(tables);
    REQUIRE(r.size() == 2);
    CHECK(r[0].model_id == "modelA");
    CHECK(r[0].mean_fewl == doctest::Approx(0.04));
    CHECK(r[1].model_id == "modelB");
    CHECK(ranking_to_markdown(r) == "| Model | FEWL |\n|---|---|\n| modelA | 0.0400 |\n| modelB | 0.0200 |\n");

    tables["modelC"] = table_of({row("q1", "a", Label::Unknown, 0.02)});
    CHECK(code_of([&] { (void)rank_models(tables); }) == ErrorCode::QuestionSetMismatch);
    tables["modelC"] = table_of({row("q1", "a", Label::Unknown, 0.02), row("q2", "a", Label::Unknown, 0.02)}, "other");
    CHECK(code_of([&] { (void)rank_models(tables); }) == ErrorCode::ConfigMismatch);
  }

  TEST_CASE("rank_models breaks ties by model id") {
    std::map<std::string, ScoreTable> tables;
    tables["zeta"] = table_of({row("q1", "a", Label::Unknown, 0.1)});
    tables["alpha"] = table_of({row("q1", "a", Label::Unknown, 0.1)});
    auto r = rank_models(tables);
    CHECK(r[0].model_id == "alpha");
  }

  TEST_CASE("ranking serializes as ordered (model, score) pairs") {
    std::vector<ModelRank> r = {{"GPT-4", 0.0401}, {"GPT-3.5", 0.0250}};
    auto j = nlohmann::json::parse(ranking_to_json(r));
    REQUIRE(j["ranking"].size() == 2);
    CHECK(j["ranking"][0]["model"] == "GPT-4");
    CHECK(j["ranking"][0]["fewl"] == 0.0401);
    CHECK(j["ranking"][0].size() == 2);
  }

  TEST_CASE("tqa_metric examples and antisymmetry") {
    const EmbeddingVector y({1.0, 0.0});
    std::vector<EmbeddingVector> c = {at(0.9), at(0.7)}, i = {at(0.4), at(0.8)};
    CHECK(tqa_metric(y, c, i) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(tqa_metric(y, c, c) == 0.0);
    CHECK(tqa_metric(y, i, c) == -tqa_metric(y, c, i));
    CHECK(code_of([&] { (void)tqa_metric(y, c, {}); }) == ErrorCode::EmptyReferenceSet);
  }

  TEST_CASE("pairwise_agreement examples") {
    using W = Winner;
    std::map<std::string, W> f = {{"1", W::First}, {"2", W::Second}, {"3", W::First}, {"4", W::First}};
    std::map<std::string, W> o = {{"1", W::First}, {"2", W::Second}, {"3", W::First}, {"4", W::Second}};
    CHECK(pairwise_agreement(f, o) == 0.75);

    std::map<std::string, W> ties = {{"1", W::Tie}, {"2", W::Tie}, {"3", W::Tie}, {"4", W::Tie}};
    CHECK(code_of([&] { (void)pairwise_agreement(f, ties); }) == ErrorCode::DenominatorZero);

    std::map<std::string, W> f10, o10;
    for (int q = 0; q < 10; ++q) {
      const std::string id = "q" + std::to_string(q);
      o10[id] = q == 0 ? W::Tie : W::First;
      f10[id] = q >= 1 && q <= 6 ? W::First : W::Second;
    }
    CHECK(pairwise_agreement(f10, o10) == doctest::Approx(6.0 / 9.0).epsilon(1e-12));

    std::map<std::string, W> short_map = {{"1", W::First}};
    CHECK(code_of([&] { (void)pairwise_agreement(f, short_map); }) == ErrorCode::QuestionSetMismatch);
  }

  TEST_CASE("scale-free argmax: positive rescaling changes no decision") {
    auto base = table_of({row("q1", "a", Label::NonHallu, 0.03, {{"m", -0.2}}), row("q1", "b", Label::HalfHallu, 0.05, {{"m", 0.1}}),
                          row("q1", "c", Label::Hallu, -0.01, {{"m", 0.3}}), row("q2", "a", Label::NonHallu, 0.2, {{"m", 0.4}}),
                          row("q2", "b", Label::Hallu, 0.1, {{"m", 0.4}})});
    base.ablations = {"m"};
    auto other = table_of({row("q1", "x", Label::Unknown, 0.04), row("q2", "x", Label::Unknown, 0.02)});
    for (double c : {0.5, 3.0}) {
      auto scaled = base;
      for (auto& r : scaled.rows) {
        r.score.value *= c;
        for (auto& [_, v] : r.baseline_scores) v *= c;
      }
      auto a = compare_labeled(base), b = compare_labeled(scaled);
      CHECK(a.fewl.nonhallu_beats_halfhallu == b.fewl.nonhallu_beats_halfhallu);
      CHECK(a.fewl.nonhallu_beats_hallu == b.fewl.nonhallu_beats_hallu);
      CHECK(a.per_mode.at("m").nonhallu_beats_hallu == b.per_mode.at("m").nonhallu_beats_hallu);

      auto one = table_of({row("q1", "a", Label::Unknown, 0.03), row("q2", "a", Label::Unknown, 0.2)});
      auto one_scaled = one;
      for (auto& r : one_scaled.rows) r.score.value *= c;
      std::map<std::string, ScoreTable> t1 = {{"base", one}, {"other", other}};
      auto other_scaled = other;
      for (auto& r : other_scaled.rows) r.score.value *= c;
      std::map<std::string, ScoreTable> t2 = {{"base", one_scaled}, {"other", other_scaled}};
      CHECK(rank_models(t1)[0].model_id == rank_models(t2)[0].model_id);
      CHECK(pick_winner(0.03, 0.04) == pick_winner(0.03 * c, 0.04 * c));
    }
  }

  TEST_CASE("table csv and json") {
    auto t = table_of({row("q1", "a,1", Label::NonHallu, 0.1, {{"m", 0.25}}), row("q1", "b", Label::Hallu, -1e-3)});
    t.ablations = {"m"};
    t.skips.push_back({"q9", "ReplayMiss", "ReplayMiss(q9)"});
    const std::string csv = table_to_csv(t, "abc");
    CHECK(csv == "# manifest_digest=abc\nquestion_id,answer_id,label,fewl,m\nq1,\"a,1\",non_hallu,0.1,0.25\nq1,b,hallu,-0.001,\n");
    auto back = table_from_json(table_to_json(t, "abc"));
    CHECK(back.rows.size() == 2);
    CHECK(back.rows[0].answer_id == "a,1");
    CHECK(back.rows[0].baseline_scores.at("m") == 0.25);
    CHECK(back.rows[1].score.value == -1e-3);
    CHECK(back.skips.size() == 1);
    CHECK(back.config_digest == "d");
    CHECK(table_to_csv(back, "abc") == csv);
    CHECK(code_of([] { (void)table_from_json("{\"rows\": 3}"); }) == ErrorCode::Io);
  }

  TEST_CASE("score_dataset: 3 questions x 3 answers -> 9 rows") {
    MiniWorld w;
    auto t = score_dataset(w.ds, w.res, w.cfg);
    REQUIRE(t.rows.size() == 9);
    CHECK(t.skips.empty());
    CHECK(t.config_digest == w.cfg.digest());
    CHECK(t.ablations == w.cfg.ablations);
    CHECK(t.rows[0].question_id == "q1");
    CHECK(t.rows[0].answer_id == "q1-good");
    CHECK(t.rows[8].answer_id == "q3-bad");
    for (const auto& r : t.rows) {
      CHECK(r.score.config_digest == t.config_digest);
      CHECK(r.score.per_reference.size() == 2);
      CHECK(std::abs(r.score.value - r.score.recompute()) <= 1e-9);
      CHECK(r.baseline_scores.size() == 4);
    }
    // The strong reference agrees with the contrastive corrections, so it carries more weight.
    CHECK(t.rows[0].score.per_reference[0].lambda > t.rows[0].score.per_reference[1].lambda);
    auto report = compare_labeled(t);
    CHECK(report.fewl.nonhallu_beats_hallu == 1.0);
  }

  TEST_CASE("score_dataset: one contrastive failure -> 6 rows and a skip record") {
    MiniWorld w(true);
    auto t = score_dataset(w.ds, w.res, w.cfg);
    CHECK(t.rows.size() == 6);
    REQUIRE(t.skips.size() == 1);
    CHECK(t.skips[0].question_id == "q2");
    CHECK(t.skips[0].code == "ParseFailure");
    for (const auto& r : t.rows) CHECK(r.question_id != "q2");
  }

  TEST_CASE("score_dataset: identical across thread counts and reruns") {
    MiniWorld one(false, 1), many(false, 8);
    omp_set_num_threads(1);
    auto a = score_dataset(one.ds, one.res, one.cfg);
    omp_set_num_threads(8);
    auto b = score_dataset(many.ds, many.res, many.cfg);
    auto c = score_dataset(many.ds, many.res, many.cfg);
    CHECK(table_to_csv(a) == table_to_csv(b));
    CHECK(table_to_json(b) == table_to_json(c));
  }

  TEST_CASE("score_dataset: ideal lambda without labels is recorded, not fatal") {
    MiniWorld w;
    for (auto& [qid, answers] : w.ds.answers) {
      for (auto& a : answers) a.label = Label::Unknown;
    }
    w.cfg.ablations = {"ideal_lambda"};
    auto t = score_dataset(w.ds, w.res, w.cfg);
    CHECK(t.rows.empty());
    CHECK(t.skips.size() == 3);
    CHECK(t.skips[0].code == "MissingLabels");
  }
}
