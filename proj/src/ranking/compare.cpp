#include "fewl/ranking/compare.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "fewl/core/error.hpp"

namespace fewl {

using json = nlohmann::json;

namespace {

struct LabelMax {
  std::optional<double> non, half, hallu;
};

void bump(std::optional<double>& slot, double v) { slot = slot ? std::max(*slot, v) : v; }

template <typename ScoreOf>
PairFractions fractions(const ScoreTable& table, ScoreOf score_of) {
  std::map<std::string, LabelMax> per_question;
  for (const auto& row : table.rows) {
    const std::optional<double> s = score_of(row);
    if (!s) continue;
    LabelMax& m = per_question[row.question_id];
    switch (row.label) {
      case Label::NonHallu: bump(m.non, *s); break;
      case Label::HalfHallu: bump(m.half, *s); break;
      case Label::Hallu: bump(m.hallu, *s); break;
      case Label::Unknown: break;
    }
  }
  PairFractions f;
  std::size_t wins_half = 0, wins_hallu = 0;
  for (const auto& [_, m] : per_question) {
    if (!m.non) continue;
    if (m.half || m.hallu) ++f.n_any;
    if (m.half) {
      ++f.n_half;
      if (*m.non > *m.half) ++wins_half;
    }
    if (m.hallu) {
      ++f.n_hallu;
      if (*m.non > *m.hallu) ++wins_hallu;
    }
  }
  if (f.n_half) f.nonhallu_beats_halfhallu = static_cast<double>(wins_half) / static_cast<double>(f.n_half);
  if (f.n_hallu) f.nonhallu_beats_hallu = static_cast<double>(wins_hallu) / static_cast<double>(f.n_hallu);
  return f;
}

json fractions_json(const PairFractions& f) {
  json j;
  j["nonhallu_beats_halfhallu"] = f.nonhallu_beats_halfhallu ? json(*f.nonhallu_beats_halfhallu) : json(nullptr);
  j["nonhallu_beats_hallu"] = f.nonhallu_beats_hallu ? json(*f.nonhallu_beats_hallu) : json(nullptr);
  j["n_half"] = f.n_half;
  j["n_hallu"] = f.n_hallu;
  return j;
}

std::string pct(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v * 100.0);
  return buf;
}

}  // namespace

ComparisonReport compare_labeled(const ScoreTable& table) {
  ComparisonReport report;
  report.fewl = fractions(table, [](const ScoreRow& r) -> std::optional<double> { return r.score.value; });
  if (report.fewl.n_half == 0 && report.fewl.n_hallu == 0) {
    throw Error(ErrorCode::NoLabeledPairs, "table", "no question has a NonHallu answer alongside a HalfHallu or Hallu one");
  }
  for (const auto& mode : table.ablations) {
    report.per_mode[mode] = fractions(table, [&](const ScoreRow& r) -> std::optional<double> {
      auto it = r.baseline_scores.find(mode);
      if (it == r.baseline_scores.end()) return std::nullopt;
      return it->second;
    });
  }
  report.n_questions = report.fewl.n_any;
  return report;
}

std::string report_to_json(const ComparisonReport& report) {
  json doc;
  doc["n_questions"] = report.n_questions;
  doc["fewl"] = fractions_json(report.fewl);
  json modes = json::object();
  for (const auto& [name, f] : report.per_mode) modes[name] = fractions_json(f);
  doc["per_mode"] = std::move(modes);
  return doc.dump(2) + "\n";
}

std::string report_to_markdown(const ComparisonReport& report, const std::vector<std::string>& mode_order) {
  std::string out = "| Method | Non-hallu v.s. Half-hallu (%) | Non-hallu v.s. Hallu (%) |\n|---|---|---|\n";
  for (const auto& mode : mode_order) {
    auto it = report.per_mode.find(mode);
    if (it == report.per_mode.end()) continue;
    out += "| " + mode + " | " + pct(it->second.nonhallu_beats_halfhallu) + " | " + pct(it->second.nonhallu_beats_hallu) + " |\n";
  }
  out += "| FEWL | " + pct(report.fewl.nonhallu_beats_halfhallu) + " | " + pct(report.fewl.nonhallu_beats_hallu) + " |\n";
  return out;
}

std::vector<ModelRank> rank_models(const std::map<std::string, ScoreTable>& tables) {
  std::vector<ModelRank> out;
  const ScoreTable* first = nullptr;
  std::set<std::string> first_questions;
  for (const auto& [model, table] : tables) {
    const auto qids = table.question_ids();
    const std::set<std::string> qs(qids.begin(), qids.end());
    if (!first) {
      first = &table;
      first_questions = qs;
    } else {
      if (table.config_digest != first->config_digest) {
        throw Error(ErrorCode::ConfigMismatch, model, "score table for " + model + " was produced with a different config");
      }
      if (qs != first_questions) {
        throw Error(ErrorCode::QuestionSetMismatch, model, "score table for " + model + " covers a different question set");
      }
    }
    double sum = 0;
    for (const auto& r : table.rows) sum += r.score.value;
    out.push_back({model, table.rows.empty() ? 0.0 : sum / static_cast<double>(table.rows.size())});
  }
  std::sort(out.begin(), out.end(), [](const ModelRank& a, const ModelRank& b) {
    if (a.mean_fewl != b.mean_fewl) return a.mean_fewl > b.mean_fewl;
    return a.model_id < b.model_id;
  });
  return out;
}

std::string ranking_to_markdown(const std::vector<ModelRank>& ranking) {
  std::string out = "| Model | FEWL |\n|---|---|\n";
  for (const auto& r : ranking) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", r.mean_fewl);
    out += "| " + r.model_id + " | " + buf + " |\n";
  }
  return out;
}

std::string ranking_to_json(const std::vector<ModelRank>& ranking) {
  json arr = json::array();
  for (const auto& r : ranking) arr.push_back({{"model", r.model_id}, {"fewl", r.mean_fewl}});
  return json{{"ranking", arr}}.dump(2) + "\n";
}

double tqa_metric(const EmbeddingVector& answer, std::span<const EmbeddingVector> correct,
                  std::span<const EmbeddingVector> incorrect) {
  if (correct.empty() || incorrect.empty()) {
    throw Error(ErrorCode::EmptyReferenceSet, correct.empty() ? "correct" : "incorrect",
                "TQA metric needs non-empty correct and incorrect answer sets");
  }
  double best_c = -std::numeric_limits<double>::infinity();
  double best_i = -std::numeric_limits<double>::infinity();
  for (const auto& c : correct) best_c = std::max(best_c, cosine(answer, c));
  for (const auto& i : incorrect) best_i = std::max(best_i, cosine(answer, i));
  return best_c - best_i;
}

Winner pick_winner(double first, double second) {
  if (first > second) return Winner::First;
  if (second > first) return Winner::Second;
  return Winner::Tie;
}

double pairwise_agreement(const std::map<std::string, Winner>& fewl_winners,
                          const std::map<std::string, Winner>& oracle_winners) {
  if (fewl_winners.size() != oracle_winners.size() ||
      !std::equal(fewl_winners.begin(), fewl_winners.end(), oracle_winners.begin(),
                  [](const auto& a, const auto& b) { return a.first == b.first; })) {
    throw Error(ErrorCode::QuestionSetMismatch, "pairwise", "FEWL and oracle winners cover different questions");
  }
  std::size_t matches = 0, denom = 0;
  for (const auto& [qid, oracle] : oracle_winners) {
    if (oracle == Winner::Tie) continue;
    ++denom;
    if (fewl_winners.at(qid) == oracle) ++matches;
  }
  if (denom == 0) throw Error(ErrorCode::DenominatorZero, "pairwise", "every oracle comparison is a tie");
  return static_cast<double>(matches) / static_cast<double>(denom);
}

}  // namespace fewl
