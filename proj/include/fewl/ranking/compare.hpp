#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fewl/ranking/table.hpp"
#include "fewl/similarity/embedding.hpp"

namespace fewl {

struct PairFractions {
  std::optional<double> nonhallu_beats_halfhallu;  // empty when no question has both labels
  std::optional<double> nonhallu_beats_hallu;
  std::size_t n_half = 0;   // questions with NonHallu and HalfHallu answers
  std::size_t n_hallu = 0;  // questions with NonHallu and Hallu answers
  std::size_t n_any = 0;    // questions with at least one of the two pairs
};

struct ComparisonReport {
  PairFractions fewl;
  std::map<std::string, PairFractions> per_mode;  // ablation column -> fractions
  std::size_t n_questions = 0;                    // questions with at least one labelled pair
};

// Per question, the best NonHallu score must strictly exceed the best
// HalfHallu (resp. Hallu) score; ties count as failures. Throws
// NoLabeledPairs when no question carries a usable label pair.
ComparisonReport compare_labeled(const ScoreTable& table);

std::string report_to_json(const ComparisonReport& report);
// Rows: one per scoring mode; columns mirror "Non-hallu v.s. Half-hallu (%)"
// and "Non-hallu v.s. Hallu (%)".
std::string report_to_markdown(const ComparisonReport& report, const std::vector<std::string>& mode_order);

struct ModelRank {
  std::string model_id;
  double mean_fewl = 0;
};

// Mean FEWL per model, descending, ties by model id. All tables must share a
// config digest (ConfigMismatch) and a question set (QuestionSetMismatch).
std::vector<ModelRank> rank_models(const std::map<std::string, ScoreTable>& tables);

std::string ranking_to_markdown(const std::vector<ModelRank>& ranking);
std::string ranking_to_json(const std::vector<ModelRank>& ranking);

// max_k cos(answer, correct_k) - max_k cos(answer, incorrect_k).
double tqa_metric(const EmbeddingVector& answer, std::span<const EmbeddingVector> correct,
                  std::span<const EmbeddingVector> incorrect);

enum class Winner { First, Second, Tie };

Winner pick_winner(double first, double second);

// Fraction of questions where the FEWL winner matches the oracle winner;
// oracle ties are left out of the denominator.
double pairwise_agreement(const std::map<std::string, Winner>& fewl_winners,
                          const std::map<std::string, Winner>& oracle_winners);

}  // namespace fewl
