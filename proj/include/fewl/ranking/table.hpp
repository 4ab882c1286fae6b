#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fewl/core/types.hpp"
#include "fewl/providers/chat.hpp"
#include "fewl/scoring/config.hpp"
#include "fewl/similarity/embedder.hpp"

namespace fewl {

struct ScoreRow {
  std::string question_id;
  std::string answer_id;
  Label label = Label::Unknown;
  std::string answer_text;
  FewlScore score;
  std::map<std::string, double> baseline_scores;  // ablation name -> value
};

struct SkipRecord {
  std::string question_id;
  std::string code;
  std::string message;
};

struct ScoreTable {
  std::vector<ScoreRow> rows;
  std::vector<std::string> ablations;  // column order
  std::vector<SkipRecord> skips;
  std::string config_digest;

  // Question ids with at least one row, in row order.
  std::vector<std::string> question_ids() const;
};

// columns: question_id, answer_id, label, fewl, <ablation>...
// A leading "# manifest_digest=..." comment line is written when a digest is given.
std::string table_to_csv(const ScoreTable& table, const std::string& manifest_digest = {});
std::string table_to_json(const ScoreTable& table, const std::string& manifest_digest = {});
ScoreTable table_from_json(const std::string& text);

struct ScoringResources {
  std::vector<std::shared_ptr<const ChatProvider>> references;  // h_1 .. h_N
  std::shared_ptr<const ChatProvider> generator;                // IW/CO pairs
  std::shared_ptr<const Embedder> embedder;
  int max_concurrency = 8;
};

// Scores every answer of every question under `config` plus each of
// config.ablations. Per-question failures are recorded in `skips` and the run
// continues. Output order follows the dataset, independent of thread count.
ScoreTable score_dataset(const QADataset& dataset, const ScoringResources& resources, const ScoringConfig& config);

}  // namespace fewl
