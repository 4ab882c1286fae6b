#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fewl/core/types.hpp"
#include "fewl/ranking/table.hpp"
#include "fewl/similarity/embedder.hpp"

namespace fewl {

struct TopChoice {
  std::string question_id;
  std::string answer_id;
  std::string answer_text;
  double score = 0;
};

// Highest-scoring answer per question for the given column ("fewl" or an
// ablation name); the first row wins ties.
std::map<std::string, TopChoice> top_answers(const ScoreTable& table, const std::string& column = "fewl");

// Questions whose top answer differs between the two rankings, in dataset
// order. Throws CoverageGap when either side lacks a dataset question.
std::vector<std::string> icl_candidate_pool(const QADataset& dataset, const std::map<std::string, TopChoice>& fewl_top,
                                            const std::map<std::string, TopChoice>& baseline_top);

struct IclExample {
  std::string question;
  std::string answer;
};

// In-context prompt: numbered "Example Question i" / "Answer i" blocks, then
// "New Question".
std::string render_icl_prompt(const std::vector<IclExample>& examples, const std::string& test_question);

struct IclPrompt {
  std::string question_id;
  std::vector<std::string> example_ids;
  std::string prompt;
};

// For each test question, its `k` most similar pool questions (self
// excluded, ties by id) with their top FEWL answers as examples.
std::vector<IclPrompt> build_icl_prompts(const QADataset& dataset, const std::vector<std::string>& pool,
                                         const std::vector<Question>& test_questions,
                                         const std::map<std::string, TopChoice>& fewl_top, const Embedder& embedder,
                                         std::size_t k = 5);

struct SftSplit {
  std::vector<std::string> train;  // JSONL lines {"prompt", "completion"}
  std::vector<std::string> test;
};

// Seeded shuffle of the dataset questions, round(n * train_fraction) to train.
SftSplit sft_export(const QADataset& dataset, const std::map<std::string, TopChoice>& fewl_top, std::uint64_t seed,
                    double train_fraction = 0.8);

// Three-way A/B/"not sure" judging prompt for an external judge model.
std::string render_judge_prompt(const std::string& prompt, const std::string& answer_a, const std::string& answer_b);

}  // namespace fewl
