#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fewl/core/divergence.hpp"

namespace fewl {

enum class Label { NonHallu, HalfHallu, Hallu, Unknown };

std::string_view to_string(Label label);  // "non_hallu", "half_hallu", "hallu", "unknown"
// Accepts the dataset spellings plus the best/good/bad grading of
// Truthful-QA-style corpora. Empty input maps to Unknown.
std::optional<Label> parse_label(std::string_view text);

struct Question {
  std::string id;
  std::string text;
  std::optional<std::string> topic_hint;
};

struct Answer {
  std::string id;
  std::string question_id;
  std::string text;
  Label label = Label::Unknown;
  std::string source;
};

struct QADataset {
  std::vector<Question> questions;
  std::map<std::string, std::vector<Answer>> answers;  // question_id -> answers
  std::map<std::string, std::string> metadata;

  const Question* find_question(std::string_view id) const;
  const std::vector<Answer>& answers_for(const std::string& question_id) const;
  std::size_t answer_count() const;
};

// One Intentionally-Wrong answer and its Corrected counterpart.
struct ContrastivePair {
  std::string iw_text;
  std::string co_text;
  int index = 1;  // 1-based
};

struct ExpertiseWeights {
  std::vector<double> raw;     // r_i(x)
  std::vector<double> lambda;  // softmax(r / tau)
  double temperature = 1.0;
};

struct ReferenceTerm {
  std::string reference_id;
  double similarity = 0;
  double lambda = 0;
  double weighted_truthfulness_term = 0;
  double penalty_mean = 0;
  double penalty_term = 0;
};

struct FewlScore {
  double value = 0;
  std::vector<ReferenceTerm> per_reference;
  DivergenceKind divergence = DivergenceKind::TV;
  std::string config_digest;
  bool empty_penalty_warning = false;

  // value recomputed from the per-reference decomposition.
  double recompute() const;
};

}  // namespace fewl
