#include "fewl/core/types.hpp"

#include <algorithm>
#include <cctype>

#include "fewl/core/error.hpp"

namespace fewl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateQuestionId: return "DuplicateQuestionId";
    case ErrorCode::DanglingAnswer: return "DanglingAnswer";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::InvalidDataset: return "InvalidDataset";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownQuery: return "UnknownQuery";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::ReplayMiss: return "ReplayMiss";
    case ErrorCode::EmptyCompletion: return "EmptyCompletion";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::CacheIo: return "CacheIo";
    case ErrorCode::EmptyContrastiveSet: return "EmptyContrastiveSet";
    case ErrorCode::MissingLabels: return "MissingLabels";
    case ErrorCode::NoLabeledPairs: return "NoLabeledPairs";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::QuestionSetMismatch: return "QuestionSetMismatch";
    case ErrorCode::EmptyReferenceSet: return "EmptyReferenceSet";
    case ErrorCode::DenominatorZero: return "DenominatorZero";
    case ErrorCode::CoverageGap: return "CoverageGap";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string subject, const std::string& message)
    : std::runtime_error(message), code_(code), subject_(std::move(subject)) {}

Error::Error(ErrorCode code, std::string subject)
    : std::runtime_error(std::string(to_string(code)) + "(" + subject + ")"),
      code_(code),
      subject_(std::move(subject)) {}

std::string_view to_string(Label label) {
  switch (label) {
    case Label::NonHallu: return "non_hallu";
    case Label::HalfHallu: return "half_hallu";
    case Label::Hallu: return "hallu";
    case Label::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Label> parse_label(std::string_view text) {
  std::string s;
  for (char c : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s.empty() || s == "unknown") return Label::Unknown;
  if (s == "non_hallu" || s == "best") return Label::NonHallu;
  if (s == "half_hallu" || s == "good") return Label::HalfHallu;
  if (s == "hallu" || s == "bad") return Label::Hallu;
  return std::nullopt;
}

const Question* QADataset::find_question(std::string_view id) const {
  auto it = std::find_if(questions.begin(), questions.end(), [&](const Question& q) { return q.id == id; });
  return it == questions.end() ? nullptr : &*it;
}

const std::vector<Answer>& QADataset::answers_for(const std::string& question_id) const {
  static const std::vector<Answer> kEmpty;
  auto it = answers.find(question_id);
  return it == answers.end() ? kEmpty : it->second;
}

std::size_t QADataset::answer_count() const {
  std::size_t n = 0;
  for (const auto& [_, list] : answers) n += list.size();
  return n;
}

double FewlScore::recompute() const {
  if (per_reference.empty()) return 0.0;
  double sum = 0;
  for (const auto& t : per_reference) sum += t.weighted_truthfulness_term - t.penalty_term;
  return sum / static_cast<double>(per_reference.size());
}

}  // namespace fewl
