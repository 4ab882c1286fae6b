#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fewl/core/error.hpp"
#include "fewl/core/types.hpp"

namespace fewl {

// Records as they come off the wire, before any invariant is checked.
struct RawAnswer {
  std::string id;
  std::string question_id;
  std::string text;
  std::string label;  // empty when absent or null
  std::string source;
};

struct RawQuestion {
  std::string id;
  std::string text;
  std::string topic_hint;
};

struct RawDataset {
  std::vector<RawQuestion> questions;
  std::vector<RawAnswer> answers;
  std::map<std::string, std::string> metadata;
};

struct Violation {
  ErrorCode code;
  std::string record_id;
  std::string detail;
};

// Carries every violation found, not just the first.
class DatasetValidationError : public Error {
 public:
  explicit DatasetValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

QADataset validate_dataset(const RawDataset& raw);

// JSONL: one question object per line,
//   {"id", "question", "answers": [{"id", "text", "label", "source"}], "topic_hint"?}
// Lines carrying "question_id" and no "question" are standalone answer records.
RawDataset parse_dataset_jsonl(std::string_view text);
QADataset load_dataset(const std::filesystem::path& path);

std::string dataset_to_jsonl(const QADataset& dataset);

}  // namespace fewl
