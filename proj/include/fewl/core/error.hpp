#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fewl {

enum class ErrorCode {
  DuplicateQuestionId,
  DanglingAnswer,
  EmptyText,
  InvalidDataset,
  DomainError,
  DimensionMismatch,
  DuplicateId,
  UnknownQuery,
  ProviderUnavailable,
  ReplayMiss,
  EmptyCompletion,
  ParseFailure,
  CacheIo,
  EmptyContrastiveSet,
  MissingLabels,
  NoLabeledPairs,
  ConfigMismatch,
  QuestionSetMismatch,
  EmptyReferenceSet,
  DenominatorZero,
  CoverageGap,
  SupportViolation,
  ConfigError,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library. `subject` names the
/// offending record (question id, config key, file path, ...) when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string subject, const std::string& message);
  Error(ErrorCode code, std::string subject);

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace fewl
