#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sggmech {

enum class ErrorCode {
  DimMismatch,
  KOutOfRange,
  EmptyInteractionSet,
  EmptyVocabulary,
  LlmUnavailable,
  Io,
  MalformedRecord,
  UnknownClass,
  UnknownCategory,
  NonFiniteCost,
  TooLarge,
  LengthMismatch,
  ShapeMismatch,
  EmptyInput,
  EmptyNegativeSet,
  TooFewEdges,
  InvalidProbability,
  MissingFeature,
  NonFiniteComponent,
  MissingBox,
  UnknownSplit,
  ConfigInvalid,
  UnsupportedFormat,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; the code distinguishes failure kinds.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised for JSONL inputs; line numbers are 1-based.
class MalformedRecordError : public Error {
 public:
  MalformedRecordError(std::size_t line_no, const std::string& detail)
      : Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": " + detail),
        line_no_(line_no) {}

  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

}  // namespace sggmech
