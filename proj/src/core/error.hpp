#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace culturank {

enum class ErrorCode {
  // input errors
  MissingFile,
  MalformedRecord,
  DuplicateId,
  ChoiceCountError,
  GoldIndexRange,
  EmptyAliasList,
  UnknownRegion,
  UnknownQuestion,
  MissingGold,
  UnmatchedPrediction,
  InvalidConfig,
  InvalidTemplate,
  IoError,
  // numeric preconditions
  DimensionMismatch,
  ZeroVector,
  OutOfRange,
  NegativeScore,
  NonFiniteLogit,
  // backends
  ProviderUnavailable,
  ScorerUnavailable,
  // internal
  IdMismatch,
  Internal,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace culturank
