#include "error.hpp"

namespace culturank {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::ChoiceCountError: return "ChoiceCountError";
    case ErrorCode::GoldIndexRange: return "GoldIndexRange";
    case ErrorCode::EmptyAliasList: return "EmptyAliasList";
    case ErrorCode::UnknownRegion: return "UnknownRegion";
    case ErrorCode::UnknownQuestion: return "UnknownQuestion";
    case ErrorCode::MissingGold: return "MissingGold";
    case ErrorCode::UnmatchedPrediction: return "UnmatchedPrediction";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidTemplate: return "InvalidTemplate";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NegativeScore: return "NegativeScore";
    case ErrorCode::NonFiniteLogit: return "NonFiniteLogit";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::ScorerUnavailable: return "ScorerUnavailable";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace culturank
