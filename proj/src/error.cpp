#include "sggmech/error.hpp"

namespace sggmech {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::EmptyInteractionSet: return "EmptyInteractionSet";
    case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorCode::LlmUnavailable: return "LlmUnavailable";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::NonFiniteCost: return "NonFiniteCost";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyNegativeSet: return "EmptyNegativeSet";
    case ErrorCode::TooFewEdges: return "TooFewEdges";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::MissingFeature: return "MissingFeature";
    case ErrorCode::NonFiniteComponent: return "NonFiniteComponent";
    case ErrorCode::MissingBox: return "MissingBox";
    case ErrorCode::UnknownSplit: return "UnknownSplit";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace sggmech
