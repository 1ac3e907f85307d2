#include "ssm/error.hpp"

namespace ssm {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kWeightSum: return "WeightSumError";
    case ErrorCode::kWeightRange: return "WeightRangeError";
    case ErrorCode::kRatioRange: return "RatioRangeError";
    case ErrorCode::kSingleton: return "SingletonError";
    case ErrorCode::kTooFewMaps: return "TooFewMapsError";
    case ErrorCode::kNotNormalized: return "NotNormalizedError";
    case ErrorCode::kEmptyWord: return "EmptyWordError";
    case ErrorCode::kInvalidLetter: return "InvalidLetterError";
    case ErrorCode::kExplosion: return "ExplosionError";
    case ErrorCode::kTolerance: return "ToleranceError";
    case ErrorCode::kUnequalRatio: return "UnequalRatioError";
    case ErrorCode::kInsufficientBands: return "InsufficientBandsError";
    case ErrorCode::kLatticeResonance: return "LatticeResonanceError";
    case ErrorCode::kRationalInput: return "RationalInputError";
    case ErrorCode::kNonMonic: return "NonMonicError";
    case ErrorCode::kInvalidArgument: return "InvalidArgumentError";
  }
  return "UnknownError";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kWeightSum:
    case ErrorCode::kWeightRange:
    case ErrorCode::kRatioRange:
    case ErrorCode::kSingleton:
    case ErrorCode::kTooFewMaps:
      return true;
    default:
      return false;
  }
}

}  // namespace ssm
