#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ssm {

enum class ErrorCode {
  kWeightSum,
  kWeightRange,
  kRatioRange,
  kSingleton,
  kTooFewMaps,
  kNotNormalized,
  kEmptyWord,
  kInvalidLetter,
  kExplosion,
  kTolerance,
  kUnequalRatio,
  kInsufficientBands,
  kLatticeResonance,
  kRationalInput,
  kNonMonic,
  kInvalidArgument,
};

// Stable names used in structured reports (CLI JSON, logs).
std::string_view error_name(ErrorCode code);

// True for errors raised while validating an IFS specification.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const { return error_name(code_); }

 private:
  ErrorCode code_;
};

// Raised when an enumeration would exceed its node or word cap.
class ExplosionError : public Error {
 public:
  ExplosionError(const std::string& message, double estimated_count)
      : Error(ErrorCode::kExplosion, message), estimated_count_(estimated_count) {}

  double estimated_count() const noexcept { return estimated_count_; }

 private:
  double estimated_count_;
};

}  // namespace ssm
