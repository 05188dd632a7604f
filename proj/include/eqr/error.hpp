#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eqr {

enum class ErrorCode {
  // trace container
  kBadMagic,
  kTruncatedPayload,
  kChecksumMismatch,
  kUnsupportedVersion,
  kUnrepresentableValue,
  kFormat,
  kIo,
  // numerics
  kNonFiniteInput,
  kLengthMismatch,
  kNonPositiveQ,
  kZeroVector,
  kEmptySequence,
  // pipeline
  kChainTooShort,
  kInvalidChain,
  kEmptyChain,
  // models
  kSingleClassTraining,
  kNonFiniteFeature,
  kSolverStall,
  kUnfittedModel,
  kEmptyBatch,
  kShapeMismatch,
  kNonFiniteLoss,
  // evaluation / analysis
  kClassTooSmall,
  kSingleClassLabels,
  kDegenerateDistribution,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace eqr
