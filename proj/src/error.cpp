#include "eqr/error.hpp"

namespace eqr {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kUnrepresentableValue: return "UnrepresentableValue";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNonPositiveQ: return "NonPositiveQ";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kChainTooShort: return "ChainTooShort";
    case ErrorCode::kInvalidChain: return "InvalidChain";
    case ErrorCode::kEmptyChain: return "EmptyChain";
    case ErrorCode::kSingleClassTraining: return "SingleClassTraining";
    case ErrorCode::kNonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::kSolverStall: return "SolverStall";
    case ErrorCode::kUnfittedModel: return "UnfittedModel";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kClassTooSmall: return "ClassTooSmall";
    case ErrorCode::kSingleClassLabels: return "SingleClassLabels";
    case ErrorCode::kDegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace eqr
