#include "fracgs/error.hpp"

namespace fracgs {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDimension: return "invalid-dimension";
    case ErrorCode::kOddPoints: return "odd-M";
    case ErrorCode::kSizeLimit: return "size-limit";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kTypeMismatch: return "type-mismatch";
    case ErrorCode::kRegime: return "model-regime";
    case ErrorCode::kLambdaAboveThreshold: return "lambda-above-threshold";
    case ErrorCode::kNoConvergence: return "no-convergence";
    case ErrorCode::kNonFinite: return "non-finite";
    case ErrorCode::kVersionMismatch: return "version-mismatch";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kMaximumAtEndpoint: return "maximum-at-endpoint";
    case ErrorCode::kRootOutOfRange: return "root-out-of-range";
    case ErrorCode::kNondegeneracyLoss: return "nondegeneracy-loss";
    case ErrorCode::kUsage: return "usage";
  }
  return "unknown";
}

}  // namespace fracgs
