#pragma once

#include <stdexcept>
#include <string>

namespace fracgs {

enum class ErrorCode {
  kInvalidDimension,
  kOddPoints,
  kSizeLimit,
  kInvalidArgument,
  kTypeMismatch,
  kRegime,
  kLambdaAboveThreshold,
  kNoConvergence,
  kNonFinite,
  kVersionMismatch,
  kLengthMismatch,
  kIo,
  kMaximumAtEndpoint,
  kRootOutOfRange,
  kNondegeneracyLoss,
  kUsage,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fracgs
