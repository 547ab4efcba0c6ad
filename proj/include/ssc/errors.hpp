#pragma once

#include <stdexcept>
#include <string>

namespace ssc {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidLane,
  kOutOfCaptureRange,
  kOutOfRange,
  kDomainError,
  kInvalidHorizon,
  kEmptyInput,
  kNonIncreasingTime,
  kSeedCubeCollision,
  kEmptyFeasibleInterval,
  kStartOutsideCorridor,
  kGoalOutsideCorridor,
  kDimensionMismatch,
  kParseError,
  kSchemaVersionMismatch,
  kSeedCollision,
};

const char* to_string(ErrorCode code);

// All library failures surface as this exception; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ssc
