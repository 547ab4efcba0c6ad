#include "ssc/errors.hpp"

namespace ssc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidLane: return "InvalidLane";
    case ErrorCode::kOutOfCaptureRange: return "OutOfCaptureRange";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kInvalidHorizon: return "InvalidHorizon";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNonIncreasingTime: return "NonIncreasingTime";
    case ErrorCode::kSeedCubeCollision: return "SeedCubeCollision";
    case ErrorCode::kEmptyFeasibleInterval: return "EmptyFeasibleInterval";
    case ErrorCode::kStartOutsideCorridor: return "StartOutsideCorridor";
    case ErrorCode::kGoalOutsideCorridor: return "GoalOutsideCorridor";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::kSeedCollision: return "SeedCollision";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace ssc
