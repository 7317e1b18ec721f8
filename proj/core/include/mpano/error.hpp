#pragma once

#include <stdexcept>
#include <string>

namespace mpano {

enum class ErrorCode {
  kPointBehindCamera,
  kNonPositiveDepth,
  kOutOfRange,
  kZeroVector,
  kEmptyCloud,
  kDimensionMismatch,
  kNoValidSamples,
  kFrameConvention,
  kInvalidPixel,
  kDegenerateOverlap,
  kTooManyLevels,
  kNoNeighbors,
  kInvalidDepth,
  kInvalidArgument,
  kParse,
  kInvariantViolation,
  kDegenerateSpec,
  kIo,
};

const char* to_string(ErrorCode code);

// Every failure in the library is reported through this type; the code is
// what callers and tests branch on, the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the category prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPointBehindCamera: return "point behind camera";
    case ErrorCode::kNonPositiveDepth: return "nonpositive depth";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kZeroVector: return "zero vector";
    case ErrorCode::kEmptyCloud: return "empty point cloud";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kNoValidSamples: return "no valid samples";
    case ErrorCode::kFrameConvention: return "frame convention mismatch";
    case ErrorCode::kInvalidPixel: return "invalid pixel";
    case ErrorCode::kDegenerateOverlap: return "degenerate overlap";
    case ErrorCode::kTooManyLevels: return "too many pyramid levels";
    case ErrorCode::kNoNeighbors: return "no neighbor stations";
    case ErrorCode::kInvalidDepth: return "invalid depth";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kInvariantViolation: return "invariant violation";
    case ErrorCode::kDegenerateSpec: return "degenerate scene spec";
    case ErrorCode::kIo: return "io error";
  }
  return "unknown error";
}

}  // namespace mpano
