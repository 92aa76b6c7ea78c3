#pragma once

#include <stdexcept>
#include <string>

namespace mor {

enum class ErrorCode {
  kInvalidInput,
  kDimensionMismatch,
  kSingularPencil,
  kSingularSystem,
  kPoleHit,
  kDegenerateProjection,
  kDegenerateGramian,
  kUnstable,
  kNotConverged,
  kUnsupportedSize,
  kEmptyBasis,
  kCoercivityBound,
  kInternalConsistency,
  kIo,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid input";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kSingularPencil: return "singular pencil";
    case ErrorCode::kSingularSystem: return "singular system";
    case ErrorCode::kPoleHit: return "pole hit";
    case ErrorCode::kDegenerateProjection: return "degenerate projection";
    case ErrorCode::kDegenerateGramian: return "degenerate gramian";
    case ErrorCode::kUnstable: return "unstable";
    case ErrorCode::kNotConverged: return "not converged";
    case ErrorCode::kUnsupportedSize: return "unsupported size";
    case ErrorCode::kEmptyBasis: return "empty basis";
    case ErrorCode::kCoercivityBound: return "coercivity bound";
    case ErrorCode::kInternalConsistency: return "internal consistency";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace mor
