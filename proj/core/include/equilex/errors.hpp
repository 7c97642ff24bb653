#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace equilex {

/// Failure categories surfaced by the library. Every thrown `Error` carries
/// exactly one of these so callers (and reports) can branch on it.
enum class ErrorKind {
  kDimensionMismatch,
  kNonFinite,
  kInvalidArgument,
  kZeroVector,
  kNonSmoothPoint,
  kNonStabilizing,
  kLambdaTooSmall,
  kRootBracketing,
  kDivisionGuard,
  kSingularMatrix,
  kGuardFailed,
  kNoConvergence,
  kLeftDomain,
  kExhaustedPool,
  kInvariantViolation,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace equilex
