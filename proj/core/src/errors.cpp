#include "equilex/errors.hpp"

namespace equilex {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNonFinite: return "NonFinite";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kZeroVector: return "ZeroVector";
    case ErrorKind::kNonSmoothPoint: return "NonSmoothPoint";
    case ErrorKind::kNonStabilizing: return "NonStabilizing";
    case ErrorKind::kLambdaTooSmall: return "LambdaTooSmall";
    case ErrorKind::kRootBracketing: return "RootBracketing";
    case ErrorKind::kDivisionGuard: return "DivisionGuard";
    case ErrorKind::kSingularMatrix: return "SingularMatrix";
    case ErrorKind::kGuardFailed: return "GuardFailed";
    case ErrorKind::kNoConvergence: return "NoConvergence";
    case ErrorKind::kLeftDomain: return "LeftDomain";
    case ErrorKind::kExhaustedPool: return "ExhaustedPool";
    case ErrorKind::kInvariantViolation: return "InvariantViolation";
    case ErrorKind::kConfig: return "Config";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace equilex
