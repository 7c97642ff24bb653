#pragma once

#include <string>

#include "equilex/builder.hpp"
#include "equilex/config.hpp"

namespace equilex {

inline constexpr int kReportSchemaVersion = 1;

/// Exit codes shared by the CLI and the report helpers.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

/// JSON report text: fixed key order, reals with 17 significant digits,
/// non-finite reals as null. No timings, so equal inputs give equal bytes.
std::string make_report(const RunConfig& config, const BuildOutcome& outcome);

/// Writes `text` to `path` through a temporary file and a rename.
/// Throws kIo on failure.
void write_atomically(const std::string& path, const std::string& text);

/// Writes the report and maps the outcome to an exit code: 0 on success,
/// 2 on construction failure, 1 when the file cannot be written.
int emit_report(const RunConfig& config, const BuildOutcome& outcome, const std::string& path);

struct VerifyResult {
  int exit_code = kExitUsage;
  double lambda = 0.0;
  double defect = 0.0;
  std::size_t points = 0;
  std::string message;
};

/// Recomputes every pairwise distance of the report's points with a
/// standalone norm implementation and compares with the declared λ.
VerifyResult verify_points(const std::string& report_path, double tol);

}  // namespace equilex
