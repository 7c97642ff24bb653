#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "equilex/builder.hpp"
#include "equilex/norm_oracle.hpp"
#include "equilex/sequence_source.hpp"
#include "equilex/tail.hpp"

namespace equilex {

/// Flat run configuration. The text form is one `section.key = value` (or
/// `section.key: value`) per line; `#` starts a comment.
struct RunConfig {
  std::string space_kind = "lp";  // lp | custom-smooth
  double space_p = 2.0;
  std::size_t space_dim = 64;

  std::string sequence_kind = "unit-basis";  // unit-basis | perturbed-basis | block
  double sequence_beta = 0.5;
  std::size_t sequence_block = 2;
  BlockProfile sequence_profile = BlockProfile::kFlat;

  std::size_t n_points = 8;
  double prop_tol = 1e-7;
  double final_tol = 1e-8;
  double delta_cap = 0.1;
  std::size_t k_retries = 32;
  GateMode gate = GateMode::kCertified;
  double eps_scale = 0.05;

  /// Unset means 2·n_points + 8.
  std::optional<std::size_t> tail_start;
  std::size_t tail_window = 5;
  double tail_tol = 1e-8;

  std::size_t newton_max_iter = 60;
  double newton_res_tol = 1e-11;
  std::size_t newton_guard_samples = 200;

  std::uint64_t seed = 0;
  std::string output_path = "report.json";

  std::size_t effective_tail_start() const {
    return tail_start ? *tail_start : 2 * n_points + 8;
  }
  /// Smallest space.dim accepted for the current n_points and tail policy.
  std::size_t minimum_dim() const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates; throws kConfig with line and key context.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Throws kConfig naming the first violated constraint.
void validate(const RunConfig& config);

/// Text form accepted by parse_config; reals use 17 significant digits so
/// the round trip is exact.
std::string serialize_config(const RunConfig& config);

NormOracle make_oracle(const RunConfig& config);
SequenceSource make_source(const RunConfig& config);
TailPolicy make_policy(const RunConfig& config);
BuilderOptions make_builder_options(const RunConfig& config);

}  // namespace equilex
