#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "equilex/norm_oracle.hpp"
#include "equilex/point.hpp"
#include "equilex/sequence_source.hpp"
#include "equilex/tail.hpp"

namespace equilex {

/// ⦀(y, a)⦀ = lim_j ‖y − a·tail(j)‖ on Y ⊕ ℝ, evaluated over the single
/// window of `policy`.
double extended_norm(const NormOracle& oracle, const Point& y, double a,
                     const SequenceSource& tail, const TailPolicy& policy);

/// Same limit over an explicit index window.
double extended_norm(const NormOracle& oracle, const Point& y, double a,
                     const SequenceSource& tail,
                     std::span<const std::size_t> window, double tol);

/// φ_{(y,a)}((z,b)) = lim_j φ_{y − a·tail(j)}(z − b·tail(j)).
double extended_support_apply(const NormOracle& oracle, const Point& y, double a,
                              const Point& z, double b, const SequenceSource& tail,
                              const TailPolicy& policy);

double extended_support_apply(const NormOracle& oracle, const Point& y, double a,
                              const Point& z, double b, const SequenceSource& tail,
                              std::span<const std::size_t> window, double tol);

struct ExtendedModulus {
  /// Sampled ρ̂ of the extended norm.
  double extended = 0.0;
  /// ρ̂ of the base norm over the same samples pushed into X as the
  /// normalized pairs (u_j/‖u_j‖, v_j/‖v_j‖), u_j = y − a·tail(j).
  double mapped_base = 0.0;
};

/// Samples (y, a), (z, b) on the unit sphere of ⦀·⦀ with y, z supported on
/// the coordinates preceding the tail window.
ExtendedModulus extended_modulus_of_smoothness(const NormOracle& oracle,
                                               const SequenceSource& tail,
                                               const TailPolicy& policy, double tau,
                                               std::size_t samples,
                                               std::uint64_t seed);

}  // namespace equilex
