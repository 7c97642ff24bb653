#pragma once

#include <cstddef>
#include <vector>

#include "equilex/norm_oracle.hpp"
#include "equilex/sequence_source.hpp"
#include "equilex/tail.hpp"

namespace equilex {

inline constexpr double kDefaultLambdaMargin = 0.05;

/// Result of the common-λ rescaling. Entry n-1 of `scalars` is a_n for the
/// usable indices n < policy.start; tail indices carry the declared limit 1.
struct Rescaling {
  std::vector<double> scalars;
  std::vector<double> tail_distances;  // λ_n, same indexing as scalars
  double lambda = 0.0;
  double tail_norm = 1.0;  // lim ‖x_i‖ removed before solving

  double scalar(std::size_t index) const {
    return index >= 1 && index <= scalars.size() ? scalars[index - 1] : 1.0;
  }
};

/// Normalizes the tail to unit norm, measures λ_n = lim_i ‖x_n − x_i‖ and
/// λ = lim_n λ_n, then solves lim_i ‖a_n x_n − x_i‖ = λ for each usable n by
/// bracketed root finding on [0, 1 + (λ − λ_n)/ε + slack], ε = (λ − 1)/4.
/// Throws kLambdaTooSmall when λ <= 1 + margin.
Rescaling rescale_to_common_lambda(const SequenceSource& src, const NormOracle& oracle,
                                   const TailPolicy& policy,
                                   double margin = kDefaultLambdaMargin);

/// y_n = a_n x_n / lim‖x_i‖.
SequenceSource apply_rescaling(const SequenceSource& src, const Rescaling& r);

struct StabilizedSequence {
  SequenceSource source;
  double lambda = 0.0;
  double C = 0.0;
  std::vector<double> scalars;      // a_n of the final rescaling
  std::vector<double> functional_limits;  // b_ℓ observed on the rescaled input
  std::vector<double> residual_limits;    // b_ℓ recomputed on the output
  bool differenced = false;
  TailPolicy policy;

  /// Last index usable for points (everything before the tail window).
  std::size_t usable_end() const { return policy.start - 1; }
};

/// b_ℓ = lim_k lim_i φ_{x_k − x_i}(x_ℓ) for ℓ in [1, policy.start).
std::vector<double> functional_limits(const SequenceSource& src, const NormOracle& oracle,
                                      const TailPolicy& policy);

/// Rescales, and when some |b_ℓ| exceeds tol replaces x by
/// v_ℓ = x_{2ℓ+1} − (b_{2ℓ+1}/b_{2ℓ}) x_{2ℓ} followed by a second rescaling.
StabilizedSequence kill_functional_limits(const SequenceSource& src,
                                          const NormOracle& oracle,
                                          const TailPolicy& policy,
                                          double margin = kDefaultLambdaMargin);

/// Separation assumptions used downstream, measured on indices [1, last]:
/// min over k != i of ‖z_k − z_i‖ − (1+λ)/2 and min of (3+λ)/4 − ‖z_i‖.
struct SeparationSlack {
  double distance = 0.0;
  double norm = 0.0;
  bool ok() const { return distance > 0.0 && norm > 0.0; }
};

SeparationSlack separation_slack(const StabilizedSequence& stab, const NormOracle& oracle,
                                 std::size_t last);

}  // namespace equilex
