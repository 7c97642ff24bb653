#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace equilex {

/// Numerical surrogate for lim_{i→∞}: a window of `window` consecutive large
/// indices starting at `start`, accepted when the values spread by at most
/// `tol`.
struct TailPolicy {
  std::size_t start = 24;
  std::size_t window = 5;
  double tol = 1e-8;

  /// Throws kInvalidArgument unless start >= 1, window >= 3 and tol > 0.
  void validate() const;

  /// Same window and tolerance, moved so that it begins no earlier than
  /// `first`.
  TailPolicy starting_at_least(std::size_t first) const;
};

/// Index windows for single and iterated limits. Single limits use `outer`;
/// lim_k lim_i uses k ∈ outer and i ∈ inner (the next window along).
struct TailWindows {
  std::vector<std::size_t> outer;
  std::vector<std::size_t> inner;
};

/// Windows over the raw indices [start, start + 2·window).
TailWindows tail_windows(const TailPolicy& policy);

/// Windows over an ordered index pool: the first `window` pool entries at or
/// beyond policy.start, then the next `window` entries.
TailWindows tail_windows(std::span<const std::size_t> pool, const TailPolicy& policy);

/// Mean of f over `indices` if max - min <= tol; throws kNonStabilizing
/// otherwise. The mean is exact when all values coincide.
double tail_limit(const std::function<double(std::size_t)>& f,
                  std::span<const std::size_t> indices, double tol);

double tail_limit(const std::function<double(std::size_t)>& f,
                  const TailPolicy& policy);

/// lim_k lim_i f(k, i) with k over windows.outer and i over windows.inner.
double double_tail_limit(const std::function<double(std::size_t, std::size_t)>& f,
                         const TailWindows& windows, double tol);

}  // namespace equilex
