#include "equilex/tail.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "equilex/errors.hpp"

namespace equilex {

void TailPolicy::validate() const {
  if (start < 1) throw Error(ErrorKind::kInvalidArgument, "tail.start must be >= 1");
  if (window < 3) throw Error(ErrorKind::kInvalidArgument, "tail.window must be >= 3");
  if (!(tol > 0.0)) throw Error(ErrorKind::kInvalidArgument, "tail.tol must be positive");
}

TailPolicy TailPolicy::starting_at_least(std::size_t first) const {
  TailPolicy p = *this;
  p.start = std::max(start, first);
  return p;
}

TailWindows tail_windows(const TailPolicy& policy) {
  policy.validate();
  TailWindows w;
  for (std::size_t k = 0; k < policy.window; ++k) {
    w.outer.push_back(policy.start + k);
    w.inner.push_back(policy.start + policy.window + k);
  }
  return w;
}

TailWindows tail_windows(std::span<const std::size_t> pool, const TailPolicy& policy) {
  policy.validate();
  auto it = std::lower_bound(pool.begin(), pool.end(), policy.start);
  const auto available = static_cast<std::size_t>(pool.end() - it);
  if (available < 2 * policy.window) {
    std::ostringstream os;
    os << "index pool has " << available << " entries at or beyond "
       << policy.start << ", tail windows need " << 2 * policy.window;
    throw Error(ErrorKind::kNonStabilizing, os.str());
  }
  TailWindows w;
  w.outer.assign(it, it + static_cast<std::ptrdiff_t>(policy.window));
  w.inner.assign(it + static_cast<std::ptrdiff_t>(policy.window),
                 it + static_cast<std::ptrdiff_t>(2 * policy.window));
  return w;
}

double tail_limit(const std::function<double(std::size_t)>& f,
                  std::span<const std::size_t> indices, double tol) {
  if (indices.empty()) throw Error(ErrorKind::kInvalidArgument, "empty tail window");
  std::vector<double> values;
  values.reserve(indices.size());
  for (std::size_t i : indices) values.push_back(f(i));
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!std::isfinite(lo) || !std::isfinite(hi) || hi - lo > tol) {
    std::ostringstream os;
    os << "tail values spread " << (hi - lo) << " over indices [" << indices.front()
       << ", " << indices.back() << "] exceeds tol " << tol;
    throw Error(ErrorKind::kNonStabilizing, os.str());
  }
  double excess = 0.0;
  for (double v : values) excess += v - lo;
  return lo + excess / static_cast<double>(values.size());
}

double tail_limit(const std::function<double(std::size_t)>& f,
                  const TailPolicy& policy) {
  return tail_limit(f, tail_windows(policy).outer, policy.tol);
}

double double_tail_limit(const std::function<double(std::size_t, std::size_t)>& f,
                         const TailWindows& windows, double tol) {
  return tail_limit(
      [&](std::size_t k) {
        return tail_limit([&](std::size_t i) { return f(k, i); }, windows.inner, tol);
      },
      windows.outer, tol);
}

}  // namespace equilex
