#include "equilex/extended_norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "equilex/errors.hpp"
#include "sampling.hpp"

namespace equilex {
namespace {

Point offset(const Point& y, double a, const Point& t) {
  Point u = y;
  u.axpy(-a, t);
  return u;
}

}  // namespace

double extended_norm(const NormOracle& oracle, const Point& y, double a,
                     const SequenceSource& tail, std::span<const std::size_t> window,
                     double tol) {
  return tail_limit(
      [&](std::size_t j) { return norm(oracle, offset(y, a, tail(j))); }, window, tol);
}

double extended_norm(const NormOracle& oracle, const Point& y, double a,
                     const SequenceSource& tail, const TailPolicy& policy) {
  return extended_norm(oracle, y, a, tail, tail_windows(policy).outer, policy.tol);
}

double extended_support_apply(const NormOracle& oracle, const Point& y, double a,
                              const Point& z, double b, const SequenceSource& tail,
                              std::span<const std::size_t> window, double tol) {
  if (!(extended_norm(oracle, y, a, tail, window, tol) > 0.0)) {
    throw Error(ErrorKind::kZeroVector, "extended support functional of a zero vector");
  }
  return tail_limit(
      [&](std::size_t j) {
        const Point t = tail(j);
        return apply_functional(support_functional(oracle, offset(y, a, t)),
                                offset(z, b, t));
      },
      window, tol);
}

double extended_support_apply(const NormOracle& oracle, const Point& y, double a,
                              const Point& z, double b, const SequenceSource& tail,
                              const TailPolicy& policy) {
  return extended_support_apply(oracle, y, a, z, b, tail, tail_windows(policy).outer,
                                policy.tol);
}

ExtendedModulus extended_modulus_of_smoothness(const NormOracle& oracle,
                                               const SequenceSource& tail,
                                               const TailPolicy& policy, double tau,
                                               std::size_t samples,
                                               std::uint64_t seed) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorKind::kInvalidArgument, "tau must be positive and finite");
  }
  if (samples == 0) throw Error(ErrorKind::kInvalidArgument, "samples must be positive");
  const std::vector<std::size_t> window = tail_windows(policy).outer;
  const std::size_t d = oracle.dim();
  const std::size_t active = std::min(policy.start, d);

  std::vector<Point> tails;
  tails.reserve(window.size());
  for (std::size_t j : window) tails.push_back(tail(j));

  // ⦀·⦀ over the window, returning the individual norms as well.
  std::vector<double> norms_u(window.size()), norms_v(window.size());
  auto ext = [&](const Point& y, double a, std::vector<double>* out) {
    return tail_limit(
        [&](std::size_t j) {
          const std::size_t k = j - window.front();
          const double n = oracle.eval(offset(y, a, tails[k]).coords());
          if (out) (*out)[k] = n;
          return n;
        },
        window, policy.tol);
  };

  detail::Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ExtendedModulus best{-std::numeric_limits<double>::infinity(),
                       -std::numeric_limits<double>::infinity()};
  for (std::size_t s = 0; s < samples; ++s) {
    Point y = detail::gaussian_point(rng, d, active);
    double a = normal(rng);
    Point z = detail::gaussian_point(rng, d, active);
    double b = normal(rng);
    const double ny = ext(y, a, nullptr);
    const double nz = ext(z, b, nullptr);
    if (ny == 0.0 || nz == 0.0) continue;
    y *= 1.0 / ny;
    a /= ny;
    z *= 1.0 / nz;
    b /= nz;

    Point plus = y;
    plus.axpy(tau, z);
    Point minus = y;
    minus.axpy(-tau, z);
    const double value =
        0.5 * ext(plus, a + tau * b, nullptr) + 0.5 * ext(minus, a - tau * b, nullptr) - 1.0;
    best.extended = std::max(best.extended, value);

    ext(y, a, &norms_u);
    ext(z, b, &norms_v);
    for (std::size_t k = 0; k < tails.size(); ++k) {
      Point u = offset(y, a, tails[k]);
      Point v = offset(z, b, tails[k]);
      u *= 1.0 / norms_u[k];
      v *= 1.0 / norms_v[k];
      Point up = u;
      up.axpy(tau, v);
      Point um = u;
      um.axpy(-tau, v);
      const double mapped =
          0.5 * oracle.eval(up.coords()) + 0.5 * oracle.eval(um.coords()) - 1.0;
      best.mapped_base = std::max(best.mapped_base, mapped);
    }
  }
  return best;
}

}  // namespace equilex
