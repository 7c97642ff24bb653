#include "equilex/stabilizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <utility>

#include <boost/math/tools/roots.hpp>

#include "equilex/errors.hpp"

namespace equilex {
namespace {

constexpr double kDivisionFloor = 1e-12;

double solve_scalar(const std::function<double(double)>& F, double lo, double hi,
                    std::size_t index) {
  double f_lo = F(lo);
  double f_hi = F(hi);
  for (int expand = 0; f_hi < 0.0 && expand < 8; ++expand) {
    hi *= 2.0;
    f_hi = F(hi);
  }
  if (f_lo > 0.0 || f_hi < 0.0) {
    std::ostringstream os;
    os << "no sign change for index " << index << " on [" << lo << ", " << hi << "]";
    throw Error(ErrorKind::kRootBracketing, os.str());
  }
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  std::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      F, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
  return 0.5 * (a + b);
}

}  // namespace

Rescaling rescale_to_common_lambda(const SequenceSource& src, const NormOracle& oracle,
                                   const TailPolicy& policy, double margin) {
  policy.validate();
  const TailWindows windows = tail_windows(policy);
  if (windows.inner.back() > src.max_index()) {
    std::ostringstream os;
    os << src.label() << " has " << src.max_index() << " elements, tail windows need "
       << windows.inner.back();
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }

  Rescaling r;
  r.tail_norm = tail_limit([&](std::size_t i) { return norm(oracle, src(i)); },
                           windows.outer, policy.tol);
  if (!(r.tail_norm > 0.0)) {
    throw Error(ErrorKind::kLambdaTooSmall, "tail of the sequence vanishes");
  }
  const double mu = r.tail_norm;
  std::vector<Point> tail;
  for (std::size_t i : windows.outer) tail.push_back((1.0 / mu) * src(i));
  auto tail_point = [&](std::size_t i) -> const Point& {
    return tail[i - windows.outer.front()];
  };

  r.lambda = double_tail_limit(
      [&](std::size_t n, std::size_t i) {
        return norm(oracle, (1.0 / mu) * (src(n) - src(i)));
      },
      windows, policy.tol);
  if (!(r.lambda > 1.0 + margin)) {
    std::ostringstream os;
    os << "lambda = " << r.lambda << " does not exceed 1 + " << margin;
    throw Error(ErrorKind::kLambdaTooSmall, os.str());
  }
  const double eps = (r.lambda - 1.0) / 4.0;

  const std::size_t usable = policy.start - 1;
  r.scalars.assign(usable, 1.0);
  r.tail_distances.assign(usable, r.lambda);
  for (std::size_t n = 1; n <= usable; ++n) {
    const Point xn = (1.0 / mu) * src(n);
    auto dist = [&](double a) {
      return tail_limit(
          [&](std::size_t i) {
            Point u = a * xn;
            u -= tail_point(i);
            return norm(oracle, u);
          },
          windows.outer, policy.tol);
    };
    const double lambda_n = dist(1.0);
    r.tail_distances[n - 1] = lambda_n;
    if (std::abs(lambda_n - r.lambda) <= policy.tol) continue;
    const double upper = std::max(1.0, 1.0 + (r.lambda - lambda_n) / eps) + 0.5;
    r.scalars[n - 1] =
        solve_scalar([&](double a) { return dist(a) - r.lambda; }, 0.0, upper, n);
  }
  return r;
}

SequenceSource apply_rescaling(const SequenceSource& src, const Rescaling& r) {
  const double inv_mu = 1.0 / r.tail_norm;
  return SequenceSource::composed(
      src.dim(), src.max_index(),
      [src, r, inv_mu](std::size_t n) { return (r.scalar(n) * inv_mu) * src(n); },
      "rescaled(" + src.label() + ")");
}

std::vector<double> functional_limits(const SequenceSource& src, const NormOracle& oracle,
                                      const TailPolicy& policy) {
  const TailWindows windows = tail_windows(policy);
  std::vector<double> b(policy.start - 1, 0.0);
  for (std::size_t l = 1; l < policy.start; ++l) {
    const Point xl = src(l);
    b[l - 1] = double_tail_limit(
        [&](std::size_t k, std::size_t i) {
          return apply_functional(support_functional(oracle, src(k) - src(i)), xl);
        },
        windows, policy.tol);
  }
  return b;
}

StabilizedSequence kill_functional_limits(const SequenceSource& src,
                                          const NormOracle& oracle,
                                          const TailPolicy& policy, double margin) {
  const Rescaling first = rescale_to_common_lambda(src, oracle, policy, margin);
  const SequenceSource y = apply_rescaling(src, first);

  StabilizedSequence out;
  out.policy = policy;
  out.functional_limits = functional_limits(y, oracle, policy);
  const bool vanishing =
      std::all_of(out.functional_limits.begin(), out.functional_limits.end(),
                  [&](double v) { return std::abs(v) <= policy.tol; });

  if (vanishing) {
    out.source = y;
    out.lambda = first.lambda;
    out.scalars = first.scalars;
    out.residual_limits = out.functional_limits;
  } else {
    // b_ℓ beyond the usable range are taken at their limit 0, so the ratio
    // b_{2ℓ+1}/b_{2ℓ} is 0 there as well.
    const std::vector<double> b = out.functional_limits;
    auto b_at = [&b](std::size_t l) { return l <= b.size() ? b[l - 1] : 0.0; };
    const std::size_t v_max = (y.max_index() - 1) / 2;
    std::vector<double> ratios(v_max + 1, 0.0);
    for (std::size_t l = 1; l <= v_max; ++l) {
      const double even = b_at(2 * l);
      const double odd = b_at(2 * l + 1);
      if (std::abs(even) < kDivisionFloor) {
        if (std::abs(odd) > policy.tol) {
          std::ostringstream os;
          os << "b_" << 2 * l << " = " << even << " vanishes while b_" << 2 * l + 1
             << " = " << odd;
          throw Error(ErrorKind::kDivisionGuard, os.str());
        }
        continue;
      }
      ratios[l] = odd / even;
    }
    const SequenceSource v = SequenceSource::composed(
        y.dim(), v_max,
        [y, ratios](std::size_t l) {
          Point p = y(2 * l + 1);
          p.axpy(-ratios[l], y(2 * l));
          return p;
        },
        "differenced(" + y.label() + ")");
    const Rescaling second = rescale_to_common_lambda(v, oracle, policy, margin);
    out.source = apply_rescaling(v, second);
    out.lambda = second.lambda;
    out.scalars = second.scalars;
    out.differenced = true;
    out.residual_limits = functional_limits(out.source, oracle, policy);
    for (std::size_t l = 0; l < out.residual_limits.size(); ++l) {
      if (std::abs(out.residual_limits[l]) > policy.tol) {
        std::ostringstream os;
        os << "functional limit b_" << l + 1 << " = " << out.residual_limits[l]
           << " survives differencing";
        throw Error(ErrorKind::kNonStabilizing, os.str());
      }
    }
  }

  if (!(out.lambda < 2.0)) {
    std::ostringstream os;
    os << "lambda = " << out.lambda << " is not below 2";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  out.C = (out.lambda - 1.0) / 8.0;
  return out;
}

SeparationSlack separation_slack(const StabilizedSequence& stab, const NormOracle& oracle,
                                 std::size_t last) {
  const double lambda = stab.lambda;
  SeparationSlack s{std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
  std::vector<Point> z;
  for (std::size_t i = 1; i <= last; ++i) z.push_back(stab.source(i));
  for (std::size_t i = 0; i < z.size(); ++i) {
    s.norm = std::min(s.norm, (3.0 + lambda) / 4.0 - norm(oracle, z[i]));
    for (std::size_t k = i + 1; k < z.size(); ++k) {
      s.distance = std::min(s.distance, norm(oracle, z[k] - z[i]) - (1.0 + lambda) / 2.0);
    }
  }
  return s;
}

}  // namespace equilex
