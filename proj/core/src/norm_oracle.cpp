#include "equilex/norm_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "equilex/errors.hpp"
#include "sampling.hpp"

namespace equilex {
namespace {

// Scaled ℓ_p evaluation: m·(Σ(|x_i|/m)^p)^{1/p} with m = max|x_i|.
double lp_norm(std::span<const double> x, double p) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  if (p == 2.0) {
    for (double v : x) {
      const double r = v / m;
      s += r * r;
    }
    return m * std::sqrt(s);
  }
  for (double v : x) {
    if (v != 0.0) s += std::pow(std::abs(v) / m, p);
  }
  return m * std::pow(s, 1.0 / p);
}

void check_exponent(double p) {
  if (!(p > 1.0) || std::isinf(p)) {
    std::ostringstream os;
    os << "p = " << p << " is not uniformly smooth";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  if (p < kMinExponent || p > kMaxExponent) {
    std::ostringstream os;
    os << "p = " << p << " outside supported range [" << kMinExponent << ", "
       << kMaxExponent << "]";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
}

void check_point(const NormOracle& oracle, const Point& x) {
  if (x.dim() != oracle.dim()) {
    std::ostringstream os;
    os << "point has dimension " << x.dim() << ", oracle expects "
       << oracle.dim();
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
  if (!x.all_finite()) {
    throw Error(ErrorKind::kNonFinite, "point has a non-finite coordinate");
  }
}

// Second-difference threshold separating kinks from curvature. Smooth norms
// give |N(x+h)+N(x-h)-2N(x)|/h = O(h·curvature); a kink gives O(1).
constexpr double kKinkThreshold = 1e-2;
constexpr double kDualNormSlack = 1e-6;

SupportFunctional custom_support(const NormOracle& oracle, const Point& x,
                                 double base) {
  const double h = oracle.gradient_step();
  const std::size_t d = x.dim();
  Point grad(d);
  Point probe = x;
  double kink = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double xi = x[i];
    probe[i] = xi + h;
    const double up = oracle.eval(probe.coords());
    probe[i] = xi - h;
    const double down = oracle.eval(probe.coords());
    probe[i] = xi;
    grad[i] = (up - down) / (2.0 * h);
    kink = std::max(kink, std::abs(up + down - 2.0 * base) / h);
  }
  if (kink > kKinkThreshold) {
    std::ostringstream os;
    os << "one-sided derivative jump " << kink << " exceeds "
       << kKinkThreshold;
    throw Error(ErrorKind::kNonSmoothPoint, os.str());
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < d; ++i) dot += grad[i] * x[i];
  if (!(dot > 0.0)) {
    throw Error(ErrorKind::kNonSmoothPoint,
                "finite-difference gradient does not norm the point");
  }
  grad *= base / dot;
  SupportFunctional phi{std::move(grad), base};
  const double dn = dual_norm(oracle, phi.coeffs, 64, 0x5eed);
  if (dn > 1.0 + kDualNormSlack) {
    std::ostringstream os;
    os << "sampled dual norm " << dn << " exceeds 1";
    throw Error(ErrorKind::kNonSmoothPoint, os.str());
  }
  return phi;
}

}  // namespace

NormOracle NormOracle::lp(double p, std::size_t dim) {
  check_exponent(p);
  if (dim == 0) throw Error(ErrorKind::kInvalidArgument, "dimension must be positive");
  NormOracle o;
  o.kind_ = NormKind::kLp;
  o.p_ = p;
  o.dim_ = dim;
  o.label_ = "lp";
  return o;
}

NormOracle NormOracle::custom(std::size_t dim, NormFn fn, double gradient_step,
                              std::string label) {
  if (dim == 0) throw Error(ErrorKind::kInvalidArgument, "dimension must be positive");
  if (!fn) throw Error(ErrorKind::kInvalidArgument, "custom norm function is empty");
  if (!(gradient_step > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "gradient_step must be positive");
  }
  NormOracle o;
  o.kind_ = NormKind::kCustomSmooth;
  o.p_ = 0.0;
  o.dim_ = dim;
  o.gradient_step_ = gradient_step;
  o.label_ = std::move(label);
  o.custom_ = std::make_shared<const NormFn>(std::move(fn));
  return o;
}

NormOracle NormOracle::blended(double p, std::size_t dim, double gradient_step) {
  check_exponent(p);
  NormOracle o = custom(
      dim,
      [p](std::span<const double> x) {
        return 0.5 * (lp_norm(x, 2.0) + lp_norm(x, p));
      },
      gradient_step, "custom-smooth");
  o.p_ = p;
  return o;
}

double NormOracle::eval(std::span<const double> x) const {
  if (kind_ == NormKind::kLp) return lp_norm(x, p_);
  return (*custom_)(x);
}

double norm(const NormOracle& oracle, const Point& x) {
  check_point(oracle, x);
  return oracle.eval(x.coords());
}

SupportFunctional support_functional(const NormOracle& oracle, const Point& x) {
  check_point(oracle, x);
  const double base = oracle.eval(x.coords());
  if (!(base > 0.0)) {
    throw Error(ErrorKind::kZeroVector, "support functional of the zero vector");
  }
  if (oracle.kind() == NormKind::kCustomSmooth) {
    return custom_support(oracle, x, base);
  }
  const double p = oracle.p();
  Point coeffs(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const double v = x[i];
    if (v == 0.0) continue;
    const double r = std::abs(v) / base;
    const double mag = (p == 2.0) ? r : std::pow(r, p - 1.0);
    coeffs[i] = v > 0.0 ? mag : -mag;
  }
  return SupportFunctional{std::move(coeffs), base};
}

double apply_functional(const SupportFunctional& phi, const Point& y) {
  if (phi.coeffs.dim() != y.dim()) {
    std::ostringstream os;
    os << "functional has dimension " << phi.coeffs.dim() << ", point has "
       << y.dim();
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
  double s = 0.0;
  for (std::size_t i = 0; i < y.dim(); ++i) s += phi.coeffs[i] * y[i];
  return s;
}

double dual_norm(const NormOracle& oracle, const Point& coeffs,
                 std::size_t samples, std::uint64_t seed) {
  if (coeffs.dim() != oracle.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "functional dimension mismatch");
  }
  if (oracle.kind() == NormKind::kLp) {
    const double q = oracle.p() / (oracle.p() - 1.0);
    return lp_norm(coeffs.coords(), q);
  }
  // Sampled supremum of |φ(y)|/‖y‖: coordinate axes, the functional's own
  // direction, then random directions.
  const std::size_t d = coeffs.dim();
  auto ratio = [&](const Point& y) {
    const double n = oracle.eval(y.coords());
    if (n == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += coeffs[i] * y[i];
    return std::abs(s) / n;
  };
  double best = ratio(coeffs);
  for (std::size_t i = 0; i < d; ++i) best = std::max(best, ratio(Point::basis(d, i)));
  detail::Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    best = std::max(best, ratio(detail::gaussian_point(rng, d)));
  }
  return best;
}

double modulus_of_smoothness(const NormOracle& oracle, double tau,
                             std::size_t samples, std::uint64_t seed) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorKind::kInvalidArgument, "tau must be positive and finite");
  }
  if (samples == 0) throw Error(ErrorKind::kInvalidArgument, "samples must be positive");
  const std::size_t d = oracle.dim();
  detail::Rng rng(seed);
  Point plus(d), minus(d);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    Point x = detail::gaussian_point(rng, d);
    Point y = detail::gaussian_point(rng, d);
    const double nx = oracle.eval(x.coords());
    const double ny = oracle.eval(y.coords());
    if (nx == 0.0 || ny == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = x[i] / nx;
      const double yi = tau * y[i] / ny;
      plus[i] = xi + yi;
      minus[i] = xi - yi;
    }
    const double v = 0.5 * oracle.eval(plus.coords()) +
                     0.5 * oracle.eval(minus.coords()) - 1.0;
    best = std::max(best, v);
  }
  return best;
}

}  // namespace equilex
