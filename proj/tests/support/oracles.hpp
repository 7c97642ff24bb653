#pragma once

// Independent reference computations for the tests. Nothing here calls into
// equilex; values are computed in long double from textbook formulas.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

inline long double lp_norm(const Vec& x, long double p) {
  long double s = 0.0L;
  for (double v : x) s += std::pow(std::fabs(static_cast<long double>(v)), p);
  return std::pow(s, 1.0L / p);
}

inline long double l2_norm(const Vec& x) { return lp_norm(x, 2.0L); }

/// Closed-form ℓ_p duality map sign(x_i)|x_i|^{p-1} / ‖x‖^{p-1}.
inline std::vector<long double> lp_duality(const Vec& x, long double p) {
  const long double n = lp_norm(x, p);
  std::vector<long double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double v = x[i];
    const long double m = std::pow(std::fabs(v) / n, p - 1.0L);
    out[i] = v < 0 ? -m : m;
  }
  return out;
}

/// Central-difference gradient of an arbitrary norm, in long double.
inline std::vector<long double> numeric_gradient(
    const std::function<long double(const Vec&)>& f, const Vec& x, double h) {
  std::vector<long double> g(x.size());
  Vec probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const long double up = f(probe);
    probe[i] = x[i] - h;
    const long double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0L * h);
  }
  return g;
}

/// ½(‖x‖_2 + ‖x‖_p) and its exact gradient.
inline long double blended_norm(const Vec& x, long double p) {
  return 0.5L * (l2_norm(x) + lp_norm(x, p));
}
inline std::vector<long double> blended_gradient(const Vec& x, long double p) {
  const auto a = lp_duality(x, 2.0L);
  const auto b = lp_duality(x, p);
  std::vector<long double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = 0.5L * (a[i] + b[i]);
  return g;
}

/// Hilbert-space modulus of smoothness √(1+τ²) − 1.
inline double hilbert_modulus(double tau) { return std::sqrt(1.0 + tau * tau) - 1.0; }

/// Common-lambda rescaling scalar for z_k = e_k + 2^{-k} e_0 in ℓ_2: the a solving
/// a²(1 + 4^{-k}) + 1 = 2.
inline double perturbed_scalar(std::size_t k) {
  return 1.0 / std::sqrt(1.0 + std::pow(4.0, -static_cast<double>(k)));
}

/// Largest singular value of the inverse of [[a, b], [c, d]] in closed form.
inline double inverse_spectral_norm_2x2(double a, double b, double c, double d) {
  const long double det = static_cast<long double>(a) * d - static_cast<long double>(b) * c;
  const long double s = (static_cast<long double>(a) * a + static_cast<long double>(b) * b +
                         static_cast<long double>(c) * c + static_cast<long double>(d) * d) /
                        (det * det);
  const long double p = 1.0L / (det * det);  // product of squared singular values
  const long double disc = std::sqrt(std::max(0.0L, s * s - 4.0L * p));
  return static_cast<double>(std::sqrt((s + disc) / 2.0L));
}

/// Bisection on a scalar increasing function over [lo, hi].
inline double bisect(const std::function<double(double)>& f, double target, double lo,
                     double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline Vec gaussian(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec v(n);
  for (double& x : v) x = nd(rng);
  return v;
}

}  // namespace oracle
