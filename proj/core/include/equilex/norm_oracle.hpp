#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>

#include "equilex/point.hpp"

namespace equilex {

enum class NormKind { kLp, kCustomSmooth };

/// Lower/upper bounds on the ℓ_p exponent. Outside this range |x_i|^{p-1}
/// under- or overflows for semi-normalized inputs.
inline constexpr double kMinExponent = 1.01;
inline constexpr double kMaxExponent = 100.0;

inline constexpr double kDefaultGradientStep = 1e-6;

/// A smooth norm on ℝ^dim. Immutable after construction; cheap to copy and
/// safe to share between threads.
class NormOracle {
 public:
  using NormFn = std::function<double(std::span<const double>)>;

  /// Placeholder with dim() == 0; only useful as an assignment target.
  NormOracle() = default;

  /// ℓ_p on ℝ^dim. Rejects p = 1 and p = ∞ (not uniformly smooth) and any p
  /// outside [kMinExponent, kMaxExponent].
  static NormOracle lp(double p, std::size_t dim);

  /// Arbitrary norm given by `fn`; support functionals come from central
  /// differences with step `gradient_step`.
  static NormOracle custom(std::size_t dim, NormFn fn,
                           double gradient_step = kDefaultGradientStep,
                           std::string label = "custom-smooth");

  /// ½(‖x‖_2 + ‖x‖_p): the custom-smooth norm reachable from run configs.
  static NormOracle blended(double p, std::size_t dim,
                            double gradient_step = kDefaultGradientStep);

  NormKind kind() const noexcept { return kind_; }
  /// Exponent for kLp; the ℓ_p part for the blended custom norm; 0 otherwise.
  double p() const noexcept { return p_; }
  std::size_t dim() const noexcept { return dim_; }
  double gradient_step() const noexcept { return gradient_step_; }
  const std::string& label() const noexcept { return label_; }

  /// Raw evaluation without argument checks; used on hot paths that have
  /// already validated their inputs.
  double eval(std::span<const double> x) const;

 private:

  NormKind kind_ = NormKind::kLp;
  double p_ = 2.0;
  std::size_t dim_ = 0;
  double gradient_step_ = kDefaultGradientStep;
  std::string label_;
  std::shared_ptr<const NormFn> custom_;
};

/// Coordinate representation of the norming functional φ_x.
struct SupportFunctional {
  Point coeffs;
  double base_norm = 0.0;
};

/// ‖x‖ with dimension and finiteness checks.
double norm(const NormOracle& oracle, const Point& x);

/// φ_x: the unique unit-dual-norm functional with φ_x(x) = ‖x‖.
/// For custom norms a jump between one-sided difference quotients, or a
/// sampled dual norm above one, raises kNonSmoothPoint.
SupportFunctional support_functional(const NormOracle& oracle, const Point& x);

double apply_functional(const SupportFunctional& phi, const Point& y);

/// Dual norm of a coordinate functional: the conjugate q-norm for ℓ_p,
/// a sampled supremum over the unit sphere otherwise.
double dual_norm(const NormOracle& oracle, const Point& coeffs,
                 std::size_t samples = 4096, std::uint64_t seed = 7);

/// Lower estimate of ρ(τ) = sup ½‖x+τy‖ + ½‖x−τy‖ − 1 over unit x, y from
/// `samples` seeded pseudorandom pairs.
double modulus_of_smoothness(const NormOracle& oracle, double tau,
                             std::size_t samples, std::uint64_t seed);

}  // namespace equilex
