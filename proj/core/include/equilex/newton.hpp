#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace equilex {

/// C¹ map on a ball of ℝ^dim with eval(0) = 0.
struct DifferentiableMap {
  std::size_t dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
  double domain_radius = 1.0;
};

/// Sampled evidence for the two convergence conditions of the Newton
/// iteration on the ball of `radius`:
///   ‖Dg(x) − Id‖₂ <= 1/2 and ‖Dg(x)^{-1} − Id‖₂ <= 1/2,
///   ‖g(z) − g(x) − Dg(x)(z − x)‖₂ <= (1/8)‖z − x‖₂.
struct GuardCertificate {
  double radius = 0.0;
  /// eval(0) ≈ 0 and the jacobian matches central differences of eval.
  bool precondition_ok = false;
  double max_id_deviation = 0.0;
  double max_taylor_ratio = 0.0;
  double max_fd_error = 0.0;
  std::size_t sample_count = 0;

  bool passes() const {
    return precondition_ok && max_id_deviation <= 0.5 && max_taylor_ratio <= 0.125;
  }
};

inline constexpr double kOriginTolerance = 1e-12;
inline constexpr double kJacobianFdTolerance = 1e-6;
inline constexpr double kJacobianFdStep = 1e-5;

/// Central-difference Jacobian of m.eval at x with step h.
Eigen::MatrixXd finite_difference_jacobian(const DifferentiableMap& m,
                                           const Eigen::VectorXd& x, double h);

/// Seeded guard verification for an already preconditioned map.
/// Throws kInvalidArgument if radius exceeds g.domain_radius.
GuardCertificate guard_check(const DifferentiableMap& g, double radius,
                             std::size_t samples, std::uint64_t seed);

struct NewtonOptions {
  std::size_t max_iter = 60;
  double res_tol = 1e-11;
  std::size_t guard_samples = 200;
  std::uint64_t seed = 0;
  /// Radius halvings allowed after a failing certificate.
  std::size_t max_halvings = 6;
  /// Lower bound on the working radius, keeping the sampled Taylor ratio
  /// above roundoff when the target is (nearly) zero.
  double min_radius = 1e-6;
};

struct NewtonStep {
  std::size_t iteration = 0;
  double residual = 0.0;    // ‖f(x_m) − target‖₂
  double g_residual = 0.0;  // ‖g(x_m) − y‖₂ for the preconditioned map
  double step_norm = 0.0;   // ‖x_m − x_{m−1}‖₂ (x_0 = 0)
  double decay = 0.0;       // g_residual / previous g_residual
};

struct NewtonResult {
  Eigen::VectorXd solution;
  std::vector<NewtonStep> trace;
  GuardCertificate certificate;
  /// Certificates that failed before the accepted radius, in order.
  std::vector<GuardCertificate> rejected;
  std::size_t iterations = 0;
  double residual = 0.0;
  double max_decay = 0.0;
};

/// Solves f(a) = target. Preconditions g = Df(0)^{-1}∘f, certifies guards on
/// the working radius min(domain_radius, 4‖Df(0)^{-1} target‖) (halving on
/// failure), then iterates x_{m+1} = x_m + Dg(x_m)^{-1}(y − g(x_m)) from
/// x_1 = y = Df(0)^{-1} target. x_1 counts as the first iteration; when y
/// is exactly zero, x_1 = 0 is returned without a guard check.
///
/// Errors: kSingularMatrix for a singular Df(0), kGuardFailed, kLeftDomain,
/// kNoConvergence.
NewtonResult solve(const DifferentiableMap& f, const Eigen::VectorXd& target,
                   const NewtonOptions& options = {});

}  // namespace equilex
