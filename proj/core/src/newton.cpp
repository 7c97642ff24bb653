#include "equilex/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "equilex/errors.hpp"

namespace equilex {
namespace {

constexpr std::size_t kFdSamples = 16;
constexpr double kPivotFloor = 1e-14;

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

Eigen::PartialPivLU<Eigen::MatrixXd> factor(const Eigen::MatrixXd& m, const char* what) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < pivots.size(); ++i) {
    if (!(std::abs(pivots(i)) >= kPivotFloor)) {
      std::ostringstream os;
      os << what << " is singular (pivot " << i << " = " << pivots(i) << ")";
      throw Error(ErrorKind::kSingularMatrix, os.str());
    }
  }
  return lu;
}

// Uniform point in the closed ball of radius r.
Eigen::VectorXd ball_point(std::mt19937_64& rng, std::size_t dim, double r) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (auto& c : v) c = normal(rng);
  const double n = v.norm();
  if (n == 0.0) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  const double scale = r * std::pow(unit(rng), 1.0 / static_cast<double>(dim)) / n;
  return scale * v;
}

}  // namespace

Eigen::MatrixXd finite_difference_jacobian(const DifferentiableMap& m,
                                           const Eigen::VectorXd& x, double h) {
  const auto n = static_cast<Eigen::Index>(m.dim);
  Eigen::MatrixXd J(n, n);
  Eigen::VectorXd xp = x;
  Eigen::VectorXd xm = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    xp(j) = x(j) + h;
    xm(j) = x(j) - h;
    J.col(j) = (m.eval(xp) - m.eval(xm)) / (2.0 * h);
    xp(j) = x(j);
    xm(j) = x(j);
  }
  return J;
}

GuardCertificate guard_check(const DifferentiableMap& g, double radius,
                             std::size_t samples, std::uint64_t seed) {
  if (!(radius > 0.0) || radius > g.domain_radius) {
    std::ostringstream os;
    os << "guard radius " << radius << " outside (0, " << g.domain_radius << "]";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  const auto n = static_cast<Eigen::Index>(g.dim);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  std::mt19937_64 rng(seed);

  GuardCertificate cert;
  cert.radius = radius;

  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(n);
  const bool origin_ok = g.eval(origin).norm() <= kOriginTolerance;

  for (std::size_t s = 0; s < samples; ++s) {
    // The first sample is the centre of the ball.
    const Eigen::VectorXd x = s == 0 ? origin : ball_point(rng, g.dim, radius);
    const Eigen::VectorXd z = ball_point(rng, g.dim, radius);
    const Eigen::MatrixXd D = g.jacobian(x);

    if (s < kFdSamples) {
      const Eigen::MatrixXd fd = finite_difference_jacobian(g, x, kJacobianFdStep);
      cert.max_fd_error = std::max(cert.max_fd_error, (D - fd).cwiseAbs().maxCoeff());
    }

    double dev = spectral_norm(D - id);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(D);
    if (std::abs(lu.determinant()) > 0.0 && std::isfinite(lu.determinant())) {
      dev = std::max(dev, spectral_norm(lu.inverse() - id));
    } else {
      dev = std::numeric_limits<double>::infinity();
    }
    cert.max_id_deviation = std::max(cert.max_id_deviation, dev);

    const Eigen::VectorXd dz = z - x;
    const double dn = dz.norm();
    if (dn > 0.0) {
      const Eigen::VectorXd rem = g.eval(z) - g.eval(x) - D * dz;
      cert.max_taylor_ratio = std::max(cert.max_taylor_ratio, rem.norm() / dn);
    }
    ++cert.sample_count;
  }
  cert.precondition_ok = origin_ok && cert.max_fd_error <= kJacobianFdTolerance;
  return cert;
}

NewtonResult solve(const DifferentiableMap& f, const Eigen::VectorXd& target,
                   const NewtonOptions& options) {
  const auto n = static_cast<Eigen::Index>(f.dim);
  if (target.size() != n) {
    throw Error(ErrorKind::kDimensionMismatch, "target length differs from map dimension");
  }
  if (!target.allFinite()) throw Error(ErrorKind::kNonFinite, "target is not finite");

  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(n);
  const Eigen::MatrixXd J0 = f.jacobian(origin);
  const Eigen::MatrixXd P = factor(J0, "Df(0)").inverse();

  DifferentiableMap g;
  g.dim = f.dim;
  g.domain_radius = f.domain_radius;
  g.eval = [&f, &P](const Eigen::VectorXd& x) -> Eigen::VectorXd { return P * f.eval(x); };
  g.jacobian = [&f, &P](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return P * f.jacobian(x);
  };

  const Eigen::VectorXd y = P * target;
  NewtonResult out;

  // A zero target is met by the seed x_1 = 0 itself; no ball is needed.
  if (y.isZero(0.0)) {
    out.certificate.precondition_ok = f.eval(origin).norm() <= kOriginTolerance;
    const double residual = (f.eval(origin) - target).norm();
    if (!out.certificate.precondition_ok || residual > options.res_tol) {
      throw Error(ErrorKind::kGuardFailed, "map does not vanish at the origin");
    }
    out.solution = origin;
    out.iterations = 1;
    out.residual = residual;
    out.trace.push_back(NewtonStep{1, residual, 0.0, 0.0, 0.0});
    return out;
  }

  double radius = std::min(f.domain_radius, std::max(4.0 * y.norm(), options.min_radius));
  for (std::size_t halving = 0;; ++halving) {
    GuardCertificate cert = guard_check(g, radius, options.guard_samples, options.seed);
    if (cert.passes()) {
      out.certificate = cert;
      break;
    }
    out.rejected.push_back(cert);
    if (halving >= options.max_halvings) {
      std::ostringstream os;
      os << "guard certificate failed at radius " << cert.radius
         << " (precondition " << (cert.precondition_ok ? "ok" : "failed")
         << ", fd error " << cert.max_fd_error << ", id deviation "
         << cert.max_id_deviation << ", taylor ratio " << cert.max_taylor_ratio << ")";
      throw Error(ErrorKind::kGuardFailed, os.str());
    }
    radius *= 0.5;
  }

  Eigen::VectorXd x = y;
  Eigen::VectorXd prev = origin;
  double prev_g_residual = y.norm();
  for (std::size_t m = 1; m <= options.max_iter; ++m) {
    if (x.norm() > radius) {
      std::ostringstream os;
      os << "iterate " << m << " has norm " << x.norm() << " beyond radius " << radius;
      throw Error(ErrorKind::kLeftDomain, os.str());
    }
    const Eigen::VectorXd fx = f.eval(x);
    NewtonStep step;
    step.iteration = m;
    step.residual = (fx - target).norm();
    step.g_residual = (P * fx - y).norm();
    step.step_norm = (x - prev).norm();
    step.decay = prev_g_residual > 0.0 ? step.g_residual / prev_g_residual : 0.0;
    out.max_decay = std::max(out.max_decay, step.decay);
    out.trace.push_back(step);

    if (step.residual <= options.res_tol) {
      out.solution = x;
      out.iterations = m;
      out.residual = step.residual;
      return out;
    }
    prev = x;
    prev_g_residual = step.g_residual;
    const Eigen::MatrixXd Dg = g.jacobian(x);
    x = x + factor(Dg, "Dg(x_m)").solve(y - P * fx);
  }
  std::ostringstream os;
  os << "no convergence after " << options.max_iter << " iterations (residual "
     << out.trace.back().residual << ")";
  throw Error(ErrorKind::kNoConvergence, os.str());
}

}  // namespace equilex
