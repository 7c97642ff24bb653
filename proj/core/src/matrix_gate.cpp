#include "equilex/matrix_gate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "equilex/errors.hpp"

namespace equilex {

double EpsSchedule::eps_at(std::size_t j) const {
  if (j < 2 || j > n_max) {
    std::ostringstream os;
    os << "eps index " << j << " outside [2, " << n_max << "]";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  return eps[j - 2];
}

double EpsSchedule::R_at(std::size_t n) const {
  if (n < 1 || n > n_max) {
    std::ostringstream os;
    os << "R index " << n << " outside [1, " << n_max << "]";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  return R[n - 1];
}

double lower_triangular_inverse_bound(double C, std::size_t n) {
  return std::sqrt(static_cast<double>(n)) / C *
         std::pow(1.0 + 2.0 / C, static_cast<double>(n) - 1.0);
}

EpsSchedule eps_schedule(double C, std::size_t n_max) {
  if (!(C > 0.0 && C < 1.0)) {
    std::ostringstream os;
    os << "eps_schedule needs 0 < C < 1, got C = " << C;
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  if (n_max < 1) throw Error(ErrorKind::kInvalidArgument, "eps_schedule needs N_max >= 1");

  EpsSchedule s;
  s.C = C;
  s.n_max = n_max;
  s.R.resize(n_max);
  s.R[0] = 1.0 / C;
  for (std::size_t n = 2; n <= n_max; ++n) {
    s.R[n - 1] = 2.0 * lower_triangular_inverse_bound(C, n);
  }
  const double denom =
      std::sqrt(static_cast<double>(n_max)) * lower_triangular_inverse_bound(C, n_max);
  const double cap = std::nextafter(1.0, 0.0);
  for (std::size_t j = 2; j <= n_max; ++j) {
    s.eps.push_back(std::min(cap, C * std::ldexp(1.0, -static_cast<int>(j + 2)) / denom));
  }
  return s;
}

EpsSchedule working_schedule(double C, std::size_t n_max, double scale) {
  if (!(scale > 0.0 && scale < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "working schedule scale must lie in (0, 1)");
  }
  EpsSchedule s = eps_schedule(C, n_max);
  for (std::size_t j = 2; j <= n_max; ++j) {
    s.eps[j - 2] = scale * std::pow(2.0, -0.5 * static_cast<double>(j - 2));
  }
  return s;
}

bool in_class(const GateMatrix& A, double C, const EpsSchedule& sched) {
  const std::size_t n = A.size();
  if (n > sched.n_max) {
    std::ostringstream os;
    os << "matrix of size " << n << " exceeds schedule horizon " << sched.n_max;
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  const auto& a = A.entries;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = std::abs(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      if (!(v <= 2.0)) return false;
      if (i == j && !(v >= C)) return false;
      // 0-based (i, j) with i < j is the 1-based column j + 1.
      if (i < j && !(v <= sched.eps_at(j + 1))) return false;
    }
  }
  return true;
}

InverseNormCheck inverse_norm_check(const GateMatrix& A, double bound) {
  const auto& a = A.entries;
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::kInvalidArgument, "inverse_norm_check needs a square matrix");
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < pivots.size(); ++i) {
    if (!(std::abs(pivots(i)) >= kPivotFloor)) {
      std::ostringstream os;
      os << "pivot " << i << " = " << pivots(i) << " below " << kPivotFloor;
      throw Error(ErrorKind::kSingularMatrix, os.str());
    }
  }
  const Eigen::MatrixXd inv = lu.inverse();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(inv);
  InverseNormCheck out;
  out.measured = svd.singularValues()(0);
  out.ok = out.measured <= bound;
  return out;
}

NeumannCertificate neumann_certificate(const GateMatrix& A) {
  const auto& a = A.entries;
  const Eigen::Index n = a.rows();
  NeumannCertificate cert;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a(i, i) == 0.0) return cert;
  }
  const Eigen::MatrixXd lower = a.triangularView<Eigen::Lower>();
  const Eigen::MatrixXd upper = a.triangularView<Eigen::StrictlyUpper>();
  const Eigen::MatrixXd lower_inv = lower.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(n, n));
  cert.lower_inverse_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(lower_inv).singularValues()(0);
  const Eigen::MatrixXd product = lower_inv * upper;
  cert.contraction = n > 1 ? Eigen::JacobiSVD<Eigen::MatrixXd>(product).singularValues()(0)
                           : 0.0;
  cert.ok = std::isfinite(cert.lower_inverse_norm) && cert.contraction <= 0.5;
  cert.bound = cert.ok ? cert.lower_inverse_norm / (1.0 - cert.contraction)
                       : std::numeric_limits<double>::infinity();
  return cert;
}

GateMatrix sample_class_member(double C, const EpsSchedule& sched, std::size_t n,
                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> diag(C, 2.0);
  std::bernoulli_distribution sign(0.5);
  GateMatrix A{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                     static_cast<Eigen::Index>(n))};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v;
      if (i == j) {
        v = diag(rng);
        if (sign(rng)) v = -v;
      } else if (i > j) {
        v = 2.0 * unit(rng);
      } else {
        v = sched.eps_at(j + 1) * unit(rng);
      }
      A.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return A;
}

std::vector<ScheduleSampling> verify_schedule(const EpsSchedule& sched,
                                              std::size_t samples, std::uint64_t seed) {
  std::vector<ScheduleSampling> out;
  std::mt19937_64 rng(seed);
  for (std::size_t n = 1; n <= sched.n_max; ++n) {
    ScheduleSampling row;
    row.n = n;
    row.samples = samples;
    row.bound = sched.R_at(n);
    for (std::size_t s = 0; s < samples; ++s) {
      const GateMatrix A = sample_class_member(sched.C, sched, n, rng);
      try {
        const InverseNormCheck check = inverse_norm_check(A, row.bound);
        row.max_measured = std::max(row.max_measured, check.measured);
        if (!check.ok) ++row.failures;
      } catch (const Error&) {
        ++row.failures;
      }
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace equilex
