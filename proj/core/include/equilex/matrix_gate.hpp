#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace equilex {

/// ε_2..ε_{N_max} and inverse-norm bounds R_1..R_{N_max} for the class
/// A_{N×N}(C, (ε_i)): |a_ij| <= 2, |a_ii| >= C, |a_ij| <= ε_j for i < j.
struct EpsSchedule {
  double C = 0.0;
  std::size_t n_max = 0;
  std::vector<double> eps;  // eps[j - 2] = ε_j
  std::vector<double> R;    // R[N - 1] = R_N

  /// ε_j for 2 <= j <= n_max.
  double eps_at(std::size_t j) const;
  /// R_N for 1 <= N <= n_max.
  double R_at(std::size_t n) const;
};

/// Forward-substitution bound on ‖B^{-1}‖₂ for lower-triangular B with
/// |b_ii| >= C and |b_ij| <= 2: (√N/C)(1 + 2/C)^{N-1}.
double lower_triangular_inverse_bound(double C, std::size_t n);

/// Explicit Neumann-series schedule:
///   ε_j = C·2^{-(j+2)} / (√N_max · β_{N_max}),  R_1 = 1/C,  R_N = 2β_N,
/// so every class member A = B + E has ‖B^{-1}E‖₂ <= 1/2 and ‖A^{-1}‖₂ <= R_N.
EpsSchedule eps_schedule(double C, std::size_t n_max);

/// Screening schedule for instance-certified gating: ε_j = scale·2^{-(j-2)/2}
/// with the R_N of eps_schedule(C, n_max). Class membership under it does
/// not by itself bound the inverse; see neumann_certificate.
EpsSchedule working_schedule(double C, std::size_t n_max, double scale);

struct GateMatrix {
  Eigen::MatrixXd entries;
  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
};

/// Exact (tolerance 0) membership test for A_{N×N}(C, sched.eps).
bool in_class(const GateMatrix& A, double C, const EpsSchedule& sched);

struct InverseNormCheck {
  bool ok = false;
  double measured = 0.0;
};

inline constexpr double kPivotFloor = 1e-14;

/// ‖A^{-1}‖₂ from an LU factorization with partial pivoting; throws
/// kSingularMatrix when a pivot falls below kPivotFloor.
InverseNormCheck inverse_norm_check(const GateMatrix& A, double bound);

/// Per-instance Neumann certificate: A = B + E with B the lower triangle
/// (diagonal included). When q = ‖B^{-1}E‖₂ <= 1/2, A is invertible and
/// ‖A^{-1}‖₂ <= ‖B^{-1}‖₂ / (1 − q).
struct NeumannCertificate {
  double lower_inverse_norm = 0.0;
  double contraction = 0.0;
  double bound = 0.0;
  bool ok = false;
};

NeumannCertificate neumann_certificate(const GateMatrix& A);

/// Seeded random member of A_{N×N}(C, sched.eps): lower entries uniform in
/// [-2, 2], diagonal magnitude uniform in [C, 2] with random sign, entries
/// above the diagonal uniform in [-ε_j, ε_j].
GateMatrix sample_class_member(double C, const EpsSchedule& sched, std::size_t n,
                               std::mt19937_64& rng);

struct ScheduleSampling {
  std::size_t n = 0;
  std::size_t samples = 0;
  std::size_t failures = 0;
  double max_measured = 0.0;
  double bound = 0.0;
};

/// For every N in 1..sched.n_max, draws `samples` class members and counts
/// those whose measured ‖A^{-1}‖₂ exceeds R_N (or that are singular).
std::vector<ScheduleSampling> verify_schedule(const EpsSchedule& sched,
                                              std::size_t samples, std::uint64_t seed);

}  // namespace equilex
