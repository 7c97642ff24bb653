#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "equilex/errors.hpp"
#include "equilex/matrix_gate.hpp"
#include "equilex/newton.hpp"
#include "equilex/norm_oracle.hpp"
#include "equilex/point.hpp"
#include "equilex/sequence_source.hpp"
#include "equilex/stabilizer.hpp"
#include "equilex/tail.hpp"

namespace equilex {

/// How a candidate Jacobian is admitted before the Newton solve.
///
/// kSchedule gates Df^K(0)ᵀ against the explicit Neumann schedule and uses
/// δ = min(ε_{N+1}/4, delta_cap). kCertified screens against a working
/// schedule and then requires a per-instance Neumann certificate
/// ‖B^{-1}E‖₂ <= 1/2 plus ‖A^{-1}‖₂ <= R_{N+1}.
enum class GateMode { kSchedule, kCertified };

std::string to_string(GateMode mode);
GateMode parse_gate_mode(const std::string& name);

struct BuilderOptions {
  std::size_t n_points = 8;
  double prop_tol = 1e-7;
  double final_tol = 1e-8;
  double delta_cap = 0.1;
  std::size_t k_retries = 32;
  GateMode gate = GateMode::kCertified;
  double eps_scale = 0.05;
  double lambda_margin = kDefaultLambdaMargin;
  NewtonOptions newton;
};

struct CandidateFailure {
  std::size_t K = 0;
  ErrorKind kind = ErrorKind::kInvalidArgument;
  std::string message;
};

struct GateRecord {
  bool in_class = false;
  double contraction = 0.0;       // ‖B^{-1}E‖₂, certified mode
  double inverse_norm = 0.0;      // measured ‖A^{-1}‖₂
  double inverse_bound = 0.0;     // R_{N+1}
};

struct StepLog {
  std::size_t step = 0;  // index of the point being added
  std::size_t K = 0;     // accepted candidate, 0 if none
  std::size_t gate_skips = 0;
  std::vector<CandidateFailure> failures;
  GateRecord gate;
  double delta = 0.0;
  std::size_t newton_iterations = 0;
  std::vector<NewtonStep> trace;
  GuardCertificate certificate;
  std::size_t guard_halvings = 0;
  double max_decay = 0.0;
  double solution_norm = 0.0;
};

struct ConstructionState {
  NormOracle oracle;
  StabilizedSequence stab;
  std::vector<Point> points;
  std::vector<std::size_t> pool;
  double lambda = 0.0;
  double C = 0.0;
  EpsSchedule sched;       // explicit Neumann schedule
  EpsSchedule gate_sched;  // schedule the gate screens against
  TailPolicy policy;
  BuilderOptions options;
  std::vector<StepLog> logs;

  const SequenceSource& z() const { return stab.source; }
  /// Pool tail windows used for every limit over M_N.
  TailWindows windows() const;
};

/// Stabilizes `raw`, sets C = (λ−1)/8, builds the schedules and seeds
/// x_1 = z_1 with pool (2, 3, …).
ConstructionState initial_state(const NormOracle& oracle, const SequenceSource& raw,
                                const TailPolicy& policy, const BuilderOptions& options);

/// g^K(a) = (1 + a_{N+1}) z_K + Σ a_i x_i.
Point candidate_point(const ConstructionState& state, std::size_t K,
                      const Eigen::VectorXd& a);

/// a ↦ f^K(a) − f^K(0) on ℝ^{N+1}; component N+1 is the pool tail limit of
/// ‖g^K(a) − z_m‖ over indices past K. The jacobian is assembled from
/// duality maps at g^K(a).
DifferentiableMap residual_map(const ConstructionState& state, std::size_t K,
                               double domain_radius = 1.0);

/// f^K(0).
Eigen::VectorXd residual_offset(const ConstructionState& state, std::size_t K);

/// Df^K(a) from duality maps; jacobian_at_zero is the a = 0 case.
Eigen::MatrixXd jacobian_at(const ConstructionState& state, std::size_t K,
                            const Eigen::VectorXd& a);
GateMatrix jacobian_at_zero(const ConstructionState& state, std::size_t K);

/// Adds x_{N+1}. Throws kExhaustedPool when no candidate K succeeds and
/// kInvariantViolation when the new state fails a property check.
ConstructionState extend_one(const ConstructionState& state);

struct PropertyCheck {
  int id = 0;
  std::string name;
  bool vacuous = false;
  bool passed = true;
  /// Worst observed value: a deviation for (1), (2), (4); max ‖x_i‖ for (3);
  /// max |φ|/ε_k for (5); min |φ| for (6).
  double measured = 0.0;
  /// Threshold the measured value is compared with.
  double bound = 0.0;
  /// Signed margin, positive when the property holds.
  double slack = 0.0;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;  // properties (1)..(6) in order
  bool all_passed() const;
  /// First failing check, if any.
  const PropertyCheck* first_failure() const;
};

/// Recomputes properties (1)–(6) from the points, the pool and z.
PropertyReport verify_properties(const ConstructionState& state);

/// max_{i<j} |‖x_i − x_j‖ − λ| and the full distance matrix.
struct DistanceSummary {
  std::vector<std::vector<double>> matrix;
  double defect = 0.0;
};
DistanceSummary distance_summary(const NormOracle& oracle, const std::vector<Point>& points,
                                 double lambda);

struct EquilateralSet {
  std::vector<Point> points;
  double lambda = 0.0;
  double defect = 0.0;
  DistanceSummary distances;
  PropertyReport properties;
  ConstructionState state;
};

struct BuildFailure {
  ErrorKind kind = ErrorKind::kInvalidArgument;
  std::size_t step = 0;  // point index being constructed, 0 before x_1
  std::string message;
};

/// Either a finished set or the failure together with the last state reached.
struct BuildOutcome {
  std::optional<EquilateralSet> set;
  std::optional<ConstructionState> state;
  std::optional<BuildFailure> failure;
  /// Log of the step that failed, when the failure happened inside one.
  std::optional<StepLog> failed_step;
  bool ok() const { return set.has_value(); }
};

/// Runs the whole induction without throwing construction errors.
BuildOutcome run_build(const NormOracle& oracle, const SequenceSource& raw,
                       const TailPolicy& policy, const BuilderOptions& options);

/// Throwing variant; the message names the failing step.
EquilateralSet build(const NormOracle& oracle, const SequenceSource& raw,
                     const TailPolicy& policy, const BuilderOptions& options);

/// Carries the step log of a failed extend_one.
class StepError : public Error {
 public:
  StepError(ErrorKind kind, const std::string& message, StepLog log)
      : Error(kind, message), log_(std::move(log)) {}
  const StepLog& log() const noexcept { return log_; }

 private:
  StepLog log_;
};

}  // namespace equilex
