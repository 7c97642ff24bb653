#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "equilex/builder.hpp"
#include "equilex/errors.hpp"
#include "oracles.hpp"

using namespace equilex;
using Eigen::VectorXd;

namespace {

const TailPolicy kUnitPolicy{24, 5, 1e-8};
const TailPolicy kPerturbedPolicy{40, 5, 1e-8};

ConstructionState unit_state(double p = 2.0, std::size_t n_points = 8) {
  BuilderOptions opt;
  opt.n_points = n_points;
  return initial_state(NormOracle::lp(p, 64), SequenceSource::unit_basis(64), kUnitPolicy,
                       opt);
}

ConstructionState perturbed_state(double p = 2.0) {
  return initial_state(NormOracle::lp(p, 64), SequenceSource::perturbed_basis(64, 0.5),
                       kPerturbedPolicy, BuilderOptions{});
}

ConstructionState advance(ConstructionState s, std::size_t points) {
  while (s.points.size() < points) s = extend_one(s);
  return s;
}

}  // namespace

TEST(InitialState, SeedsFirstPointAndPool) {
  const ConstructionState s = unit_state();
  ASSERT_EQ(s.points.size(), 1u);
  EXPECT_EQ(s.points[0], Point::basis(64, 1));
  EXPECT_EQ(s.pool.front(), 2u);
  EXPECT_EQ(s.pool.back(), 63u);
  EXPECT_NEAR(s.lambda, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.C, (std::sqrt(2.0) - 1.0) / 8.0, 1e-15);
  EXPECT_TRUE(verify_properties(s).all_passed());
}

TEST(Residual, UnitBasisOffsetEqualsLambda) {
  const ConstructionState s = unit_state();
  const VectorXd off = residual_offset(s, 2);
  ASSERT_EQ(off.size(), 2);
  EXPECT_NEAR(off(0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(off(1), std::sqrt(2.0), 1e-15);

  const DifferentiableMap f = residual_map(s, 2, 0.1);
  EXPECT_EQ(f.dim, 2u);
  EXPECT_EQ(f.eval(VectorXd::Zero(2)), VectorXd::Zero(2));
}

TEST(Residual, CandidatePointIsAffineInCoefficients) {
  const ConstructionState s = unit_state();
  const VectorXd a = (VectorXd(2) << 0.25, -0.5).finished();
  const Point g = candidate_point(s, 3, a);
  EXPECT_DOUBLE_EQ(g[1], 0.25);
  EXPECT_DOUBLE_EQ(g[3], 0.5);
  EXPECT_THROW(candidate_point(s, 3, VectorXd::Zero(3)), Error);
}

TEST(Jacobian, UnitBasisClosedForm) {
  const GateMatrix D = jacobian_at_zero(unit_state(), 2);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(D.entries(0, 0), -r, 1e-15);
  EXPECT_NEAR(D.entries(0, 1), r, 1e-15);
  EXPECT_NEAR(D.entries(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(D.entries(1, 1), r, 1e-15);
}

TEST(Jacobian, DiagonalDominatesAndEntriesStayBounded) {
  for (double p : {2.0, 3.0}) {
    ConstructionState s = perturbed_state(p);
    while (true) {
      for (std::size_t i = 0; i < 4; ++i) {
        const std::size_t K = s.pool[i];
        const Eigen::MatrixXd D = jacobian_at_zero(s, K).entries;
        const auto n = D.rows();
        for (Eigen::Index j = 0; j < n; ++j) EXPECT_GT(std::abs(D(j, j)), s.C);
        EXPECT_GE(D(n - 1, n - 1), (s.lambda - 1.0) / 4.0);
        EXPECT_LE(D.cwiseAbs().maxCoeff(), 2.0);
      }
      if (s.points.size() == 8) break;
      s = extend_one(s);
    }
  }
}

TEST(Jacobian, MatchesFiniteDifferencesOfResidual) {
  for (double p : {2.0, 3.0}) {
    const ConstructionState s = advance(perturbed_state(p), 3);
    const std::size_t K = s.pool.front();
    const DifferentiableMap f = residual_map(s, K, 0.1);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.02, 0.02);
    for (int t = 0; t < 5; ++t) {
      VectorXd a(4);
      for (auto& v : a) v = u(rng);
      const Eigen::MatrixXd diff =
          jacobian_at(s, K, a) - finite_difference_jacobian(f, a, 1e-5);
      EXPECT_LE(diff.cwiseAbs().maxCoeff(), 1e-7) << "p = " << p;
    }
  }
}

TEST(ExtendOne, UnitBasisPicksBasisVectorsUnchanged) {
  const ConstructionState s = advance(unit_state(), 8);
  ASSERT_EQ(s.logs.size(), 7u);
  for (std::size_t k = 1; k < 8; ++k) {
    const StepLog& log = s.logs[k - 1];
    EXPECT_EQ(log.step, k + 1);
    EXPECT_LE(log.solution_norm, 1e-12);
    const Point& x = s.points[k];
    Point diff = x - s.z()(log.K);
    for (double v : diff.coords()) EXPECT_LE(std::abs(v), 1e-12);
    EXPECT_GT(log.K, k == 1 ? 1u : s.logs[k - 2].K);
  }
  // Pool only holds indices beyond the last accepted candidate.
  EXPECT_GT(s.pool.front(), s.logs.back().K);
}

TEST(ExtendOne, PerturbedEightPointsAgainstIndependentNorm) {
  const ConstructionState s = advance(perturbed_state(), 8);
  ASSERT_EQ(s.points.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = i + 1; j < 8; ++j) {
      const auto d = static_cast<double>(oracle::l2_norm((s.points[i] - s.points[j]).vector()));
      EXPECT_NEAR(d, s.lambda, 1e-8) << i << "," << j;
    }
    EXPECT_LE(static_cast<double>(oracle::l2_norm(s.points[i].vector())), 2.0);
  }
  for (const StepLog& log : s.logs) {
    EXPECT_LE(log.solution_norm, log.delta);
    EXPECT_LE(log.max_decay, 0.25);
    EXPECT_TRUE(log.certificate.passes());
    EXPECT_TRUE(log.gate.in_class);
    EXPECT_LE(log.gate.contraction, 0.5);
    EXPECT_LE(log.gate.inverse_norm, log.gate.inverse_bound);
  }
  EXPECT_TRUE(verify_properties(s).all_passed());
}

TEST(ExtendOne, ZeroScheduleExhaustsPool) {
  ConstructionState s = perturbed_state();
  for (double& e : s.gate_sched.eps) e = 0.0;
  try {
    extend_one(s);
    FAIL() << "expected an exhausted pool";
  } catch (const StepError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kExhaustedPool);
    EXPECT_GT(e.log().gate_skips, 0u);
    EXPECT_EQ(e.log().K, 0u);
  }
}

TEST(ExtendOne, RefusesPastTarget) {
  const ConstructionState s = advance(unit_state(2.0, 2), 2);
  EXPECT_THROW(extend_one(s), Error);
}

TEST(Properties, ReportsSixChecksInOrder) {
  const PropertyReport r = verify_properties(unit_state());
  ASSERT_EQ(r.checks.size(), 6u);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(r.checks[static_cast<std::size_t>(i)].id, i + 1);
  EXPECT_TRUE(r.checks[0].vacuous);
  EXPECT_TRUE(r.checks[4].vacuous);
  EXPECT_EQ(r.first_failure(), nullptr);
}

TEST(Properties, ScaledPointBreaksTailDistance) {
  ConstructionState s = advance(perturbed_state(), 4);
  ASSERT_TRUE(verify_properties(s).all_passed());
  s.points[1] *= 1.01;
  const PropertyReport r = verify_properties(s);
  EXPECT_FALSE(r.all_passed());
  EXPECT_FALSE(r.checks[0].passed);
  EXPECT_FALSE(r.checks[1].passed);
  EXPECT_LT(r.checks[1].slack, 0.0);
  ASSERT_NE(r.first_failure(), nullptr);
  EXPECT_EQ(r.first_failure()->id, 1);
}

TEST(Build, FinalStateSatisfiesEveryProperty) {
  const EquilateralSet set = build(NormOracle::lp(3.0, 64), SequenceSource::unit_basis(64),
                                   kUnitPolicy, BuilderOptions{});
  EXPECT_NEAR(set.lambda, std::pow(2.0, 1.0 / 3.0), 1e-15);
  EXPECT_LE(set.defect, 1e-8);
  EXPECT_TRUE(set.properties.all_passed());
  for (const PropertyCheck& c : set.properties.checks) EXPECT_GE(c.slack, 0.0) << c.name;
}

TEST(Build, RerunsAreBitIdentical) {
  const auto run = [] {
    return build(NormOracle::lp(2.0, 64), SequenceSource::perturbed_basis(64, 0.5),
                 kPerturbedPolicy, BuilderOptions{});
  };
  const EquilateralSet a = run();
  const EquilateralSet b = run();
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i], b.points[i]);
  EXPECT_EQ(a.defect, b.defect);
}

TEST(Build, FailureIsReportedWithoutThrowing) {
  BuilderOptions opt;
  opt.gate = GateMode::kSchedule;
  const BuildOutcome out = run_build(NormOracle::lp(2.0, 64),
                                     SequenceSource::perturbed_basis(64, 0.5),
                                     kPerturbedPolicy, opt);
  ASSERT_FALSE(out.ok());
  ASSERT_TRUE(out.failure.has_value());
  EXPECT_EQ(out.failure->kind, ErrorKind::kExhaustedPool);
  EXPECT_EQ(out.failure->step, 2u);
  EXPECT_TRUE(out.failed_step.has_value());
  EXPECT_TRUE(out.state.has_value());
}

TEST(GateModeNames, RoundTrip) {
  for (GateMode m : {GateMode::kSchedule, GateMode::kCertified}) {
    EXPECT_EQ(parse_gate_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_gate_mode("loose"), Error);
}
