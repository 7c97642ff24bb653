#include <gtest/gtest.h>

#include <cmath>

#include "equilex/errors.hpp"
#include "equilex/stabilizer.hpp"
#include "oracles.hpp"

using namespace equilex;

namespace {

// x_ℓ = e_ℓ + γ_ℓ Σ_{j ∈ outer window} e_j for ℓ < start and x_ℓ = e_ℓ in the
// tail. In ℓ_2 this gives b_ℓ = γ_ℓ/√2 exactly.
SequenceSource adversarial(std::size_t dim, const TailPolicy& policy, double gamma,
                           bool odd_only) {
  return SequenceSource::composed(
      dim, dim - 1,
      [dim, policy, gamma, odd_only](std::size_t l) {
        Point p = Point::basis(dim, l);
        if (l < policy.start && (!odd_only || l % 2 == 1)) {
          for (std::size_t j = policy.start; j < policy.start + policy.window; ++j) {
            p[j] += gamma;
          }
        }
        return p;
      },
      "adversarial");
}

}  // namespace

TEST(Rescale, UnitBasisIsAlreadyEquilateral) {
  for (double p : {1.5, 2.0, 3.0}) {
    const NormOracle o = NormOracle::lp(p, 40);
    const Rescaling r =
        rescale_to_common_lambda(SequenceSource::unit_basis(40), o, TailPolicy{20, 5, 1e-10});
    EXPECT_NEAR(r.lambda, std::pow(2.0, 1.0 / p), 1e-15);
    for (double a : r.scalars) EXPECT_EQ(a, 1.0);
    EXPECT_EQ(r.tail_norm, 1.0);
  }
}

TEST(Rescale, PerturbedBasisMatchesClosedFormScalars) {
  const NormOracle o = NormOracle::lp(2.0, 64);
  const TailPolicy policy{40, 5, 1e-8};
  const Rescaling r =
      rescale_to_common_lambda(SequenceSource::perturbed_basis(64, 0.5), o, policy);
  EXPECT_NEAR(r.lambda, std::sqrt(2.0), 1e-12);
  for (std::size_t k = 1; k <= 12; ++k) {
    EXPECT_NEAR(r.scalar(k), oracle::perturbed_scalar(k), 1e-8) << "k = " << k;
  }
}

TEST(Rescale, ScalarsApproachOneWithinTheEpsilonBound) {
  const NormOracle o = NormOracle::lp(2.0, 64);
  const TailPolicy policy{40, 5, 1e-8};
  const Rescaling r =
      rescale_to_common_lambda(SequenceSource::perturbed_basis(64, 0.5), o, policy);
  const double eps = (r.lambda - 1.0) / 4.0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n < policy.start; ++n) {
    const double dev = std::abs(r.scalar(n) - 1.0);
    EXPECT_LE(dev, prev + 1e-15) << "n = " << n;
    prev = dev;
    const double lambda_n = r.tail_distances[n - 1];
    if (lambda_n < r.lambda) EXPECT_LE(dev, (r.lambda - lambda_n) / eps + 1e-15);
  }
}

TEST(Rescale, RescaledTailDistancesEqualLambda) {
  const NormOracle o = NormOracle::lp(3.0, 64);
  const TailPolicy policy{40, 5, 1e-8};
  const SequenceSource raw = SequenceSource::perturbed_basis(64, 0.5);
  const Rescaling r = rescale_to_common_lambda(raw, o, policy);
  const SequenceSource y = apply_rescaling(raw, r);
  for (std::size_t n = 1; n < policy.start; ++n) {
    const double d = tail_limit([&](std::size_t i) { return norm(o, y(n) - y(i)); }, policy);
    EXPECT_NEAR(d, r.lambda, policy.tol) << "n = " << n;
  }
}

TEST(Rescale, ConstantSequenceHasNoGap) {
  const NormOracle o = NormOracle::lp(2.0, 32);
  const SequenceSource constant = SequenceSource::composed(
      32, 31, [](std::size_t) { return Point::basis(32, 1); }, "constant");
  try {
    rescale_to_common_lambda(constant, o, TailPolicy{10, 5, 1e-8});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLambdaTooSmall);
  }
}

TEST(Rescale, MarginIsEnforced) {
  // λ = 2^{1/100} ≈ 1.007 sits below the default margin.
  const NormOracle o = NormOracle::lp(100.0, 32);
  EXPECT_THROW(rescale_to_common_lambda(SequenceSource::unit_basis(32), o, TailPolicy{10, 5, 1e-8}),
               Error);
  EXPECT_NO_THROW(rescale_to_common_lambda(SequenceSource::unit_basis(32), o,
                                           TailPolicy{10, 5, 1e-8}, 0.001));
}

TEST(Rescale, ShortSourceRejected) {
  const NormOracle o = NormOracle::lp(2.0, 12);
  EXPECT_THROW(rescale_to_common_lambda(SequenceSource::unit_basis(12), o, TailPolicy{10, 5, 1e-8}),
               Error);
}

TEST(KillFunctionalLimits, UnitBasisPassesThrough) {
  for (double p : {1.5, 2.0, 3.0}) {
    const NormOracle o = NormOracle::lp(p, 48);
    const TailPolicy policy{20, 5, 1e-8};
    const StabilizedSequence s =
        kill_functional_limits(SequenceSource::unit_basis(48), o, policy);
    EXPECT_FALSE(s.differenced);
    for (double b : s.functional_limits) EXPECT_EQ(b, 0.0);
    EXPECT_EQ(s.source(7), Point::basis(48, 7));
    EXPECT_DOUBLE_EQ(s.C, (s.lambda - 1.0) / 8.0);
  }
}

TEST(KillFunctionalLimits, PerturbedBasisMatchesInnerProductOracle) {
  const NormOracle o = NormOracle::lp(2.0, 64);
  const TailPolicy policy{40, 5, 1e-8};
  const StabilizedSequence s =
      kill_functional_limits(SequenceSource::perturbed_basis(64, 0.5), o, policy);
  EXPECT_FALSE(s.differenced);
  // b_ℓ = lim ⟨z_k − z_i, z_ℓ⟩ / ‖z_k − z_i‖ with z_n = a_n(e_n + 2^{-n} e_0).
  const TailWindows w = tail_windows(policy);
  for (std::size_t l = 1; l < policy.start; ++l) {
    double ref = 0.0;
    for (std::size_t k : w.outer) {
      for (std::size_t i : w.inner) {
        const double zk0 = std::ldexp(1.0, -static_cast<int>(k));
        const double zi0 = std::ldexp(1.0, -static_cast<int>(i));
        const double zl0 = oracle::perturbed_scalar(l) * std::ldexp(1.0, -static_cast<int>(l));
        ref += (zk0 - zi0) * zl0 / std::sqrt(2.0 + (zk0 - zi0) * (zk0 - zi0));
      }
    }
    ref /= static_cast<double>(w.outer.size() * w.inner.size());
    EXPECT_NEAR(s.functional_limits[l - 1], ref, 1e-15);
    EXPECT_LE(std::abs(s.functional_limits[l - 1]), policy.tol);
  }
}

TEST(KillFunctionalLimits, AdversarialSourceIsDifferenced) {
  const NormOracle o = NormOracle::lp(2.0, 64);
  const TailPolicy policy{12, 5, 1e-8};
  const double gamma = 0.3 * std::sqrt(2.0);
  const SequenceSource raw = adversarial(64, policy, gamma, false);

  const std::vector<double> raw_b = functional_limits(raw, o, policy);
  for (double b : raw_b) EXPECT_NEAR(b, 0.3, 1e-12);

  const StabilizedSequence s = kill_functional_limits(raw, o, policy);
  EXPECT_TRUE(s.differenced);
  for (double b : s.functional_limits) EXPECT_GT(std::abs(b), 0.2);

  // Independent brute-force double tail evaluation on the output.
  const TailWindows w = tail_windows(policy);
  for (std::size_t l = 1; l < policy.start; ++l) {
    const Point zl = s.source(l);
    double worst = 0.0;
    for (std::size_t k : w.outer) {
      for (std::size_t i : w.inner) {
        const Point u = s.source(k) - s.source(i);
        double dot = 0.0;
        for (std::size_t c = 0; c < u.dim(); ++c) dot += u[c] * zl[c];
        worst = std::max(worst, std::abs(dot / static_cast<double>(oracle::l2_norm(u.vector()))));
      }
    }
    EXPECT_LE(worst, policy.tol) << "l = " << l;
  }
}

TEST(KillFunctionalLimits, OutputSatisfiesSeparationAndLowerBound) {
  const NormOracle o = NormOracle::lp(2.0, 64);
  for (const TailPolicy policy : {TailPolicy{12, 5, 1e-8}, TailPolicy{40, 5, 1e-8}}) {
    const SequenceSource raw = policy.start == 12
                                   ? adversarial(64, policy, 0.3 * std::sqrt(2.0), false)
                                   : SequenceSource::perturbed_basis(64, 0.5);
    const StabilizedSequence s = kill_functional_limits(raw, o, policy);
    EXPECT_GT(s.lambda, 1.0);
    EXPECT_LT(s.lambda, 2.0);
    const std::size_t last = s.usable_end();
    EXPECT_TRUE(separation_slack(s, o, last).ok());
    for (std::size_t k = 1; k <= last; ++k) {
      for (std::size_t i = 1; i <= last; ++i) {
        if (i == k) continue;
        const double v = apply_functional(
            support_functional(o, s.source(k) - s.source(i)), s.source(k));
        EXPECT_GT(v, (s.lambda - 1.0) / 4.0);
        EXPECT_GT(v, 2.0 * s.C);
      }
      const double d = tail_limit(
          [&](std::size_t i) { return norm(o, s.source(k) - s.source(i)); }, policy);
      EXPECT_NEAR(d, s.lambda, policy.tol);
    }
  }
}

TEST(KillFunctionalLimits, VanishingEvenLimitTripsDivisionGuard) {
  const NormOracle o = NormOracle::lp(2.0, 64);
  const TailPolicy policy{12, 5, 1e-8};
  try {
    kill_functional_limits(adversarial(64, policy, 0.2, true), o, policy);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDivisionGuard);
  }
}
