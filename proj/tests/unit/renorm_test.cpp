#include <gtest/gtest.h>

#include <cmath>

#include "dinilab/collapse.hpp"
#include "dinilab/renorm.hpp"

namespace dinilab {
namespace {

RenormParams linear_params(double beta = 0.75, std::size_t depth = 40) {
  RenormParams p{.sigma = DegeneracyLaw::make(ModulusOfContinuity::power(1.0))};
  p.L = 2.0;
  p.beta = beta;
  p.delta = 1.0 / 20.0;
  p.depth = depth;
  return p;
}

const RenormalizationTrace& linear_trace() {
  static const RenormalizationTrace trace = run_shoring_algorithm(linear_params());
  return trace;
}

TEST(InitialScale, FastCaseForLinearLaw) {
  const auto s = choose_initial_scale(linear_params());
  EXPECT_EQ(s.scale_case, ScaleCase::fast_degeneracy);
  // 4 r^(3/4) = r^(1/2)  =>  r = 4^-4
  EXPECT_NEAR(s.r, 1.0 / 256.0, 1e-15);
  EXPECT_NEAR(s.mu1, 1.0 / 16.0, 1e-15);
  EXPECT_NEAR(s.theta, 1.0 / 16.0, 1e-15);
  EXPECT_FALSE(s.overridden);
}

TEST(InitialScale, TameCaseForLinearLaw) {
  auto p = linear_params(0.25);
  p.alpha = 0.125;
  const auto s = choose_initial_scale(p);
  EXPECT_EQ(s.scale_case, ScaleCase::tame_degeneracy);
  // r = (2L)^(1 / (alpha - beta)) = 4^-8, mu_1 = r^alpha = 1/4
  EXPECT_NEAR(s.r, std::pow(4.0, -8.0), 1e-18);
  EXPECT_NEAR(s.mu1, 0.25, 1e-14);
  EXPECT_LT(s.r, s.mu1);
  EXPECT_GT(s.theta, 0.0);
  EXPECT_LT(s.theta, 1.0);
}

TEST(InitialScale, OverrideWins) {
  auto p = linear_params(0.75);
  p.alpha = 0.375;
  p.case_override = ScaleCase::tame_degeneracy;
  const auto s = choose_initial_scale(p);
  EXPECT_TRUE(s.overridden);
  EXPECT_EQ(s.scale_case, ScaleCase::tame_degeneracy);
  // r = 4^(1 / (3/8 - 3/4)) = 4^(-8/3), mu_1 = r^(3/8) = 1/4
  EXPECT_NEAR(s.r, std::pow(4.0, -8.0 / 3.0), 1e-15);
  EXPECT_NEAR(s.mu1, 0.25, 1e-14);
}

TEST(InitialScale, FastCaseWithoutSmallRootFails) {
  // 4 r^(1/4) = r^(1/2) only at r = 256.
  auto p = linear_params(0.25);
  p.case_override = ScaleCase::fast_degeneracy;
  EXPECT_THROW(choose_initial_scale(p), Error);
}

TEST(RenormParams, DeltaRestrictedToTenth) {
  auto p = linear_params();
  p.delta = 0.5;
  try {
    p.validate();
    FAIL() << "delta = 0.5 accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("(0, 1/10)"), std::string::npos) << e.what();
  }
}

TEST(ThetaSequence, LinearLaw) {
  const auto a = build_theta_sequence(DegeneracyLaw::make(ModulusOfContinuity::power(1.0)), 1.0 / 16.0);
  for (std::uint64_t k = 1; k <= 10; ++k) EXPECT_NEAR(a.term(k), std::pow(16.0, -static_cast<double>(k)), 1e-15);
  EXPECT_NEAR(l1_norm(a, 1e-12).value, 1.0 / 15.0, 1e-12);
}

TEST(ThetaSequence, QuadraticLaw) {
  const auto a = build_theta_sequence(DegeneracyLaw::make(ModulusOfContinuity::power(2.0)), 0.25);
  for (std::uint64_t k = 1; k <= 10; ++k) EXPECT_NEAR(a.term(k), std::ldexp(1.0, -static_cast<int>(k)), 1e-15);
  EXPECT_NEAR(l1_norm(a, 1e-10).value, 1.0, 1e-10);
}

TEST(ThetaSequence, StartsBelowOne) {
  const auto a = build_theta_sequence(DegeneracyLaw::make(ModulusOfContinuity::log_power(2.0)), 0.5);
  for (std::uint64_t k = 1; k <= 20; ++k) {
    EXPECT_LT(a.term(k), 1.0);
    if (k > 1) {
      EXPECT_LE(a.term(k), a.term(k - 1));
    }
  }
}

TEST(ShoringAlgorithm, FirstRenormalizedLawIsNormalized) {
  const auto& t = linear_trace();
  EXPECT_NEAR(t.sigma1_at_one, 1.0, 1e-12);
  EXPECT_NEAR(renormalized_sigma_eval(t, 1, 1.0), 1.0, 1e-12);
}

TEST(ShoringAlgorithm, IndependentRecomputationOfSigmaAtC) {
  // For sigma(t) = t: sigma_k(c) = (tau_k / r^k) tau_k c, recomputed from mu directly.
  const auto& t = linear_trace();
  const double r = t.r();
  double tau = 1.0;
  for (const auto& step : t.steps) {
    tau *= step.mu;
    const double direct = tau * tau * step.c / std::pow(r, static_cast<double>(step.k));
    EXPECT_NEAR(step.sigma_at_c, direct, 1e-9 * direct) << "k=" << step.k;
    EXPECT_NEAR(step.tau, tau, 1e-12 * tau);
    if (step.k >= 2) {
      EXPECT_GE(step.sigma_at_c, 1.0 - 1e-9) << "k=" << step.k;
    }
  }
}

TEST(ShoringAlgorithm, StructuralInvariants) {
  const auto& t = linear_trace();
  EXPECT_EQ(t.depth(), 40u);
  EXPECT_EQ(t.clamped_count, 0u);
  for (std::size_t k = 1; k < t.depth(); ++k) {
    EXPECT_LT(t.steps[k].tau, t.steps[k - 1].tau);
    EXPECT_GE(t.steps[k].mu, t.steps[k - 1].mu);
    EXPECT_LT(t.steps[k].mu, 1.0);
    EXPECT_LE(t.steps[k].c, t.steps[k - 1].c);
  }
  for (const auto& step : t.steps) {
    if (step.branch == Branch::raised) {
      EXPECT_LE(step.tau, step.a_over_c * (1.0 + 1e-9)) << "k=" << step.k;
    }
    if (step.branch == Branch::kept && step.k > 1) {
      const auto& prev = t.steps[step.k - 2];
      EXPECT_EQ(step.mu, prev.mu);
    }
  }
}

TEST(ShoringAlgorithm, FamilyIsShoredUp) {
  const auto& t = linear_trace();
  const auto w = is_shored_up([&t](std::size_t n, double s) { return renormalized_sigma_eval(t, n, s); },
                              [&t](std::size_t n) { return t.steps[n - 1].c; }, t.depth(), 1.0 - 1e-9);
  EXPECT_TRUE(w.shored_up) << "min " << w.min_value << " at " << w.argmin;
}

TEST(RenormalizedSigma, ZeroIsTheOriginalLaw) {
  const auto& t = linear_trace();
  for (double s : {1e-6, 0.3, 1.0}) EXPECT_DOUBLE_EQ(renormalized_sigma_eval(t, 0, s), s);
}

TEST(C1Modulus, DirectSumWithoutTail) {
  const auto& t = linear_trace();
  const double s = 0.01;  // floor(ln 100) = 4
  double direct = 0.0;
  for (std::size_t i = 4; i <= t.depth(); ++i) direct += t.tau(i);
  EXPECT_NEAR(c1_modulus(t, 1.0, s, TailPolicy::none), direct, 1e-15 * direct);
  EXPECT_GE(c1_modulus(t, 1.0, s), direct);
  EXPECT_NEAR(c1_modulus(t, 2.5, s, TailPolicy::none), 2.5 * direct, 1e-15 * direct);
}

TEST(C1Modulus, GeometricContinuationPastTheTrace) {
  const auto& t = linear_trace();
  const double mu = t.steps.back().mu;
  const std::size_t m = t.depth() + 5;
  const double expected = t.tau(t.depth()) * std::pow(mu, 5.0) / (1.0 - mu);
  const double value = c1_modulus(t, 1.0, std::exp(-static_cast<double>(m)), TailPolicy::geometric);
  EXPECT_NEAR(value, expected, 1e-12 * expected);
  EXPECT_THROW(c1_modulus(t, 1.0, std::exp(-static_cast<double>(m))), NumericFailure);
}

TEST(C1Modulus, MonotoneAndVanishing) {
  const auto& t = linear_trace();
  const double first = c1_modulus(t, 1.0, 1.0);
  double previous = first;
  for (int m = 1; m <= 57; ++m) {
    const double v = c1_modulus(t, 1.0, std::ldexp(1.0, -m));
    EXPECT_LE(v, previous) << "m=" << m;
    previous = v;
  }
  EXPECT_LT(previous, 1e-12 * first);
}

TEST(C1Modulus, FullSumNearOne) {
  const auto& t = linear_trace();
  double total = 0.0;
  for (std::size_t i = 0; i <= t.depth(); ++i) total += t.tau(i);
  EXPECT_NEAR(c1_modulus(t, 1.0, 1.0 - 1e-12, TailPolicy::none), total, 1e-14 * total);
}

}  // namespace
}  // namespace dinilab
