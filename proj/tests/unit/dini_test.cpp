#include <gtest/gtest.h>

#include <cmath>

#include "dinilab/dini.hpp"

namespace dinilab {
namespace {

DiniCertificate certify(const ModulusOfContinuity& w, double theta, double tau = 1.0, double cap = 1e6,
                        double tol = 1e-6) {
  DiniOptions o;
  o.tol = tol;
  o.theta = theta;
  o.tau = tau;
  o.cap = cap;
  return dini_integral(w, o);
}

TEST(Dini, IdentityIntegratesToOne) {
  const auto c = certify(ModulusOfContinuity::power(1.0), 0.5);
  EXPECT_EQ(c.verdict, DiniVerdict::dini);
  EXPECT_LE(c.lower_bound, 1.0);
  EXPECT_GE(c.upper_bound, 1.0);
}

TEST(Dini, LogPowerTwoIntegratesToOne) {
  // u = 1 - ln t turns the integral into int_1^inf u^-2 du = 1.
  const auto c = certify(ModulusOfContinuity::log_power(2.0), 0.5);
  EXPECT_EQ(c.verdict, DiniVerdict::dini);
  EXPECT_LE(c.lower_bound, 1.0);
  EXPECT_GE(c.upper_bound, 1.0);
  EXPECT_TRUE(c.tail_certified);
  EXPECT_LE(c.tail_estimate, 1e-6);
}

TEST(Dini, SlowTailSampledBelowDoubleRange) {
  for (double theta : {0.1, 0.5, 0.9}) {
    const auto c = certify(ModulusOfContinuity::log_power(2.0), theta);
    EXPECT_EQ(c.verdict, DiniVerdict::dini);
    EXPECT_LE(c.tail_estimate, 1e-6) << "theta=" << theta;
    EXPECT_GT(static_cast<double>(c.terms_used) * -std::log(theta), 1000.0);
  }
}

TEST(Dini, LogPowerOneDiverges) {
  const auto c = certify(ModulusOfContinuity::log_power(1.0), 0.5);
  EXPECT_EQ(c.verdict, DiniVerdict::divergent);
  EXPECT_GT(c.lower_bound, 1e6);
}

TEST(Dini, IterationLimitIsInconclusiveNotAnError) {
  DiniOptions o;
  o.max_terms = 4;
  o.tol = 1e-300;
  const auto w = ModulusOfContinuity::custom([](double t) { return 1.0 / (1.0 - std::log(t)); }, 1.0, "slow");
  DiniCertificate c;
  ASSERT_NO_THROW(c = dini_integral(w, o));
  EXPECT_EQ(c.verdict, DiniVerdict::inconclusive);
}

TEST(DiniProperty, PartitionSandwich) {
  for (double theta : {0.1, 0.25, 0.5, 0.9}) {
    for (double alpha : {0.25, 0.5, 1.0, 2.0}) {
      for (double tau : {0.5, 1.0}) {
        const auto c = certify(ModulusOfContinuity::power(alpha), theta, tau);
        const double exact = std::pow(tau, alpha) / alpha;
        ASSERT_EQ(c.verdict, DiniVerdict::dini);
        EXPECT_LE(c.lower_bound, exact) << "alpha=" << alpha << " theta=" << theta;
        EXPECT_GE(c.upper_bound, exact) << "alpha=" << alpha << " theta=" << theta;
      }
    }
    for (double alpha : {1.5, 2.0, 3.0}) {
      const auto c = certify(ModulusOfContinuity::log_power(alpha), theta, 1.0, 1e6, 1e-3);
      const double exact = 1.0 / (alpha - 1.0);
      ASSERT_EQ(c.verdict, DiniVerdict::dini);
      EXPECT_LE(c.lower_bound, exact) << "log alpha=" << alpha << " theta=" << theta;
      EXPECT_GE(c.upper_bound, exact) << "log alpha=" << alpha << " theta=" << theta;
    }
  }
}

TEST(DiniProperty, BoundsTightenAsThetaGrows) {
  const auto w = ModulusOfContinuity::power(0.5);
  const auto coarse = certify(w, 0.1), fine = certify(w, 0.9);
  EXPECT_LT(fine.upper_bound - fine.lower_bound, coarse.upper_bound - coarse.lower_bound);
}

TEST(XiNorm, LinearLawBracket) {
  // sigma(1) + int_0^1 s / s ds = 2
  const auto xi = xi_norm(DegeneracyLaw::make(ModulusOfContinuity::power(1.0)));
  EXPECT_LE(xi.lower, 2.0);
  EXPECT_GE(xi.upper, 2.0);
}

}  // namespace
}  // namespace dinilab
