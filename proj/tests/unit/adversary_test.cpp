#include <gtest/gtest.h>

#include <cmath>

#include "dinilab/sequences.hpp"

namespace dinilab {
namespace {

void expect_monotone(const AdversaryResult& r, std::uint64_t upto) {
  for (std::uint64_t j = 1; j < upto; ++j) ASSERT_LE(r.a.term(j + 1), r.a.term(j)) << "j=" << j;
  for (std::size_t k = 1; k < r.blocks.size(); ++k) ASSERT_LE(r.blocks[k].log_value, r.blocks[k - 1].log_value);
}

TEST(Adversary, HarmonicReachesThree) {
  const auto r = adversarial_for(CoefficientSequence::harmonic(), 3.0);
  EXPECT_GT(r.partial_sum_lower, 3.0);
  ASSERT_TRUE(r.K.has_value());
  ASSERT_TRUE(r.partial_sum_direct.has_value());
  EXPECT_GT(*r.partial_sum_direct, 3.0);
  expect_monotone(r, 2000);
}

TEST(Adversary, GeometricReachesHundredWithUnitNorm) {
  const auto r = adversarial_for(CoefficientSequence::geometric(), 100.0);
  EXPECT_GT(r.partial_sum_lower, 100.0);
  EXPECT_NEAR(r.norm.value, 1.0, 1e-12);
  EXPECT_LE(r.norm.error, 1e-12);
  expect_monotone(r, 2000);
}

TEST(Adversary, BlockContributionsGrowGeometrically) {
  const auto r = adversarial_for(CoefficientSequence::harmonic(), 1e3);
  for (const auto& b : r.blocks) {
    EXPECT_DOUBLE_EQ(b.mass, std::ldexp(1.0, -static_cast<int>(b.k) - 1));
    EXPECT_GE(b.contribution_lower, std::ldexp(1.0, static_cast<int>(b.k) + 2) * (1.0 - 1e-12));
  }
}

TEST(Adversary, InverseLogNeedsAstronomicalIndices) {
  const auto r = adversarial_for(CoefficientSequence::inverse_log(), 1e3);
  EXPECT_GT(r.partial_sum_lower, 1e3);
  EXPECT_NEAR(r.norm.value, 1.0, 1e-10);
  EXPECT_FALSE(r.K.has_value());
  EXPECT_GT(r.log_K, std::log(9.0e15));
}

TEST(Adversary, RejectsNonVanishingCoefficients) {
  const auto flat = CoefficientSequence::from_function([](std::uint64_t) { return 1.0; }, "flat");
  EXPECT_THROW(adversarial_for(flat, 10.0), NumericFailure);
}

}  // namespace
}  // namespace dinilab
