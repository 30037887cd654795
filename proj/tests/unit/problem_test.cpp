#include <gtest/gtest.h>

#include <cmath>

#include "dinilab/pde/problem.hpp"

namespace dinilab::pde {
namespace {

ProblemSpec constant_problem(double boundary, double source) {
  ProblemSpec p;
  p.sigma = DegeneracyLaw::make(ModulusOfContinuity::power(1.0));
  p.boundary = [boundary](double, double) { return boundary; };
  p.source = [source](double, double) { return source; };
  p.source_bound = std::abs(source);
  return p;
}

TEST(Normalize, ZeroSource) {
  const auto n = normalize_problem(constant_problem(1.0, 0.0), 0.5, 1.0);
  EXPECT_DOUBLE_EQ(n.scaling.K, 1.0);
  EXPECT_DOUBLE_EQ(n.scaling.r, 0.5);
  EXPECT_FALSE(n.scaling.r_shrunk);
  EXPECT_EQ(n.problem.source(0.3, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(n.problem.boundary(1.0, 0.0), 1.0);
}

TEST(Normalize, SmallSourceAfterScaling) {
  const auto n = normalize_problem(constant_problem(3.0, 1.0), 0.1, 3.0);
  EXPECT_DOUBLE_EQ(n.scaling.K, 0.25);
  EXPECT_DOUBLE_EQ(n.scaling.r, 0.1);
  // f_bar = (r^2 / K) f(r x) = 0.04
  EXPECT_NEAR(n.problem.source(0.5, 0.0), 0.04, 1e-15);
  EXPECT_LT(n.problem.source_sup(), 0.1);
  EXPECT_NEAR(n.problem.boundary(1.0, 0.0), 12.0, 1e-14);
}

TEST(Normalize, InverseScalesByRatio) {
  const auto n = normalize_problem(constant_problem(1.0, 0.0), 0.1, 1.0);
  ASSERT_DOUBLE_EQ(n.scaling.K / n.scaling.r, 10.0);
  const auto& sbar = n.problem.sigma.sigma;
  for (double t : {0.01, 0.05, 0.1}) {
    EXPECT_NEAR(sbar.evaluate(t), 10.0 * t, 1e-15);
    EXPECT_NEAR(sbar.inverse_evaluate(t), t / 10.0, 1e-15);
  }
}

TEST(Normalize, ShrinksWhenScaleExceedsK) {
  const auto n = normalize_problem(constant_problem(10.0, 1.0), 0.5, 10.0);
  EXPECT_TRUE(n.scaling.r_shrunk);
  EXPECT_LT(n.scaling.r, n.scaling.K);
  EXPECT_LT(n.problem.source_sup(), 0.5);
}

TEST(Normalize, TranslatesSlope) {
  auto p = constant_problem(1.0, 0.0);
  p.dimension = 2;
  p.xi = {2.0, -1.0};
  const auto n = normalize_problem(p, 0.1, 1.0);
  EXPECT_NEAR(n.problem.xi[0], 0.2, 1e-15);
  EXPECT_NEAR(n.problem.xi[1], -0.1, 1e-15);
}

TEST(Normalize, EstimatedBoundFlagged) {
  const auto n = normalize_problem(constant_problem(2.0, 1.0), 0.1);
  EXPECT_TRUE(n.scaling.u_bound_estimated);
  EXPECT_DOUBLE_EQ(n.scaling.u_bound, 3.0);
}

TEST(ProblemSpec, Validation) {
  auto p = constant_problem(0.0, 0.0);
  p.dimension = 3;
  EXPECT_THROW(p.validate(), ValidationError);
  p.dimension = 1;
  p.h = 0.0;
  EXPECT_THROW(p.validate(), ValidationError);
  EXPECT_THROW(normalize_problem(constant_problem(0.0, 0.0), 0.0), ValidationError);
}

}  // namespace
}  // namespace dinilab::pde
