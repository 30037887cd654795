#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "dinilab/pde/solver.hpp"

namespace dinilab::pde {
namespace {

const double kBoundary = 2.0 * std::sqrt(2.0) / 3.0;

ProblemSpec degenerate_oracle(double h) {
  ProblemSpec p;
  p.sigma = DegeneracyLaw::make(ModulusOfContinuity::power(1.0));
  p.source = [](double, double) { return 1.0; };
  p.boundary = [](double x, double) { return kBoundary * std::pow(std::abs(x), 1.5); };
  p.h = h;
  return p;
}

double max_error(const GridSolution& s, const std::function<double(double, double)>& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    e = std::max(e, std::abs(s.values[i] - exact(s.x[i], s.y.empty() ? 0.0 : s.y[i])));
  return e;
}

TEST(Solver, HarmonicLinearData) {
  ProblemSpec p;
  p.boundary = [](double x, double) { return x; };
  p.h = 1e-2;
  const auto s = solve(p);
  EXPECT_LT(max_error(s, [](double x, double) { return x; }), 1e-12);
  EXPECT_LT(s.residual_norm, 1e-8);
}

TEST(Solver, DegenerateClosedForm) {
  const auto s = solve(degenerate_oracle(1e-3));
  EXPECT_LE(max_error(s, [](double x, double) { return kBoundary * std::pow(std::abs(x), 1.5); }), 5e-3);
  EXPECT_GT(s.iterations, 0u);
  EXPECT_EQ(s.update_history.size(), s.iterations);
}

TEST(Solver, MeshHalvingImprovesError) {
  auto exact = [](double x, double) { return kBoundary * std::pow(std::abs(x), 1.5); };
  const double coarse = max_error(solve(degenerate_oracle(1e-3)), exact);
  const double fine = max_error(solve(degenerate_oracle(5e-4)), exact);
  EXPECT_GE(coarse / fine, 1.8);
}

TEST(Solver, LargeSlopeLeavesLinearSolution) {
  ProblemSpec p;
  p.sigma = DegeneracyLaw::make(ModulusOfContinuity::power(1.0));
  p.boundary = [](double x, double) { return 0.5 * x + 0.25; };
  p.xi = {10.0, 0.0};
  p.h = 1e-2;
  const auto s = solve(p);
  EXPECT_LT(max_error(s, [](double x, double) { return 0.5 * x + 0.25; }), 1e-12);
  EXPECT_EQ(s.floor_activations, 0u);
}

TEST(Solver, UniformlyEllipticMatchesPoisson) {
  // sigma >= 1 everywhere: the equation is Laplace(u) = f / sigma with
  // sigma = 1, and the quadratic solution is exact for the 3-point stencil.
  ProblemSpec p;
  p.sigma = DegeneracyLaw::make(ModulusOfContinuity::constant(1.0));
  p.source = [](double, double) { return 2.0; };
  p.boundary = [](double, double) { return 1.0; };
  p.h = 1.0 / 64.0;
  const auto s = solve(p);
  EXPECT_LT(max_error(s, [](double x, double) { return x * x; }), 1e-10);
}

TEST(Solver, DiskWithConstantLaw) {
  ProblemSpec p;
  p.dimension = 2;
  p.sigma = DegeneracyLaw::make(ModulusOfContinuity::constant(1.0));
  p.source = [](double, double) { return 4.0; };
  p.boundary = [](double, double) { return 1.0; };
  p.h = 1.0 / 32.0;
  const auto s = solve(p);
  // Boundary values are placed by projection, so the quadratic is matched to O(h).
  EXPECT_LT(max_error(s, [](double x, double y) { return x * x + y * y; }), 4.0 * p.h);
}

TEST(Solver, NonConvergenceCarriesHistory) {
  SolveOptions o;
  o.max_iter = 2;
  o.tol = 1e-300;
  try {
    solve(degenerate_oracle(1e-2), o);
    FAIL() << "expected non-convergence";
  } catch (const NonConvergence& e) {
    EXPECT_EQ(e.history().size(), 2u);
  }
}

TEST(SolverProperty, SlopeTranslationLeavesResidualUnchanged) {
  // (Du, xi) -> (Du + v, xi - v) with u -> u + v x.
  auto p = degenerate_oracle(1.0 / 128.0);
  const auto s = solve(p);
  std::mt19937_64 engine(99);
  std::uniform_real_distribution<double> slope(-5.0, 5.0);
  const double base = nonlinear_residual(p, s.values, 1e-8);
  for (int trial = 0; trial < 30; ++trial) {
    const double v = slope(engine), xi = slope(engine);
    auto original = p;
    original.xi = {xi, 0.0};
    auto shifted = p;
    shifted.xi = {xi - v, 0.0};
    auto values = s.values;
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += v * s.x[i];
    const double r0 = nonlinear_residual(original, s.values, 1e-8);
    const double r1 = nonlinear_residual(shifted, values, 1e-8);
    EXPECT_NEAR(r0, r1, 1e-8 * std::max(1.0, r0)) << "v=" << v << " xi=" << xi;
  }
  EXPECT_LT(base, 1e-3);
}

}  // namespace
}  // namespace dinilab::pde
