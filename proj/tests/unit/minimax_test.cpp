#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dinilab/pde/minimax.hpp"
#include "generators.hpp"

namespace dinilab::pde {
namespace {

using testing::Gen;

// Sup error of the best constant for a fixed slope: half the spread of u - b.x.
double spread_error(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& u,
                    double b0, double b1) {
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = u[i] - b0 * x[i] - b1 * (y.empty() ? 0.0 : y[i]);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return 0.5 * (hi - lo);
}

// Golden-section minimization of a convex function on [lo, hi].
template <class F>
double golden_min(F f, double lo, double hi, int iterations = 200) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = f(a), fb = f(b);
  for (int i = 0; i < iterations; ++i) {
    if (fa < fb) {
      hi = b, b = a, fb = fa, a = hi - g * (hi - lo), fa = f(a);
    } else {
      lo = a, a = b, fa = fb, b = lo + g * (hi - lo), fb = f(b);
    }
  }
  return std::min(fa, fb);
}

TEST(Minimax, ThreeHalvesPowerOnSymmetricInterval) {
  const double c = 2.0 * std::sqrt(2.0) / 3.0;
  for (double rho : {1.0, 0.25, 1.0 / 16.0}) {
    std::vector<double> x, u;
    for (int i = -200; i <= 200; ++i) {
      x.push_back(rho * i / 200.0);
      u.push_back(c * std::pow(std::abs(x.back()), 1.5));
    }
    const auto fit = chebyshev_affine_fit(1, x, {}, u);
    EXPECT_NEAR(fit.error, std::sqrt(2.0) / 3.0 * std::pow(rho, 1.5), 1e-14);
    EXPECT_NEAR(fit.slope[0], 0.0, 1e-12);
  }
}

TEST(Minimax, AffineDataFitsExactly) {
  std::vector<double> x, y, u;
  for (int i = 0; i < 40; ++i) {
    x.push_back(std::cos(i * 0.7) * 0.3);
    y.push_back(std::sin(i * 1.3) * 0.3);
    u.push_back(1.5 - 2.0 * x.back() + 0.25 * y.back());
  }
  const auto fit = chebyshev_affine_fit(2, x, y, u, {0.1, -0.1});
  EXPECT_LT(fit.error, 1e-13);
  EXPECT_NEAR(fit.slope[0], -2.0, 1e-12);
  EXPECT_NEAR(fit.slope[1], 0.25, 1e-12);
  EXPECT_NEAR(fit.value, 1.5 - 0.2 - 0.025, 1e-12);
}

TEST(MinimaxProperty, MatchesConvexSearch1D) {
  Gen g(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + g.index(40);
    std::vector<double> x(n), u(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = g.uniform(-1.0, 1.0);
      u[i] = g.uniform(-1.0, 1.0);
    }
    const auto fit = chebyshev_affine_fit(1, x, {}, u);
    const double oracle = golden_min([&](double b) { return spread_error(x, {}, u, b, 0.0); }, -1e3, 1e3);
    EXPECT_NEAR(fit.error, oracle, 1e-9) << "trial " << trial;
    EXPECT_NEAR(spread_error(x, {}, u, fit.slope[0], 0.0), fit.error, 1e-12);
  }
}

TEST(MinimaxProperty, MatchesConvexSearch2D) {
  Gen g(12);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + g.index(25);
    std::vector<double> x(n), y(n), u(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = g.uniform(-1.0, 1.0);
      y[i] = g.uniform(-1.0, 1.0);
      u[i] = x[i] * x[i] - y[i] + g.uniform(-0.5, 0.5);
    }
    const auto fit = chebyshev_affine_fit(2, x, y, u);
    auto inner = [&](double b0) {
      return golden_min([&](double b1) { return spread_error(x, y, u, b0, b1); }, -50.0, 50.0, 120);
    };
    const double oracle = golden_min(inner, -50.0, 50.0, 120);
    EXPECT_LE(fit.error, oracle + 1e-9) << "trial " << trial;
    EXPECT_NEAR(fit.error, oracle, 1e-6) << "trial " << trial;
  }
}

TEST(Minimax, RejectsMismatchedInput) {
  EXPECT_THROW(chebyshev_affine_fit(1, {0.0, 1.0}, {}, {1.0}), ValidationError);
  EXPECT_THROW(chebyshev_affine_fit(3, {0.0}, {}, {1.0}), ValidationError);
}

}  // namespace
}  // namespace dinilab::pde
