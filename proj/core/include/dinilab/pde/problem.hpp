/// @file problem.hpp
/// @brief Degenerate elliptic model problems sigma(|Du + xi|) Laplace(u) = f
/// on the unit ball, and the rescaling that makes them small.
#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "dinilab/modulus.hpp"

namespace dinilab::pde {

/// Scalar field on the plane; 1D problems ignore y.
using Field = std::function<double(double x, double y)>;

struct ProblemSpec {
  int dimension = 1;
  DegeneracyLaw sigma = DegeneracyLaw::make(ModulusOfContinuity::constant(1.0));
  Field source = [](double, double) { return 0.0; };
  /// Dirichlet data, given as a function on the closed ball; only its
  /// restriction to the boundary enters the solver.
  Field boundary = [](double, double) { return 0.0; };
  std::array<double, 2> xi{0.0, 0.0};
  double h = 1e-3;
  /// sup |f| when known; estimated on the mesh otherwise.
  std::optional<double> source_bound;

  void validate() const;
  /// sup |f| over mesh nodes of the unit ball, or `source_bound`.
  double source_sup() const;
  /// sup |g| over boundary points.
  double boundary_sup() const;
};

/// v(x) = u(r x) / K solves the problem returned by normalize_problem.
struct ScalingRecord {
  double r = 1.0;
  double K = 1.0;
  double u_bound = 0.0;
  double f_bound = 0.0;
  bool u_bound_estimated = false;
  bool r_shrunk = false;
};

struct NormalizedProblem {
  ProblemSpec problem;
  ScalingRecord scaling;
};

/// K = 1/(||u|| + ||f||), r = eps, shrunk to K/2 when r >= K and further so
/// that ||f_bar|| = (r^2/K) ||f|| < eps. Returns
///   sigma_bar(t) = sigma(K t / r), f_bar(x) = (r^2/K) f(r x),
///   g_bar(x) = g(r x) / K, xi_bar = (r/K) xi.
/// Without `u_bound` the estimate sup|g| + sup|f| is used.
NormalizedProblem normalize_problem(const ProblemSpec& problem, double eps,
                                    std::optional<double> u_bound = std::nullopt);

}  // namespace dinilab::pde
