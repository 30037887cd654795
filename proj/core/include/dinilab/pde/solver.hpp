/// @file solver.hpp
/// @brief Damped Picard iteration for sigma(|Du + xi|) Laplace(u) = f.
///
/// Each sweep freezes the coefficient, g = f / max(sigma(|Du + xi|), floor),
/// solves the Dirichlet Poisson problem Laplace(w) = g and relaxes
/// u <- (1 - w) u + w w_new, optionally with Anderson mixing over the last
/// few sweeps. The gradient magnitude at a node is the larger
/// of the one-sided difference magnitudes, which stays positive at a
/// symmetric minimum where the centered difference vanishes.
#pragma once

#include <cstddef>
#include <vector>

#include "dinilab/pde/problem.hpp"

namespace dinilab::pde {

struct SolveOptions {
  double tol = 1e-10;             // sup-norm of successive iterate difference
  std::size_t max_iter = 5000;
  double relaxation = 0.5;
  /// Anderson mixing depth; 0 gives plain damped Picard.
  std::size_t anderson_depth = 5;
  /// Halve the relaxation whenever the update norm grows (plain Picard), or
  /// restart the mixing history (Anderson).
  bool adaptive_relaxation = true;
  double min_relaxation = 1.0 / 1024.0;
  double floor = 1e-8;            // lower cap on sigma
};

struct GridSolution {
  int dimension = 1;
  double h = 0.0;
  /// Node coordinates and values for every node of the closed domain
  /// (interior nodes and Dirichlet nodes).
  std::vector<double> x;
  std::vector<double> y;          // empty in 1D
  std::vector<double> values;
  std::vector<bool> dirichlet;
  double residual_norm = 0.0;     // max |max(sigma, floor) Laplace_h u - f| on interior nodes
  std::size_t iterations = 0;
  double regularization_floor = 0.0;
  std::size_t floor_activations = 0;  // interior nodes where sigma < floor at the end
  double relaxation_used = 0.0;
  std::vector<double> update_history;

  std::size_t size() const { return values.size(); }
  /// Linear interpolation (1D) or nearest node (2D).
  double value_at(double px, double py = 0.0) const;
};

/// max over interior nodes of |max(sigma(|Du + xi|), floor) Laplace_h u - f|
/// for grid values `values` laid out as in a GridSolution of `problem`.
double nonlinear_residual(const ProblemSpec& problem, const std::vector<double>& values, double floor);

/// Throws NonConvergence (carrying the update history) when the iteration
/// does not reach `tol` within `max_iter` sweeps.
GridSolution solve(const ProblemSpec& problem, const SolveOptions& options = {});

}  // namespace dinilab::pde
