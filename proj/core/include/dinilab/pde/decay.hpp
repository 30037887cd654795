/// @file decay.hpp
/// @brief Tangent-plane oscillation at geometric scales and Hoelder
/// seminorms of grid solutions.
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dinilab/pde/minimax.hpp"
#include "dinilab/pde/solver.hpp"

namespace dinilab {
struct RenormalizationTrace;
}

namespace dinilab::pde {

struct DecayScale {
  std::size_t n = 0;
  double radius = 0.0;             // r^n
  double E = 0.0;                  // best affine sup-error on the ball
  double A = 0.0;                  // affine value at the probe
  std::array<double, 2> B{0.0, 0.0};
  std::size_t points = 0;
  double tau = 0.0;                // tau_n (trace), 0 without a trace
  double predicted = 0.0;          // tau_n r^n
};

struct DecayReport {
  std::array<double, 2> probe{0.0, 0.0};
  double ratio = 0.0;
  std::vector<DecayScale> scales;
  /// max_n E_n / (tau_n r^n); NaN without a trace.
  double fitted_C = 0.0;
  /// Slope of ln E_n against ln r^n, minus one: the Hoelder exponent of Du
  /// at the probe.
  double holder_exponent = 0.0;
  /// Same fit on |B_{n+1} - B_n| against r^n; NaN when the increments vanish
  /// (as for solutions symmetric about the probe).
  double slope_increment_exponent = 0.0;
  std::vector<std::string> warnings;
};

/// Fits a Chebyshev affine function on B_{r^n}(probe) for n = 0..depth.
/// Coarse balls that leave the domain are skipped and depth is truncated
/// once a ball holds fewer than 5 nodes, each with a warning.
DecayReport fit_tangent_planes(const GridSolution& solution, std::array<double, 2> probe, double ratio,
                               std::size_t depth, const RenormalizationTrace* trace = nullptr);

/// The ball must lie in B_{1/2}. Returns the max over node pairs in it of |u(x) - u(y)| / |x - y|^exponent,
/// using at most `max_points` evenly subsampled nodes.
double holder_seminorm(const GridSolution& solution, std::array<double, 2> center, double radius,
                       double exponent, std::size_t max_points = 4000);

}  // namespace dinilab::pde
