/// @file minimax.hpp
/// @brief Chebyshev (sup-norm) affine fit
///   min_{a, b} max_i |u_i - a - b . (p_i - c)|
/// solved exactly as a linear program over the dual variables.
#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace dinilab::pde {

struct AffineFit {
  double value = 0.0;                    // a: fitted value at the center
  std::array<double, 2> slope{0.0, 0.0}; // b
  double error = 0.0;                    // max residual
  std::size_t points = 0;
  std::size_t pivots = 0;
};

/// `dimension` is 1 or 2; `y` is ignored in 1D. Coordinates are taken
/// relative to `center`.
AffineFit chebyshev_affine_fit(int dimension, const std::vector<double>& x, const std::vector<double>& y,
                               const std::vector<double>& u, std::array<double, 2> center = {0.0, 0.0});

}  // namespace dinilab::pde
