#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace dinilab::detail {

// Uniform grid on [-1, 1]^d restricted to the closed unit ball. Interior
// nodes lie strictly inside; Dirichlet nodes are the grid neighbours of
// interior nodes that do not (in 1D, the two endpoints).
struct Mesh {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  int dimension = 1;
  std::size_t intervals = 0;  // per axis
  double h = 0.0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<bool> dirichlet;
  std::vector<std::size_t> unknown;                // node -> unknown index or npos
  std::vector<std::size_t> node_of_unknown;
  std::vector<std::array<std::size_t, 4>> neighbour;  // -x, +x, -y, +y

  std::size_t size() const { return x.size(); }
  std::size_t unknowns() const { return node_of_unknown.size(); }
};

// Throws ValidationError unless 2/h rounds to at least 4 intervals.
Mesh build_mesh(int dimension, double h);

}  // namespace dinilab::detail
