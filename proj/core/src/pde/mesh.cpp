#include <cmath>
#include <limits>

#include "dinilab/errors.hpp"
#include "internal/format.hpp"
#include "internal/mesh.hpp"

namespace dinilab::detail {

Mesh build_mesh(int dimension, double h) {
  if (dimension != 1 && dimension != 2) throw ValidationError("mesh: dimension must be 1 or 2");
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("mesh: h must be positive, got " + number(h));
  const double count = std::round(2.0 / h);
  if (count < 4.0) throw ValidationError("mesh: h=" + number(h) + " leaves fewer than 4 intervals");
  if (dimension == 2 && count > 8192.0) throw ValidationError("mesh: 2D grids are limited to h >= 2/8192");

  Mesh mesh;
  mesh.dimension = dimension;
  mesh.intervals = static_cast<std::size_t>(count);
  mesh.h = 2.0 / count;
  const std::size_t n = mesh.intervals;

  if (dimension == 1) {
    mesh.x.resize(n + 1);
    mesh.dirichlet.assign(n + 1, false);
    mesh.unknown.assign(n + 1, Mesh::npos);
    mesh.neighbour.assign(n + 1, {Mesh::npos, Mesh::npos, Mesh::npos, Mesh::npos});
    for (std::size_t i = 0; i <= n; ++i) {
      mesh.x[i] = -1.0 + static_cast<double>(i) * mesh.h;
      if (i > 0) mesh.neighbour[i][0] = i - 1;
      if (i < n) mesh.neighbour[i][1] = i + 1;
    }
    mesh.x[n] = 1.0;
    mesh.dirichlet[0] = mesh.dirichlet[n] = true;
    for (std::size_t i = 1; i < n; ++i) {
      mesh.unknown[i] = mesh.node_of_unknown.size();
      mesh.node_of_unknown.push_back(i);
    }
    return mesh;
  }

  // 2D: classify grid points, then keep interior points and their neighbours.
  const double inside = 1.0 - 1e-12;
  auto coord = [&](std::size_t i) { return -1.0 + static_cast<double>(i) * mesh.h; };
  auto is_inside = [&](std::size_t i, std::size_t j) {
    const double a = coord(i), b = coord(j);
    return a * a + b * b < inside;
  };
  std::vector<std::size_t> node_at((n + 1) * (n + 1), Mesh::npos);
  auto key = [n](std::size_t i, std::size_t j) { return j * (n + 1) + i; };
  for (std::size_t j = 0; j <= n; ++j) {
    for (std::size_t i = 0; i <= n; ++i) {
      bool keep = is_inside(i, j);
      bool boundary = false;
      if (!keep) {
        boundary = (i > 0 && is_inside(i - 1, j)) || (i < n && is_inside(i + 1, j)) ||
                   (j > 0 && is_inside(i, j - 1)) || (j < n && is_inside(i, j + 1));
        keep = boundary;
      }
      if (!keep) continue;
      node_at[key(i, j)] = mesh.x.size();
      mesh.x.push_back(coord(i));
      mesh.y.push_back(coord(j));
      mesh.dirichlet.push_back(boundary);
    }
  }
  mesh.unknown.assign(mesh.x.size(), Mesh::npos);
  mesh.neighbour.assign(mesh.x.size(), {Mesh::npos, Mesh::npos, Mesh::npos, Mesh::npos});
  for (std::size_t j = 0; j <= n; ++j) {
    for (std::size_t i = 0; i <= n; ++i) {
      const std::size_t node = node_at[key(i, j)];
      if (node == Mesh::npos) continue;
      auto& nb = mesh.neighbour[node];
      if (i > 0) nb[0] = node_at[key(i - 1, j)];
      if (i < n) nb[1] = node_at[key(i + 1, j)];
      if (j > 0) nb[2] = node_at[key(i, j - 1)];
      if (j < n) nb[3] = node_at[key(i, j + 1)];
      if (!mesh.dirichlet[node]) {
        mesh.unknown[node] = mesh.node_of_unknown.size();
        mesh.node_of_unknown.push_back(node);
      }
    }
  }
  return mesh;
}

}  // namespace dinilab::detail
