#include "dinilab/pde/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "dinilab/errors.hpp"
#include "internal/format.hpp"
#include "internal/mesh.hpp"

namespace dinilab::pde {

using detail::Mesh;
using detail::number;

namespace {

// Dirichlet solver for Laplace_h w = g. The matrix depends only on the mesh,
// so it is factored once per solve() call.
class PoissonSolver {
 public:
  explicit PoissonSolver(const Mesh& mesh) : mesh_(mesh) {
    const std::size_t m = mesh.unknowns();
    if (mesh.dimension == 1) {
      // Thomas sweep for w_{k-1} - 2 w_k + w_{k+1} = d_k.
      upper_.resize(m);
      pivot_.resize(m);
      double prev = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const double denom = -2.0 - (k == 0 ? 0.0 : prev);
        pivot_[k] = 1.0 / denom;
        upper_[k] = pivot_[k];
        prev = upper_[k];
      }
      return;
    }
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(5 * m);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t node = mesh.node_of_unknown[k];
      entries.emplace_back(k, k, 4.0);
      for (std::size_t nb : mesh.neighbour[node]) {
        const std::size_t col = mesh.unknown[nb];
        if (col != Mesh::npos) entries.emplace_back(k, col, -1.0);
      }
    }
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    A.setFromTriplets(entries.begin(), entries.end());
    ldlt_.compute(A);
    if (ldlt_.info() != Eigen::Success) throw NumericFailure("solver: Poisson matrix factorization failed");
  }

  // `w` holds Dirichlet values on entry; interior entries are overwritten.
  void solve(const std::vector<double>& g, std::vector<double>& w) const {
    const std::size_t m = mesh_.unknowns();
    const double h2 = mesh_.h * mesh_.h;
    if (mesh_.dimension == 1) {
      const std::size_t last = mesh_.size() - 1;
      std::vector<double> d(m);
      for (std::size_t k = 0; k < m; ++k) d[k] = h2 * g[k + 1];
      d[0] -= w[0];
      d[m - 1] -= w[last];
      // Forward elimination, then back substitution (sub/super diagonals are 1).
      d[0] *= pivot_[0];
      for (std::size_t k = 1; k < m; ++k) d[k] = (d[k] - d[k - 1]) * pivot_[k];
      for (std::size_t k = m - 1; k-- > 0;) d[k] -= upper_[k] * d[k + 1];
      for (std::size_t k = 0; k < m; ++k) w[k + 1] = d[k];
      return;
    }
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t node = mesh_.node_of_unknown[k];
      double v = -h2 * g[node];
      for (std::size_t nb : mesh_.neighbour[node])
        if (mesh_.dirichlet[nb]) v += w[nb];
      rhs[static_cast<Eigen::Index>(k)] = v;
    }
    const Eigen::VectorXd sol = ldlt_.solve(rhs);
    for (std::size_t k = 0; k < m; ++k) w[mesh_.node_of_unknown[k]] = sol[static_cast<Eigen::Index>(k)];
  }

 private:
  const Mesh& mesh_;
  std::vector<double> upper_;
  std::vector<double> pivot_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

// Larger of the one-sided difference magnitudes of Du + xi, per axis.
double gradient_magnitude(const Mesh& mesh, const std::vector<double>& u, std::size_t node,
                          const std::array<double, 2>& xi) {
  const auto& nb = mesh.neighbour[node];
  const double inv_h = 1.0 / mesh.h;
  double sq = 0.0;
  for (int axis = 0; axis < mesh.dimension; ++axis) {
    const double back = (u[node] - u[nb[2 * axis]]) * inv_h + xi[axis];
    const double fwd = (u[nb[2 * axis + 1]] - u[node]) * inv_h + xi[axis];
    sq += std::max(back * back, fwd * fwd);
  }
  return std::sqrt(sq);
}

double laplacian(const Mesh& mesh, const std::vector<double>& u, std::size_t node) {
  double sum = -2.0 * mesh.dimension * u[node];
  for (int k = 0; k < 2 * mesh.dimension; ++k) sum += u[mesh.neighbour[node][k]];
  return sum / (mesh.h * mesh.h);
}

struct Coefficient {
  const DegeneracyLaw& law;
  double floor;
  // Returns max(sigma(G), floor); sets `floored` when the floor was used.
  double operator()(double G, bool& floored) const {
    floored = false;
    if (!(G > 0.0)) {
      floored = true;
      return floor;
    }
    const double s = law.sigma.evaluate(std::min(G, law.sigma.domain_end()));
    if (s < floor) {
      floored = true;
      return floor;
    }
    return s;
  }
};

double residual(const Mesh& mesh, const ProblemSpec& problem, const Coefficient& coefficient,
                const std::vector<double>& u, const std::vector<double>& f, std::size_t* floor_count) {
  double worst = 0.0;
  for (std::size_t node : mesh.node_of_unknown) {
    bool floored = false;
    const double s = coefficient(gradient_magnitude(mesh, u, node, problem.xi), floored);
    if (floored && floor_count != nullptr) ++*floor_count;
    worst = std::max(worst, std::abs(s * laplacian(mesh, u, node) - f[node]));
  }
  return worst;
}

}  // namespace

double GridSolution::value_at(double px, double py) const {
  if (values.empty()) throw ValidationError("grid solution is empty");
  if (dimension == 1) {
    if (px <= x.front()) return values.front();
    if (px >= x.back()) return values.back();
    const auto it = std::upper_bound(x.begin(), x.end(), px);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double w = (px - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - w) * values[i - 1] + w * values[i];
  }
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = (x[i] - px) * (x[i] - px) + (y[i] - py) * (y[i] - py);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return values[best];
}

GridSolution solve(const ProblemSpec& problem, const SolveOptions& options) {
  problem.validate();
  if (!(options.tol > 0.0)) throw ValidationError("solve: tol must be positive");
  if (!(options.relaxation > 0.0 && options.relaxation <= 1.0))
    throw ValidationError("solve: relaxation must lie in (0, 1]");
  if (!(options.floor > 0.0)) throw ValidationError("solve: floor must be positive");
  if (options.max_iter == 0) throw ValidationError("solve: max_iter must be positive");

  const Mesh mesh = detail::build_mesh(problem.dimension, problem.h);
  const PoissonSolver poisson(mesh);
  const Coefficient coefficient{problem.sigma, options.floor};
  const std::size_t n = mesh.size();
  const bool planar = problem.dimension == 2;

  std::vector<double> f(n, 0.0), u(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double yi = planar ? mesh.y[i] : 0.0;
    if (mesh.dirichlet[i]) {
      // Project onto the sphere; in 1D the endpoints already lie on it.
      double px = mesh.x[i], py = yi;
      if (planar) {
        const double norm = std::hypot(px, py);
        px /= norm;
        py /= norm;
      }
      u[i] = problem.boundary(px, py);
      if (!std::isfinite(u[i])) throw NumericFailure("solve: boundary data is not finite");
    } else {
      f[i] = problem.source(mesh.x[i], yi);
      if (!std::isfinite(f[i])) throw NumericFailure("solve: source is not finite");
    }
  }

  // Start from the uniformly elliptic solution Laplace(u) = f.
  poisson.solve(f, u);

  const std::size_t m = mesh.unknowns();
  std::vector<double> g(n, 0.0), next = u, history;
  double omega = options.relaxation;
  double previous = std::numeric_limits<double>::infinity();
  double best = previous;
  bool converged = false;
  std::size_t iter = 0;
  // Anderson state: differences of successive residuals F = G(u) - u and of
  // successive images G(u), oldest first.
  std::deque<Eigen::VectorXd> dF, dG;
  Eigen::VectorXd u_vec(static_cast<Eigen::Index>(m)), g_vec(u_vec.size()), f_vec(u_vec.size());
  Eigen::VectorXd last_f, last_g;
  while (iter < options.max_iter) {
    ++iter;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t node = mesh.node_of_unknown[k];
      bool floored = false;
      g[node] = f[node] / coefficient(gradient_magnitude(mesh, u, node, problem.xi), floored);
    }
    poisson.solve(g, next);
    double diff = 0.0;
    for (std::size_t node : mesh.node_of_unknown) diff = std::max(diff, std::abs(next[node] - u[node]));
    if (!std::isfinite(diff)) throw NonConvergence("solve: iterate became non-finite", history);
    history.push_back(diff);
    if (diff <= options.tol) {
      u = next;
      converged = true;
      break;
    }

    if (options.anderson_depth == 0) {
      if (options.adaptive_relaxation && diff > previous) omega = std::max(0.5 * omega, options.min_relaxation);
      previous = diff;
      for (std::size_t node : mesh.node_of_unknown) u[node] += omega * (next[node] - u[node]);
      continue;
    }

    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t node = mesh.node_of_unknown[k];
      const auto e = static_cast<Eigen::Index>(k);
      u_vec[e] = u[node];
      g_vec[e] = next[node];
    }
    f_vec = g_vec - u_vec;
    if (options.adaptive_relaxation && diff > 10.0 * best) {
      dF.clear();
      dG.clear();
    } else if (last_f.size() > 0) {
      dF.push_back(f_vec - last_f);
      dG.push_back(g_vec - last_g);
      if (dF.size() > options.anderson_depth) {
        dF.pop_front();
        dG.pop_front();
      }
    }
    best = std::min(best, diff);
    last_f = f_vec;
    last_g = g_vec;

    Eigen::VectorXd update = u_vec + omega * f_vec;
    if (!dF.empty()) {
      const auto cols = static_cast<Eigen::Index>(dF.size());
      Eigen::MatrixXd A(u_vec.size(), cols), B(u_vec.size(), cols);
      for (Eigen::Index c = 0; c < cols; ++c) {
        A.col(c) = dF[static_cast<std::size_t>(c)];
        B.col(c) = dG[static_cast<std::size_t>(c)];
      }
      const Eigen::VectorXd gamma = A.colPivHouseholderQr().solve(f_vec);
      if (gamma.allFinite()) update = g_vec - B * gamma - (1.0 - omega) * (f_vec - A * gamma);
    }
    for (std::size_t k = 0; k < m; ++k) u[mesh.node_of_unknown[k]] = update[static_cast<Eigen::Index>(k)];
  }
  if (!converged)
    throw NonConvergence("solve: Picard iteration did not reach tol=" + number(options.tol) + " in " +
                             std::to_string(options.max_iter) + " sweeps (last update " +
                             number(history.back()) + ")",
                         history);

  GridSolution out;
  out.dimension = problem.dimension;
  out.h = mesh.h;
  out.x = mesh.x;
  if (planar) out.y = mesh.y;
  out.dirichlet = mesh.dirichlet;
  out.iterations = iter;
  out.regularization_floor = options.floor;
  out.relaxation_used = omega;
  out.update_history = std::move(history);
  out.residual_norm = residual(mesh, problem, coefficient, u, f, &out.floor_activations);
  out.values = std::move(u);
  return out;
}

double nonlinear_residual(const ProblemSpec& problem, const std::vector<double>& values, double floor) {
  problem.validate();
  if (!(floor > 0.0)) throw ValidationError("residual: floor must be positive");
  const Mesh mesh = detail::build_mesh(problem.dimension, problem.h);
  if (values.size() != mesh.size()) throw ValidationError("residual: value count does not match the mesh");
  std::vector<double> f(mesh.size(), 0.0);
  for (std::size_t node : mesh.node_of_unknown)
    f[node] = problem.source(mesh.x[node], problem.dimension == 2 ? mesh.y[node] : 0.0);
  return residual(mesh, problem, Coefficient{problem.sigma, floor}, values, f, nullptr);
}

}  // namespace dinilab::pde
