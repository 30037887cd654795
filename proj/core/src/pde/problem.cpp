#include "dinilab/pde/problem.hpp"

#include <algorithm>
#include <cmath>

#include "dinilab/errors.hpp"
#include "internal/format.hpp"
#include "internal/mesh.hpp"

namespace dinilab::pde {

using detail::number;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::size_t kCircleSamples = 4096;

}  // namespace

void ProblemSpec::validate() const {
  if (dimension != 1 && dimension != 2) throw ValidationError("problem: dimension must be 1 or 2");
  if (!(h > 0.0) || h > 0.5) throw ValidationError("problem: h must lie in (0, 0.5], got " + number(h));
  if (!source || !boundary) throw ValidationError("problem: source and boundary must be set");
  if (!std::isfinite(xi[0]) || !std::isfinite(xi[1])) throw ValidationError("problem: xi must be finite");
  if (dimension == 1 && xi[1] != 0.0) throw ValidationError("problem: 1D problems take a scalar xi");
  if (source_bound && !(*source_bound >= 0.0)) throw ValidationError("problem: source_bound must be >= 0");
}

double ProblemSpec::source_sup() const {
  if (source_bound) return *source_bound;
  const detail::Mesh mesh = detail::build_mesh(dimension, h);
  double sup = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double v = source(mesh.x[i], dimension == 2 ? mesh.y[i] : 0.0);
    if (!std::isfinite(v)) throw NumericFailure("problem: source is not finite at a mesh node");
    sup = std::max(sup, std::abs(v));
  }
  return sup;
}

double ProblemSpec::boundary_sup() const {
  if (dimension == 1) return std::max(std::abs(boundary(-1.0, 0.0)), std::abs(boundary(1.0, 0.0)));
  double sup = 0.0;
  for (std::size_t k = 0; k < kCircleSamples; ++k) {
    const double a = 2.0 * kPi * static_cast<double>(k) / kCircleSamples;
    sup = std::max(sup, std::abs(boundary(std::cos(a), std::sin(a))));
  }
  return sup;
}

NormalizedProblem normalize_problem(const ProblemSpec& problem, double eps, std::optional<double> u_bound) {
  problem.validate();
  if (!(eps > 0.0) || !(eps < 1.0)) throw ValidationError("normalize: eps must lie in (0, 1), got " + number(eps));
  if (u_bound && !(*u_bound >= 0.0)) throw ValidationError("normalize: u_bound must be >= 0");

  ScalingRecord s;
  s.f_bound = problem.source_sup();
  s.u_bound_estimated = !u_bound.has_value();
  // Without a supplied bound: boundary sup plus the source sup, a
  // maximum-principle style estimate rather than a proof.
  s.u_bound = u_bound ? *u_bound : problem.boundary_sup() + s.f_bound;
  const double total = s.u_bound + s.f_bound;
  if (!(total > 0.0)) throw ValidationError("normalize: ||u|| + ||f|| vanishes; nothing to normalize");
  s.K = 1.0 / total;
  s.r = eps;
  if (s.r >= s.K) {
    s.r = 0.5 * s.K;
    s.r_shrunk = true;
  }
  if (s.f_bound > 0.0 && s.r * s.r * s.f_bound / s.K >= eps) {
    s.r = std::sqrt(0.5 * eps * s.K / s.f_bound);
    s.r_shrunk = true;
  }

  const double r = s.r, K = s.K;
  NormalizedProblem out{problem, s};
  ProblemSpec& p = out.problem;
  p.sigma = DegeneracyLaw::make(problem.sigma.sigma.with_argument_scale(K / r), problem.sigma.normalized);
  p.source = [f = problem.source, r, K](double x, double y) { return r * r / K * f(r * x, r * y); };
  p.boundary = [g = problem.boundary, r, K](double x, double y) { return g(r * x, r * y) / K; };
  p.xi = {r / K * problem.xi[0], r / K * problem.xi[1]};
  p.source_bound = r * r / K * s.f_bound;
  return out;
}

}  // namespace dinilab::pde
