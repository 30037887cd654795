#include "dinilab/pde/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dinilab/errors.hpp"
#include "dinilab/renorm.hpp"
#include "internal/format.hpp"

namespace dinilab::pde {

using detail::number;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double distance(const GridSolution& s, std::size_t i, const std::array<double, 2>& p) {
  const double dy = s.dimension == 2 ? s.y[i] - p[1] : 0.0;
  return std::hypot(s.x[i] - p[0], dy);
}

std::vector<std::size_t> nodes_in_ball(const GridSolution& s, const std::array<double, 2>& p, double radius) {
  std::vector<std::size_t> out;
  const double reach = radius * (1.0 + 1e-9);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (distance(s, i, p) <= reach) out.push_back(i);
  return out;
}

// Least-squares slope of ys against xs; NaN with fewer than two points.
double fitted_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n < 2) return kNaN;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : kNaN;
}

}  // namespace

DecayReport fit_tangent_planes(const GridSolution& solution, std::array<double, 2> probe, double ratio,
                               std::size_t depth, const RenormalizationTrace* trace) {
  if (solution.values.empty()) throw ValidationError("decay: grid solution is empty");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("decay: ratio must lie in (0, 1), got " + number(ratio));
  const double probe_norm = std::hypot(probe[0], solution.dimension == 2 ? probe[1] : 0.0);
  if (probe_norm >= 1.0) throw ValidationError("decay: probe must lie inside the unit ball");

  DecayReport report;
  report.probe = probe;
  report.ratio = ratio;
  double scale_u = 0.0;
  for (double v : solution.values) scale_u = std::max(scale_u, std::abs(v));
  const double value_noise = solution.update_history.empty() ? 0.0 : solution.update_history.back();

  for (std::size_t n = 0; n <= depth; ++n) {
    const double radius = std::pow(ratio, static_cast<double>(n));
    if (probe_norm + radius > 1.0 + 1e-12) {
      report.warnings.push_back("ball of radius " + number(radius) + " leaves the domain; scale n=" +
                                std::to_string(n) + " skipped");
      continue;
    }
    const std::vector<std::size_t> ball = nodes_in_ball(solution, probe, radius);
    if (ball.size() < 5) {
      report.warnings.push_back("ball of radius " + number(radius) + " holds " + std::to_string(ball.size()) +
                                " nodes; depth truncated at n=" + std::to_string(n));
      break;
    }
    std::vector<double> xs, ys, us;
    xs.reserve(ball.size());
    us.reserve(ball.size());
    for (std::size_t i : ball) {
      xs.push_back(solution.x[i]);
      if (solution.dimension == 2) ys.push_back(solution.y[i]);
      us.push_back(solution.values[i]);
    }
    const AffineFit fit = chebyshev_affine_fit(solution.dimension, xs, ys, us, probe);
    DecayScale s;
    s.n = n;
    s.radius = radius;
    s.E = fit.error;
    s.A = fit.value;
    s.B = fit.slope;
    s.points = ball.size();
    if (trace != nullptr && n <= trace->depth()) {
      s.tau = trace->tau(n);
      s.predicted = s.tau * radius;
    }
    report.scales.push_back(s);
  }

  report.fitted_C = trace == nullptr ? kNaN : 0.0;
  std::vector<double> log_r, log_e, log_r_inc, log_d;
  for (std::size_t k = 0; k < report.scales.size(); ++k) {
    const DecayScale& s = report.scales[k];
    if (trace != nullptr && s.predicted > 0.0) report.fitted_C = std::max(report.fitted_C, s.E / s.predicted);
    if (s.n >= 1 && s.E > 0.0) {
      log_r.push_back(std::log(s.radius));
      log_e.push_back(std::log(s.E));
    }
    if (k + 1 < report.scales.size()) {
      const DecayScale& t = report.scales[k + 1];
      const double d = std::hypot(t.B[0] - s.B[0], t.B[1] - s.B[1]);
      // Slopes carry value errors (roundoff, the last solver update) divided
      // by the radius; smaller increments are noise.
      const double noise = (1e3 * std::numeric_limits<double>::epsilon() * scale_u + 10.0 * value_noise) / t.radius;
      if (d > noise) {
        log_r_inc.push_back(std::log(s.radius));
        log_d.push_back(std::log(d));
      }
    }
  }
  report.holder_exponent = fitted_slope(log_r, log_e) - 1.0;
  report.slope_increment_exponent = fitted_slope(log_r_inc, log_d);
  return report;
}

double holder_seminorm(const GridSolution& solution, std::array<double, 2> center, double radius, double exponent,
                       std::size_t max_points) {
  if (!(radius > 0.0)) throw ValidationError("holder seminorm: radius must be positive");
  if (!(exponent > 0.0 && exponent <= 1.0))
    throw ValidationError("holder seminorm: exponent must lie in (0, 1], got " + number(exponent));
  if (std::hypot(center[0], solution.dimension == 2 ? center[1] : 0.0) + radius > 0.5 + 1e-12)
    throw ValidationError("holder seminorm: region must lie in the ball of radius 1/2");
  if (max_points < 2) throw ValidationError("holder seminorm: max_points must be at least 2");
  std::vector<std::size_t> ball = nodes_in_ball(solution, center, radius);
  if (ball.size() < 2) throw ValidationError("holder seminorm: fewer than two nodes in the ball");
  if (ball.size() > max_points) {
    std::vector<std::size_t> thinned;
    const double stride = static_cast<double>(ball.size() - 1) / static_cast<double>(max_points - 1);
    for (std::size_t k = 0; k < max_points; ++k)
      thinned.push_back(ball[static_cast<std::size_t>(std::round(static_cast<double>(k) * stride))]);
    ball = std::move(thinned);
  }
  double best = 0.0;
  for (std::size_t a = 0; a < ball.size(); ++a) {
    const std::size_t i = ball[a];
    const std::array<double, 2> pi{solution.x[i], solution.dimension == 2 ? solution.y[i] : 0.0};
    for (std::size_t b = a + 1; b < ball.size(); ++b) {
      const std::size_t j = ball[b];
      const double d = distance(solution, j, pi);
      if (d <= 0.0) continue;
      best = std::max(best, std::abs(solution.values[i] - solution.values[j]) / std::pow(d, exponent));
    }
  }
  return best;
}

}  // namespace dinilab::pde
