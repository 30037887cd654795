#include "dinilab/pde/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dinilab/errors.hpp"

namespace dinilab::pde {

namespace {

// Dense two-phase tableau simplex for max c.x subject to A x = b, x >= 0,
// b >= 0. One artificial column per row is kept through phase 2 so the
// optimal dual prices can be read off its reduced cost.
class Simplex {
 public:
  Simplex(std::size_t rows, std::size_t structural)
      : m_(rows), n_(structural), width_(structural + rows + 1),
        t_((rows + 1) * width_, 0.0), basis_(rows), cost_(structural + rows, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return t_[i * width_ + j]; }
  double& rhs(std::size_t i) { return at(i, width_ - 1); }
  double& cost(std::size_t j) { return cost_[j]; }

  // Returns the optimal dual prices y (one per row).
  std::vector<double> solve(std::size_t& pivots) {
    for (std::size_t i = 0; i < m_; ++i) {
      at(i, n_ + i) = 1.0;
      basis_[i] = n_ + i;
    }
    // Phase 1: maximize -sum(artificials).
    std::vector<double> phase1(n_ + m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) phase1[n_ + i] = -1.0;
    load_objective(phase1);
    run(n_, pivots);
    if (at(m_, width_ - 1) < -kTol) throw NumericFailure("minimax fit: linear program is infeasible");
    // Pivot zero-level artificials out where a structural column allows it.
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (std::abs(at(i, j)) > kTol) {
          pivot(i, j);
          ++pivots;
          break;
        }
      }
    }
    load_objective(cost_);
    run(n_, pivots);
    std::vector<double> y(m_);
    for (std::size_t i = 0; i < m_; ++i) y[i] = -at(m_, n_ + i);
    return y;
  }

 private:
  static constexpr double kTol = 1e-11;

  // Reduced costs r_j = c_j - c_B B^-1 A_j; the objective row stores them,
  // and its rhs entry stores -c_B B^-1 b.
  void load_objective(const std::vector<double>& c) {
    for (std::size_t j = 0; j < width_; ++j) at(m_, j) = j + 1 < width_ ? c[j] : 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) at(m_, j) -= cb * at(i, j);
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    for (std::size_t j = 0; j < width_; ++j) at(row, j) /= p;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double factor = at(i, col);
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) at(i, j) -= factor * at(row, j);
    }
    basis_[row] = col;
  }

  // Columns >= `enter_limit` never enter. Dantzig pricing, switching to
  // Bland's rule after a run of degenerate pivots to rule out cycling.
  void run(std::size_t enter_limit, std::size_t& pivots) {
    const std::size_t budget = 50 * (n_ + m_) + 1000;
    std::size_t degenerate_run = 0;
    for (std::size_t iter = 0; iter < budget; ++iter) {
      const bool bland = degenerate_run > 50;
      std::size_t enter = enter_limit;
      double best = kTol;
      for (std::size_t j = 0; j < enter_limit; ++j) {
        const double r = at(m_, j);
        if (r > best) {
          enter = j;
          if (bland) break;
          best = r;
        }
      }
      if (enter == enter_limit) return;
      std::size_t leave = m_;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= kTol) continue;
        const double q = rhs(i) / a;
        if (q < ratio - kTol || (q <= ratio + kTol && leave < m_ && basis_[i] < basis_[leave])) {
          ratio = std::min(ratio, q);
          leave = i;
        }
      }
      if (leave == m_) throw NumericFailure("minimax fit: linear program is unbounded");
      degenerate_run = ratio <= kTol ? degenerate_run + 1 : 0;
      pivot(leave, enter);
      ++pivots;
    }
    throw NumericFailure("minimax fit: simplex iteration budget exhausted");
  }

  std::size_t m_, n_, width_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  std::vector<double> cost_;
};

}  // namespace

AffineFit chebyshev_affine_fit(int dimension, const std::vector<double>& x, const std::vector<double>& y,
                               const std::vector<double>& u, std::array<double, 2> center) {
  if (dimension != 1 && dimension != 2) throw ValidationError("minimax fit: dimension must be 1 or 2");
  const std::size_t P = u.size();
  if (P == 0 || x.size() != P || (dimension == 2 && y.size() != P))
    throw ValidationError("minimax fit: coordinate and value arrays must be non-empty and equal in length");

  // Work with centred, unit-scaled coordinates and values.
  double reach = 0.0;
  for (std::size_t i = 0; i < P; ++i) {
    const double dx = x[i] - center[0];
    const double dy = dimension == 2 ? y[i] - center[1] : 0.0;
    reach = std::max(reach, std::hypot(dx, dy));
  }
  const double base = u[P / 2];
  double spread = 0.0;
  for (double v : u) {
    if (!std::isfinite(v)) throw ValidationError("minimax fit: values must be finite");
    spread = std::max(spread, std::abs(v - base));
  }

  AffineFit fit;
  fit.points = P;
  fit.value = base;
  if (spread == 0.0) return fit;
  if (reach == 0.0) reach = 1.0;

  const std::size_t rows = static_cast<std::size_t>(dimension) + 2;
  Simplex lp(rows, 2 * P);
  for (std::size_t i = 0; i < P; ++i) {
    const double px = (x[i] - center[0]) / reach;
    const double py = dimension == 2 ? (y[i] - center[1]) / reach : 0.0;
    const double v = (u[i] - base) / spread;
    const double column[3] = {1.0, px, py};
    for (std::size_t k = 0; k + 1 < rows; ++k) {
      lp.at(k, 2 * i) = column[k];
      lp.at(k, 2 * i + 1) = -column[k];
    }
    lp.at(rows - 1, 2 * i) = 1.0;
    lp.at(rows - 1, 2 * i + 1) = 1.0;
    lp.cost(2 * i) = v;
    lp.cost(2 * i + 1) = -v;
  }
  lp.rhs(rows - 1) = 1.0;
  const std::vector<double> prices = lp.solve(fit.pivots);

  fit.value = base + spread * prices[0];
  fit.slope[0] = spread * prices[1] / reach;
  if (dimension == 2) fit.slope[1] = spread * prices[2] / reach;
  for (std::size_t i = 0; i < P; ++i) {
    const double dx = x[i] - center[0];
    const double dy = dimension == 2 ? y[i] - center[1] : 0.0;
    fit.error = std::max(fit.error, std::abs(u[i] - fit.value - fit.slope[0] * dx - fit.slope[1] * dy));
  }
  return fit;
}

}  // namespace dinilab::pde
