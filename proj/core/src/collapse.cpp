#include "dinilab/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dinilab {

ModulusCollection ModulusCollection::finite(std::vector<ModulusOfContinuity> members,
                                            double interval_end) {
  if (members.empty()) throw ValidationError("modulus family is empty");
  const std::size_t size = members.size();
  auto shared = std::make_shared<const std::vector<ModulusOfContinuity>>(std::move(members));
  return generator([shared](std::size_t n) { return (*shared)[n - 1]; }, interval_end, size);
}

ModulusCollection ModulusCollection::generator(Generator member, double interval_end,
                                               std::optional<std::size_t> size) {
  if (!member) throw ValidationError("modulus family needs a member generator");
  if (size && *size == 0) throw ValidationError("modulus family is empty");
  if (!(interval_end > 0.0)) throw ValidationError("modulus family interval must be (0, T] with T > 0");
  ModulusCollection out;
  out.parts_.push_back({std::move(member), size});
  out.interval_end_ = interval_end;
  return out;
}

ModulusCollection ModulusCollection::powers(std::optional<std::size_t> count) {
  return generator([](std::size_t j) { return ModulusOfContinuity::power(static_cast<double>(j), 1.0, 1.0); },
                   1.0, count);
}

ModulusCollection ModulusCollection::unite(const ModulusCollection& a, const ModulusCollection& b) {
  if (a.interval_end_ != b.interval_end_) throw ValidationError("union of families on different intervals");
  ModulusCollection out = a;
  out.parts_.insert(out.parts_.end(), b.parts_.begin(), b.parts_.end());
  return out;
}

std::size_t ModulusCollection::members_within(std::size_t budget) const {
  std::size_t total = 0;
  for (const auto& part : parts_) total += part.size ? std::min(*part.size, budget) : budget;
  return total;
}

std::optional<std::size_t> ModulusCollection::largest_part() const {
  std::size_t largest = 0;
  for (const auto& part : parts_) {
    if (!part.size) return std::nullopt;
    largest = std::max(largest, *part.size);
  }
  return largest;
}

double ModulusCollection::infimum_at(double s, std::size_t budget) const {
  if (!(s > 0.0) || s > interval_end_) throw DomainError("family evaluation point outside the interval");
  double inf = std::numeric_limits<double>::infinity();
  for (const auto& part : parts_) {
    const std::size_t count = part.size ? std::min(*part.size, budget) : budget;
    for (std::size_t n = 1; n <= count; ++n) inf = std::min(inf, part.member(n).evaluate(s));
  }
  return inf;
}

std::vector<double> uniform_grid(double end, std::size_t points) {
  if (points == 0 || !(end > 0.0)) throw ValidationError("grid needs a positive end and at least one point");
  std::vector<double> grid(points);
  for (std::size_t i = 1; i <= points; ++i) grid[i - 1] = end * static_cast<double>(i) / static_cast<double>(points);
  return grid;
}

CollapseReport collapsing_measure_estimate(const ModulusCollection& family,
                                           const std::vector<double>& grid,
                                           std::size_t member_budget, double zero_threshold) {
  if (grid.empty()) throw ValidationError("collapse estimate needs a non-empty grid");
  if (!(zero_threshold > 0.0)) throw ValidationError("zero threshold must be positive");
  if (member_budget == 0) throw ValidationError("member budget must be >= 1");
  CollapseReport report;
  report.grid = grid;
  report.budget = member_budget;
  report.zero_threshold = zero_threshold;
  report.members_evaluated = family.members_within(member_budget);
  report.inf_values.reserve(grid.size());
  for (const double s : grid) {
    const double inf = family.infimum_at(s, member_budget);
    report.inf_values.push_back(inf);
    if (inf < zero_threshold) report.mu_estimate = std::max(report.mu_estimate, s);
  }
  return report;
}

ShoringWitness is_shored_up(const std::function<double(std::size_t, double)>& sigma,
                            const std::function<double(std::size_t)>& gamma, std::size_t prefix,
                            double floor) {
  if (prefix == 0) throw ValidationError("shoring check needs prefix >= 1");
  ShoringWitness w;
  w.values.reserve(prefix);
  w.gammas_decreasing = true;
  w.min_value = std::numeric_limits<double>::infinity();
  double previous_gamma = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n <= prefix; ++n) {
    const double g = gamma(n);
    if (!(g > 0.0)) throw ValidationError("shoring points must be positive");
    if (g > previous_gamma) w.gammas_decreasing = false;
    previous_gamma = g;
    const double v = sigma(n, g);
    if (!std::isfinite(v)) throw NumericFailure("shoring check: non-finite sigma_n(gamma_n) at n=" + std::to_string(n));
    w.values.push_back(v);
    if (v < w.min_value) {
      w.min_value = v;
      w.argmin = n;
    }
  }
  // Block-constant points (such as modulator output) are allowed; the trend
  // must still fall across the prefix. A single point carries no trend.
  if (prefix >= 2 && !(gamma(prefix) < gamma(1))) w.gammas_decreasing = false;
  w.shored_up = w.min_value >= floor && w.gammas_decreasing;
  return w;
}

double noncollapse_witness(const ModulusCollection& family, double a, std::size_t member_budget) {
  if (!(a > 0.0)) throw ValidationError("witness point must be positive");
  if (member_budget == 0) throw ValidationError("member budget must be >= 1");
  return family.infimum_at(a, member_budget);
}

}  // namespace dinilab
