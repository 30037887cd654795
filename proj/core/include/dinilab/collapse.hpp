/// @file collapse.hpp
/// @brief Finite-budget analysis of families of moduli: the collapsing
/// measure mu(G) = sup{s : inf_{sigma in G} sigma(s) = 0}, non-collapse
/// witnesses and the shoring-up test inf_n sigma_n(gamma_n) > 0.
///
/// Everything here is an estimate indexed by a grid and a member budget: a
/// finite computation can refute non-collapse but never prove it.
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "dinilab/modulus.hpp"

namespace dinilab {

/// A family of moduli on a common interval (0, interval_end]. Members are
/// indexed from 1. A collection is a union of parts, each finite or a
/// generator; a member budget B takes the first B members of every part, so
/// estimates of a union are the max of the estimates of its parts.
class ModulusCollection {
 public:
  using Generator = std::function<ModulusOfContinuity(std::size_t)>;

  static ModulusCollection finite(std::vector<ModulusOfContinuity> members, double interval_end);
  static ModulusCollection generator(Generator member, double interval_end,
                                     std::optional<std::size_t> size = std::nullopt);
  /// {t^j : j = 1..count} on (0, 1]; count empty for the infinite family.
  static ModulusCollection powers(std::optional<std::size_t> count = std::nullopt);

  static ModulusCollection unite(const ModulusCollection& a, const ModulusCollection& b);

  double interval_end() const { return interval_end_; }
  /// Members a budget of `budget` actually visits.
  std::size_t members_within(std::size_t budget) const;
  /// Size of the largest part (the budget that visits every member), or
  /// empty when some part is infinite.
  std::optional<std::size_t> largest_part() const;
  /// min over the first `budget` members of every part of sigma(s).
  double infimum_at(double s, std::size_t budget) const;

 private:
  struct Part {
    Generator member;
    std::optional<std::size_t> size;
  };
  std::vector<Part> parts_;
  double interval_end_ = 1.0;
};

struct CollapseReport {
  double mu_estimate = 0.0;
  std::vector<double> grid;
  std::vector<double> inf_values;
  std::size_t members_evaluated = 0;
  std::size_t budget = 0;
  double zero_threshold = 0.0;
};

/// For each grid point s, inf over the first `member_budget` members of
/// sigma(s); mu_estimate is the largest s whose inf is below `zero_threshold`
/// (0 if none).
CollapseReport collapsing_measure_estimate(const ModulusCollection& family,
                                           const std::vector<double>& grid,
                                           std::size_t member_budget, double zero_threshold = 1e-9);

/// Uniform grid s_i = i * end / points, i = 1..points.
std::vector<double> uniform_grid(double end, std::size_t points);

struct ShoringWitness {
  bool shored_up = false;
  std::size_t argmin = 0;        // index n (1-based) minimizing sigma_n(gamma_n)
  double min_value = 0.0;
  bool gammas_decreasing = false;
  std::vector<double> values;    // sigma_n(gamma_n), n = 1..prefix
};

/// True iff min_{n<=prefix} sigma_n(gamma_n) >= floor and gamma is
/// non-increasing on the prefix with gamma_prefix < gamma_1.
ShoringWitness is_shored_up(const std::function<double(std::size_t, double)>& sigma,
                            const std::function<double(std::size_t)>& gamma, std::size_t prefix,
                            double floor);

/// inf over the first `member_budget` members of sigma(a).
double noncollapse_witness(const ModulusCollection& family, double a, std::size_t member_budget);

}  // namespace dinilab
