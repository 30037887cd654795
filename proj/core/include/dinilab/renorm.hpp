/// @file renorm.hpp
/// @brief Scale selection and the shoring-up recursion for the renormalized
/// degeneracy laws
///   sigma_n(t) = (tau_n / r^n) sigma(tau_n t),   tau_n = mu_1 ... mu_n,
/// together with the C^1 modulus t -> C sum_{i >= floor(ln 1/t)} tau_i that
/// the products induce.
///
/// First scale: with gamma(t) = t sigma(t) and omega = gamma^{-1},
///   - fast case (t^beta = o(omega)):   2 L r^beta = omega(r) =: mu_1,
///   - tame case (omega = O(t^beta)):   2 L r^beta = r^alpha  =: mu_1,
/// and theta = r / mu_1. The sequence a_k = sigma^{-1}(theta^k) is fed to the
/// block modulator with eps (1 + delta) = 1, and each mu_{k+1} >= mu_k is the
/// smallest choice keeping sigma_{k+1}(c_{k+1}) >= 1.
#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "dinilab/dini.hpp"
#include "dinilab/modulus.hpp"
#include "dinilab/sequences.hpp"

namespace dinilab {

enum class ScaleCase { fast_degeneracy, tame_degeneracy };
enum class Branch { initial, kept, raised, clamped };

std::string_view to_string(ScaleCase c);
std::string_view to_string(Branch b);

struct RenormParams {
  DegeneracyLaw sigma;
  double L = 2.0;
  double beta = 0.5;
  /// Exponent for the tame case; must satisfy 0 < alpha < beta. Defaults to
  /// beta / 2 when left unset.
  std::optional<double> alpha{};
  double delta = 1.0 / 20.0;
  std::size_t depth = 30;
  double root_tol = 1e-15;
  std::optional<ScaleCase> case_override{};
  ModulatorOptions modulator{};
  DiniOptions dini{};

  /// Throws ValidationError naming the violated constraint.
  void validate() const;
  double alpha_or_default() const { return alpha.value_or(beta / 2.0); }
};

struct InitialScale {
  ScaleCase scale_case = ScaleCase::fast_degeneracy;
  double r = 0.0;
  double mu1 = 0.0;
  double theta = 0.0;
  /// R_m = t^beta / omega(t) at t = 2^-m, m = 1..60, used to pick the case.
  std::vector<double> ratio_samples;
  bool overridden = false;
};

struct RenormStep {
  std::size_t k = 0;
  double mu = 0.0;
  double log_tau = 0.0;     // ln(mu_1 ... mu_k)
  double tau = 0.0;
  double c = 0.0;           // c_k from the modulator
  double sigma_at_c = 0.0;  // sigma_k(c_k)
  double a_over_c = 0.0;    // sigma^{-1}(theta^k) / c_k
  Branch branch = Branch::initial;
};

struct RenormalizationTrace {
  RenormParams params;
  InitialScale scale;
  SummableSequence a;
  ModulatorResult c;
  double epsilon = 0.0;
  std::vector<RenormStep> steps;  // steps[k-1] is step k
  /// sigma_1(1); equals 1 in the fast case up to inversion tolerance.
  double sigma1_at_one = 0.0;
  double tau_sum = 0.0;            // sum_{k<=N} tau_k
  double weighted_sum = 0.0;       // sum_{k<=N} a_k / c_k
  /// Certified upper bound on sum_k a_k / c_k (all k); +infinity after a
  /// clamp. Steps kept before the first block have c_k = 1/eps > 1, so this
  /// does not by itself bound sum tau_k.
  double tau_l1_bound = 0.0;
  std::size_t raised_count = 0;
  std::size_t clamped_count = 0;
  XiNorm xi;                       // sigma(1) + int sigma^{-1}(s)/s ds

  std::size_t depth() const { return steps.size(); }
  /// tau_k with tau_0 = 1.
  double tau(std::size_t k) const;
  double log_tau(std::size_t k) const;
  double r() const { return scale.r; }
};

/// Decides the case by sampling and solves for r and mu_1.
InitialScale choose_initial_scale(const RenormParams& params);

/// a_k = sigma^{-1}(theta^k), k >= 1. The tail oracle is
/// a_n + P(theta^n) / ln(1/theta) with P the primitive of sigma^{-1}(s)/s
/// when the inverse has one; otherwise a ratio-test estimate.
SummableSequence build_theta_sequence(const DegeneracyLaw& sigma, double theta);

RenormalizationTrace run_shoring_algorithm(const RenormParams& params);

/// sigma_n(t) = (tau_n / r^n) sigma(tau_n t), prefactor in log-space; n = 0
/// gives sigma itself.
double renormalized_sigma_eval(const RenormalizationTrace& trace, std::size_t n, double t);

enum class TailPolicy {
  /// sum_{k>N} a_k / c_k through the modulator's block bound.
  weighted_theta_tail,
  /// tau_N sum_{j>=1} mu_N^j: valid when the trace has stabilized.
  geometric,
  /// Only the computed terms; the result is then a lower estimate.
  none,
};

/// C (sum_{i=floor(ln 1/t)}^{N} tau_i + tail). Throws NumericFailure when
/// floor(ln 1/t) > N and the policy cannot extend the trace.
double c1_modulus(const RenormalizationTrace& trace, double C, double t,
                  TailPolicy policy = TailPolicy::weighted_theta_tail);

}  // namespace dinilab
