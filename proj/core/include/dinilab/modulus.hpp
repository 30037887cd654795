/// @file modulus.hpp
/// @brief Moduli of continuity: evaluation, generalized inversion and the
/// builtin families (powers, logarithmic powers, generalized power series,
/// the slowly vanishing phi-tilde series, tabulated data).
///
/// A modulus is an immutable value. Copies share one evaluator, so passing
/// moduli between threads is safe as long as custom evaluators are pure.
#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dinilab/errors.hpp"

namespace dinilab {

enum class ModulusFamily { power, log_power, power_series, tilde_phi, composed, tabulated };

std::string_view to_string(ModulusFamily family);

/// Parameters that identify a builtin family member (for reporting).
struct FamilyParameters {
  double alpha = 0.0;                 // power / log_power exponent
  double coefficient = 1.0;           // power prefactor
  std::vector<double> coefficients;   // power_series a_j
  std::vector<double> exponents;      // power_series gamma_j
  std::size_t truncation = 0;         // tilde_phi / power_series term count
};

/// Options for the sampled invariant check.
struct ModulusCheckOptions {
  double floor = 1e-12;          // smallest dyadic sample point
  double vanishing_ratio = 0.5;  // require w(floor) <= ratio * w(T)
  bool require_vanishing = true;
};

class ModulusOfContinuity {
 public:
  using Function = std::function<double(double)>;
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  /// C * t^alpha on (0, T]. alpha == 0 gives the constant law C, which is
  /// accepted as a degenerate-free cap but does not vanish at 0.
  static ModulusOfContinuity power(double alpha, double coefficient = 1.0,
                                   double domain_end = kInfinity);
  static ModulusOfContinuity constant(double value, double domain_end = kInfinity);

  /// (1 / (1 - ln t))^alpha on (0, T], T <= 1 by default.
  static ModulusOfContinuity log_power(double alpha, double domain_end = 1.0);

  /// sum_j a_j t^{gamma_j}, a finite truncation of an infinite series;
  /// `tail_bound` bounds the discarded terms on (0, T].
  static ModulusOfContinuity power_series(std::vector<double> coefficients,
                                          std::vector<double> exponents, double tail_bound,
                                          double domain_end = 1.0);

  /// sum_{j<=terms} 2^-j t^{1/j}, truncated with a geometric tail bound.
  static ModulusOfContinuity root_series(std::size_t terms);

  /// sum_{n<=N} a_n (1 - ln t)^{-(1+1/n)} with a_n = 1/(n 2^n).
  static ModulusOfContinuity tilde_phi(std::size_t truncation);

  /// Piecewise-linear interpolation of ascending knots (t_i, w_i), anchored
  /// at (0, 0). Weakly monotone data are allowed up to `monotone_tolerance`.
  static ModulusOfContinuity tabulated(std::vector<double> t, std::vector<double> values,
                                       double monotone_tolerance = 0.0);

  /// Two-column CSV (t, w(t)), ascending; a header line is skipped.
  static ModulusOfContinuity from_csv(const std::string& path, double monotone_tolerance = 0.0);

  /// Arbitrary evaluator. Optional closed forms for the inverse and for the
  /// primitive x -> int_0^x w(t)/t dt enable exact inversion and certified
  /// Dini tails.
  static ModulusOfContinuity custom(Function evaluator, double domain_end, std::string label,
                                    Function inverse = {}, Function dini_primitive = {},
                                    double supremum = std::numeric_limits<double>::quiet_NaN());

  /// w(t) for 0 < t <= T. Throws DomainError outside the domain and
  /// NumericFailure on a non-finite value.
  double evaluate(double t) const;
  double operator()(double t) const { return evaluate(t); }

  /// Generalized inverse inf{t : w(t) >= y}, to relative-or-absolute `tol`
  /// (|error| <= tol * min(1, t)). Closed forms are used when available.
  double inverse_evaluate(double y, double tol = 1e-14) const;

  bool has_closed_form_inverse() const;

  /// int_0^x w(t)/t dt in closed form, when the family provides one.
  /// May return +infinity (non-Dini families).
  std::optional<double> dini_primitive(double x) const;
  bool has_dini_primitive() const;

  /// w(e^L), usable far below the smallest double for families with a
  /// closed form in ln t. Without one, empty once e^L underflows.
  std::optional<double> evaluate_log(double log_t) const;
  /// The Dini primitive at x = e^L, when available.
  std::optional<double> dini_primitive_log(double log_x) const;
  bool has_log_form() const;

  double domain_end() const;
  /// sup of w over (0, T]; +infinity for unbounded laws.
  double supremum() const;
  ModulusFamily family() const;
  const FamilyParameters& parameters() const;
  const std::string& label() const;
  double monotone_tolerance() const;
  /// Bound on the terms discarded by a truncated series family, else 0.
  double truncation_tail_bound() const;

  /// t -> w(k t), defined on (0, T/k].
  ModulusOfContinuity with_argument_scale(double k) const;
  /// t -> c w(t).
  ModulusOfContinuity with_value_scale(double c) const;
  /// y -> w^{-1}(y) on (0, sup w].
  ModulusOfContinuity inverse_modulus(double tol = 1e-14) const;

  /// Sampled positivity / monotonicity / vanishing check on the dyadic grid
  /// T 2^-m down to `floor`. Throws InvariantError with the witness point.
  void check_invariants(const ModulusCheckOptions& options = {}) const;

 private:
  struct State;
  explicit ModulusOfContinuity(std::shared_ptr<const State> state);
  std::shared_ptr<const State> state_;
};

/// The law of degeneracy sigma together with its normalization flag.
struct DegeneracyLaw {
  ModulusOfContinuity sigma;
  bool normalized = false;

  /// Wraps sigma; when `require_normalized` is set, sigma(1) >= 1 is checked
  /// (ValidationError otherwise).
  static DegeneracyLaw make(ModulusOfContinuity sigma, bool require_normalized = true);
};

/// gamma(t) = t sigma(t). Its generalized inverse is the modulus w used to
/// pick the first scale.
ModulusOfContinuity gamma_of(const DegeneracyLaw& law);

/// Result of replacing an oscillating law by an equivalent modulus rho.
struct RescuedLaw {
  DegeneracyLaw law;
  double sandwich_constant = 1.0;
};

/// Thrown when C^-1 rho <= sigma_raw <= C rho fails at a grid point.
class SandwichViolation : public ValidationError {
 public:
  SandwichViolation(const std::string& what, double witness)
      : ValidationError(what), witness_(witness) {}
  double witness() const noexcept { return witness_; }

 private:
  double witness_;
};

/// Accepts rho as the working law if C^-1 rho(t) <= sigma_raw(t) <= C rho(t)
/// at every grid point; otherwise throws SandwichViolation carrying the first
/// failing point.
RescuedLaw equivalent_law_rescue(const std::function<double(double)>& sigma_raw,
                                 const ModulusOfContinuity& rho, double sandwich_constant,
                                 const std::vector<double>& grid);

}  // namespace dinilab
