#include "dinilab/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "internal/compensated_sum.hpp"
#include "internal/format.hpp"

namespace dinilab {

namespace {

std::string number(double v) { return detail::number(v, 10); }

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bisection on [lo, hi] for a predicate that is false at lo and true at hi.
// Returns the true end once the bracket is below `rel_tol` (relative to hi)
// or stops shrinking.
template <class Pred>
double bisect_to_true(double lo, double hi, double rel_tol, Pred&& holds) {
  for (int iter = 0; iter < 2000; ++iter) {
    if (hi - lo <= rel_tol * hi) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (holds(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double log_sigma(const DegeneracyLaw& law, double x) {
  const double v = law.sigma.evaluate(x);
  if (!(v > 0.0)) throw NumericFailure("degeneracy law vanishes at t=" + number(x));
  return std::log(v);
}

}  // namespace

std::string_view to_string(ScaleCase c) {
  switch (c) {
    case ScaleCase::fast_degeneracy: return "fast_degeneracy";
    case ScaleCase::tame_degeneracy: return "tame_degeneracy";
  }
  return "unknown";
}

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::initial: return "initial";
    case Branch::kept: return "kept";
    case Branch::raised: return "raised";
    case Branch::clamped: return "clamped";
  }
  return "unknown";
}

void RenormParams::validate() const {
  if (!(L > 1.0) || !std::isfinite(L)) throw ValidationError("renorm: L must be > 1, got " + number(L));
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("renorm: beta must lie in (0, 1), got " + number(beta));
  const double a = alpha_or_default();
  if (!(a > 0.0 && a < beta))
    throw ValidationError("renorm: alpha must lie in (0, beta) = (0, " + number(beta) + "), got " + number(a));
  if (!(delta > 0.0 && delta < 0.1))
    throw ValidationError("renorm: delta must lie in (0, 1/10), got " + number(delta));
  if (depth < 1) throw ValidationError("renorm: depth must be >= 1");
  if (!(root_tol > 0.0)) throw ValidationError("renorm: root_tol must be positive");
  if (!sigma.normalized) throw ValidationError("renorm: degeneracy law must be normalized (sigma(1) >= 1)");
}

double RenormalizationTrace::log_tau(std::size_t k) const {
  if (k == 0) return 0.0;
  if (k > steps.size()) throw ValidationError("trace has only " + std::to_string(steps.size()) + " steps");
  return steps[k - 1].log_tau;
}

double RenormalizationTrace::tau(std::size_t k) const { return std::exp(log_tau(k)); }

InitialScale choose_initial_scale(const RenormParams& params) {
  params.validate();
  const ModulusOfContinuity gamma = gamma_of(params.sigma);
  auto omega = [&gamma](double t) { return gamma.inverse_evaluate(t, 1e-16); };
  const double L = params.L;
  const double beta = params.beta;

  InitialScale out;
  out.ratio_samples.reserve(60);
  for (int m = 1; m <= 60; ++m) {
    const double t = std::ldexp(1.0, -m);
    out.ratio_samples.push_back(std::pow(t, beta) / omega(t));
  }
  if (params.case_override) {
    out.scale_case = *params.case_override;
    out.overridden = true;
  } else {
    // little-o is decided on the last 30 dyadic samples
    bool decreasing = true;
    for (int m = 30; m < 60; ++m) decreasing = decreasing && out.ratio_samples[m] < out.ratio_samples[m - 1];
    const double ratio = out.ratio_samples[59] / out.ratio_samples[29];
    if (decreasing && ratio < 0.5)
      out.scale_case = ScaleCase::fast_degeneracy;
    else if (ratio >= 0.9)
      out.scale_case = ScaleCase::tame_degeneracy;
    else
      throw ValidationError("renorm: cannot decide whether t^beta = o(omega(t)) from dyadic samples (R_60/R_30 = " +
                            number(ratio) + "); set the case explicitly");
  }

  if (out.scale_case == ScaleCase::fast_degeneracy) {
    // h(r) = omega(r) - 2 L r^beta is negative at 1/2 and positive near 0
    auto h = [&](double r) { return omega(r) - 2.0 * L * std::pow(r, beta); };
    double hi = 0.5;
    if (!(h(hi) < 0.0))
      throw ValidationError("renorm: omega(1/2) >= 2 L 2^-beta, so no root r < 1/2 separates the scales; increase L");
    double lo = 0.0;
    for (int m = 2; m <= 1000; ++m) {
      const double t = std::ldexp(1.0, -m);
      if (h(t) >= 0.0) {
        lo = t;
        break;
      }
      hi = t;
    }
    if (lo == 0.0) throw NumericFailure("renorm: 2 L r^beta = omega(r) has no root above 2^-1000");
    // keep h(r) >= 0, i.e. omega(r) >= 2 L r^beta, at the returned end
    double r = lo;
    if (h(lo) != 0.0) {
      double b = hi;
      for (int iter = 0; iter < 2000; ++iter) {
        const double mid = 0.5 * (r + b);
        if (mid <= r || mid >= b) break;
        if (h(mid) >= 0.0)
          r = mid;
        else
          b = mid;
      }
    }
    out.r = r;
    out.mu1 = omega(r);
  } else {
    const double alpha = params.alpha_or_default();
    out.r = std::pow(2.0 * L, 1.0 / (alpha - beta));
    if (!(out.r < 0.5))
      throw ValidationError("renorm: (2L)^{1/(alpha-beta)} = " + number(out.r) + " is not below 1/2");
    out.mu1 = std::pow(out.r, alpha);
  }
  out.theta = out.r / out.mu1;
  if (!(out.r < out.mu1) || !(out.mu1 < 1.0) || !(out.theta > 0.0 && out.theta < 1.0))
    throw NumericFailure("renorm: initial scale violates r < mu_1 < 1 (r=" + number(out.r) + ", mu_1=" +
                         number(out.mu1) + ")");
  return out;
}

SummableSequence build_theta_sequence(const DegeneracyLaw& law, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta must lie in (0, 1)");
  const ModulusOfContinuity inverse = law.sigma.inverse_modulus();
  const double log_theta = std::log(theta);
  auto term = [inverse, log_theta](std::uint64_t k) {
    const double y = std::exp(static_cast<double>(k) * log_theta);
    if (y == 0.0) return 0.0;
    return inverse.evaluate(y);
  };
  const std::string label = "sigma^-1(theta^k), theta=" + number(theta);
  const double slack = 1e-12;
  if (inverse.has_dini_primitive()) {
    // a(x) = sigma^{-1}(theta^x) decreases, so
    // int_n^inf a <= sum_{k>=n} a_k <= a_n + int_n^inf a = a_n + P(theta^n)/ln(1/theta)
    auto integral = [inverse, log_theta](std::uint64_t n) {
      const double y = std::exp(static_cast<double>(n) * log_theta);
      if (y == 0.0) return 0.0;
      return *inverse.dini_primitive(y) / -log_theta;
    };
    return SummableSequence::custom(
        term, [term, integral, slack](std::uint64_t n) { return (term(n) + integral(n)) * (1.0 + slack); }, label,
        [integral, slack](std::uint64_t n) { return integral(n) * (1.0 - slack); });
  }
  // ratio-test estimate over a window; not certified
  return SummableSequence::custom(
      term,
      [term](std::uint64_t n) {
        const double first = term(n);
        if (first == 0.0) return 0.0;
        double q = 0.0;
        double previous = first;
        for (std::uint64_t i = 1; i <= 16; ++i) {
          const double next = term(n + i);
          q = std::max(q, previous > 0.0 ? next / previous : 0.0);
          previous = next;
        }
        return q < 1.0 ? first / (1.0 - q) : kInf;
      },
      label + " (ratio-test tail)");
}

RenormalizationTrace run_shoring_algorithm(const RenormParams& params) {
  params.validate();
  const DegeneracyLaw& law = params.sigma;
  XiNorm xi = xi_norm(law, params.dini);
  if (xi.inverse_certificate.verdict == DiniVerdict::divergent)
    throw ValidationError("renorm: sigma^{-1} fails the Dini condition (int sigma^{-1}(s)/s ds > " +
                          number(params.dini.cap) + ")");

  const InitialScale scale = choose_initial_scale(params);
  SummableSequence a = build_theta_sequence(law, scale.theta);
  const double epsilon = 1.0 / (1.0 + params.delta);
  ModulatorResult modulator = dp_modulator(a, epsilon, params.delta, params.modulator);

  RenormalizationTrace trace{params, scale, a, modulator, epsilon, {}, 0.0, 0.0, 0.0, 0.0, 0, 0, xi};
  const double log_r = std::log(scale.r);
  const std::size_t depth = params.depth;
  trace.steps.reserve(depth);

  // ln sigma_m(c) with tau_m = exp(log_tau_prev) * mu
  auto log_sigma_m = [&](std::size_t m, double log_tau_prev, double mu, double c) {
    const double log_tau = log_tau_prev + std::log(mu);
    return log_tau - static_cast<double>(m) * log_r + log_sigma(law, std::exp(log_tau) * c);
  };

  {
    RenormStep s;
    s.k = 1;
    s.mu = scale.mu1;
    s.log_tau = std::log(scale.mu1);
    s.tau = scale.mu1;
    s.c = modulator.c(1);
    s.sigma_at_c = std::exp(log_sigma_m(1, 0.0, scale.mu1, s.c));
    s.a_over_c = a.term(1) / s.c;
    s.branch = Branch::initial;
    trace.steps.push_back(s);
    trace.sigma1_at_one = std::exp(log_sigma_m(1, 0.0, scale.mu1, 1.0));
  }

  const double top = std::nextafter(1.0, 0.0);
  for (std::size_t m = 2; m <= depth; ++m) {
    const RenormStep& prev = trace.steps.back();
    const double c = modulator.c(m);
    auto shored = [&](double mu) { return log_sigma_m(m, prev.log_tau, mu, c) >= 0.0; };
    RenormStep s;
    s.k = m;
    s.c = c;
    if (shored(prev.mu)) {
      s.mu = prev.mu;
      s.branch = Branch::kept;
    } else if (!shored(top)) {
      s.mu = top;
      s.branch = Branch::clamped;
      ++trace.clamped_count;
    } else {
      s.mu = bisect_to_true(prev.mu, top, params.root_tol, shored);
      s.branch = Branch::raised;
      ++trace.raised_count;
    }
    s.log_tau = prev.log_tau + std::log(s.mu);
    s.tau = std::exp(s.log_tau);
    s.sigma_at_c = std::exp(log_sigma_m(m, prev.log_tau, s.mu, c));
    s.a_over_c = a.term(m) / c;
    trace.steps.push_back(s);
  }

  detail::CompensatedSum tau_sum, weighted;
  for (const RenormStep& s : trace.steps) {
    tau_sum.add(s.tau);
    weighted.add(s.a_over_c);
  }
  trace.tau_sum = tau_sum.value();
  trace.weighted_sum = weighted.value();
  trace.tau_l1_bound = trace.clamped_count == 0 ? modulator.b_norm.upper() : kInf;
  return trace;
}

double renormalized_sigma_eval(const RenormalizationTrace& trace, std::size_t n, double t) {
  if (!(t > 0.0)) throw DomainError("renormalized law: t must be positive");
  const DegeneracyLaw& law = trace.params.sigma;
  if (n == 0) return law.sigma.evaluate(t);
  const double log_tau = trace.log_tau(n);
  const double log_prefactor = log_tau - static_cast<double>(n) * std::log(trace.scale.r);
  const double argument = std::exp(log_tau) * t;
  if (argument > law.sigma.domain_end())
    throw DomainError("renormalized law: tau_n t = " + number(argument) + " leaves the domain of sigma");
  return std::exp(log_prefactor + log_sigma(law, argument));
}

double c1_modulus(const RenormalizationTrace& trace, double C, double t, TailPolicy policy) {
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("c1_modulus: t must lie in (0, 1]");
  if (!(C > 0.0)) throw ValidationError("c1_modulus: C must be positive");
  const std::size_t N = trace.depth();
  // ln(1/t) for t = e^-m should give m, not m - 1 ulp
  const double x = -std::log(t);
  const auto first = static_cast<std::size_t>(std::floor(x + 1e-12 * std::max(1.0, x)));

  if (first > N) {
    if (policy != TailPolicy::geometric)
      throw NumericFailure("c1_modulus: floor(ln 1/t) = " + std::to_string(first) + " exceeds the trace depth " +
                           std::to_string(N) + "; run a deeper trace");
    const double mu = trace.steps.back().mu;
    const double log_term = trace.log_tau(N) + static_cast<double>(first - N) * std::log(mu);
    return C * std::exp(log_term) / (1.0 - mu);
  }
  detail::CompensatedSum sum;
  for (std::size_t i = N + 1; i-- > first;) sum.add(trace.tau(i));
  double tail = 0.0;
  switch (policy) {
    case TailPolicy::weighted_theta_tail:
      tail = trace.c.weighted_tail_bound(trace.a, N + 1);
      break;
    case TailPolicy::geometric: {
      const double mu = trace.steps.back().mu;
      tail = trace.tau(N) * mu / (1.0 - mu);
      break;
    }
    case TailPolicy::none:
      break;
  }
  return C * (sum.value() + tail);
}

}  // namespace dinilab
