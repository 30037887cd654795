#include "dinilab/dini.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "dinilab/errors.hpp"
#include "internal/compensated_sum.hpp"

namespace dinilab {

namespace {

constexpr double kInf = ModulusOfContinuity::kInfinity;

using detail::CompensatedSum;

// Decay-model estimate of sum_{n>N} g(n) from g(N/2), g(N-1), g(N).
// Returns +infinity when the samples do not decay faster than 1/n.
double heuristic_tail(double g_half, double g_prev, double g_last, std::uint64_t n) {
  if (g_last <= 0.0) return 0.0;
  const double half = static_cast<double>(n / 2);
  const double p = std::log(g_half / g_last) / std::log(static_cast<double>(n) / half);
  if (!(p > 1.0 + 1e-9)) return kInf;
  const double power_tail = g_last * static_cast<double>(n) / (p - 1.0);
  double geometric_tail = 0.0;
  const double q = g_last / g_prev;
  if (q < 1.0) geometric_tail = g_last * q / (1.0 - q);
  return std::max(power_tail, geometric_tail);
}

}  // namespace

std::string_view to_string(DiniVerdict verdict) {
  switch (verdict) {
    case DiniVerdict::dini: return "dini";
    case DiniVerdict::divergent: return "divergent";
    case DiniVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

DiniCertificate dini_integral(const ModulusOfContinuity& modulus, const DiniOptions& options) {
  const double tau = options.tau;
  const double theta = options.theta;
  if (!(tau > 0.0) || tau > modulus.domain_end())
    throw ValidationError("dini_integral: tau must lie in (0, domain_end]");
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("dini_integral: theta must lie in (0, 1)");
  if (!(options.cap > 0.0)) throw ValidationError("dini_integral: cap must be positive");
  if (!(options.tol > 0.0)) throw ValidationError("dini_integral: tol must be positive");
  if (options.max_terms < 2) throw ValidationError("dini_integral: max_terms must be >= 2");

  DiniCertificate cert;
  cert.theta = theta;
  cert.tau = tau;
  cert.tail_certified = modulus.has_dini_primitive();

  const double w_tau = modulus.evaluate(tau);
  const double log_theta = std::log(theta);
  const double inv_log = 1.0 / -log_theta;
  const double upper_factor = (1.0 - theta) / theta;
  const double lower_factor = 1.0 - theta;

  CompensatedSum partial;
  double last_sample = w_tau;

  // Samples are taken at ln(tau) + n ln(theta) so that families with a
  // closed form in ln t keep going once tau theta^n underflows.
  const double log_tau = std::log(tau);
  auto log_point = [&](std::uint64_t n) { return log_tau + static_cast<double>(n) * log_theta; };
  auto sample = [&](std::uint64_t n) { return modulus.evaluate_log(log_point(n)); };

  auto evaluate_bounds = [&](std::uint64_t n) {
    const double s = partial.value();
    double tail_lo = 0.0;
    double tail_hi = kInf;
    if (cert.tail_certified) {
      // sum_{k>n} g(k) lies between the integral test bounds.
      tail_hi = modulus.dini_primitive_log(log_point(n)).value_or(0.0) * inv_log;
      tail_lo = modulus.dini_primitive_log(log_point(n + 1)).value_or(0.0) * inv_log;
    } else if (n >= 4) {
      tail_hi = heuristic_tail(*sample(n / 2), *sample(n - 1), last_sample, n);
    }
    cert.terms_used = n;
    cert.partial_sum = s;
    cert.lower_bound = lower_factor * (s + tail_lo);
    cert.upper_bound = upper_factor * (w_tau + s + tail_hi);
    cert.tail_estimate = upper_factor * tail_hi;
  };

  std::uint64_t next_check = 4;
  for (std::uint64_t n = 1; n <= options.max_terms; ++n) {
    const std::optional<double> value = sample(n);
    if (!value) {
      --n;  // sampling grid underflowed; decide on what we have
      evaluate_bounds(n);
      break;
    }
    const double g = *value;
    partial.add(g);
    last_sample = g;
    if (n == next_check || n == options.max_terms) {
      evaluate_bounds(n);
      if (cert.lower_bound > options.cap) {
        cert.verdict = DiniVerdict::divergent;
        return cert;
      }
      if (cert.tail_estimate < options.tol) {
        cert.verdict = DiniVerdict::dini;
        return cert;
      }
      next_check = std::max(next_check + 1, next_check + next_check / 4);
    }
  }
  if (cert.lower_bound > options.cap) {
    cert.verdict = DiniVerdict::divergent;
  } else if (cert.tail_certified && std::isfinite(cert.upper_bound)) {
    // a certified finite upper bound already proves the condition
    cert.verdict = DiniVerdict::dini;
  } else {
    cert.verdict = DiniVerdict::inconclusive;
  }
  return cert;
}

XiNorm xi_norm(const DegeneracyLaw& law, const DiniOptions& options) {
  const ModulusOfContinuity inverse = law.sigma.inverse_modulus();
  DiniOptions inner = options;
  inner.tau = std::min(options.tau, inverse.domain_end());
  const double sigma_one = law.sigma.evaluate(1.0);
  XiNorm out;
  out.inverse_certificate = dini_integral(inverse, inner);
  out.lower = sigma_one + out.inverse_certificate.lower_bound;
  out.upper = sigma_one + out.inverse_certificate.upper_bound;
  return out;
}

}  // namespace dinilab
