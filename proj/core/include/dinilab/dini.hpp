/// @file dini.hpp
/// @brief Three-valued certification of the Dini condition
///   int_0^tau w(t)/t dt < infinity
/// from geometric samples S_N = sum_{n=1..N} w(tau theta^n).
///
/// Since w is non-decreasing, on each piece [tau theta^i, tau theta^{i-1}]
///   (1 - theta) w(tau theta^i) <= piece integral <= ((1 - theta)/theta) w(tau theta^{i-1}),
/// so the integral lies in
///   [(1 - theta)(S_N + tail_lo), ((1 - theta)/theta)(w(tau) + S_N + tail_hi)].
/// Families with a closed-form primitive give certified tails through the
/// integral test; other families fall back to a decay-model estimate and the
/// certificate says so (`tail_certified == false`).
#pragma once

#include <cstdint>
#include <string_view>

#include "dinilab/modulus.hpp"

namespace dinilab {

enum class DiniVerdict { dini, divergent, inconclusive };

std::string_view to_string(DiniVerdict verdict);

struct DiniOptions {
  double tau = 1.0;
  double theta = 0.5;
  double cap = 1e6;                        // divergence once lower_bound > cap
  double tol = 1e-6;                       // dini once the tail estimate < tol
  std::uint64_t max_terms = 1ull << 27;
};

struct DiniCertificate {
  DiniVerdict verdict = DiniVerdict::inconclusive;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double theta = 0.5;
  double tau = 1.0;
  std::uint64_t terms_used = 0;
  double partial_sum = 0.0;     // S_N
  double tail_estimate = 0.0;   // contribution of the unsampled tail to upper_bound
  bool tail_certified = false;
};

DiniCertificate dini_integral(const ModulusOfContinuity& modulus, const DiniOptions& options = {});

/// Bracket for ||sigma||_Xi = sigma(1) + int_0^tau sigma^{-1}(s)/s ds.
struct XiNorm {
  double lower = 0.0;
  double upper = 0.0;
  DiniCertificate inverse_certificate;
};

XiNorm xi_norm(const DegeneracyLaw& law, const DiniOptions& options = {});

}  // namespace dinilab
