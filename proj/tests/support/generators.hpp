// Small seeded generators for the property tests. Every generator draws from
// a caller-owned engine so a failing case can be replayed from its seed.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dinilab/modulus.hpp"
#include "dinilab/sequences.hpp"

namespace dinilab::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool coin() { return (engine_() & 1u) != 0; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Geometric, polynomial-decay or finite-support sequence with a random scale.
inline SummableSequence random_member(Gen& g) {
  const double scale = g.log_uniform(0.1, 10.0);
  switch (g.index(3)) {
    case 0: return SummableSequence::geometric(g.uniform(0.05, 0.95), scale);
    case 1: return SummableSequence::power(g.uniform(1.2, 4.0), scale);
    default: {
      std::vector<double> values(1 + g.index(40));
      for (double& v : values) v = scale * g.uniform(0.0, 1.0);
      values.front() += scale;
      return SummableSequence::finite(std::move(values));
    }
  }
}

/// Mixture of one to three random members with random weights.
inline SummableSequence random_mixture(Gen& g) {
  const std::size_t count = 1 + g.index(3);
  if (count == 1) return random_member(g);
  std::vector<SummableSequence> members;
  std::vector<double> weights;
  for (std::size_t i = 0; i < count; ++i) {
    members.push_back(random_member(g));
    weights.push_back(g.uniform(0.1, 1.0));
  }
  return SummableSequence::mixture(members, weights);
}

/// A builtin modulus on (0, 1] drawn from every family with closed-form or
/// numeric evaluation.
inline ModulusOfContinuity random_builtin_modulus(Gen& g) {
  switch (g.index(5)) {
    case 0: return ModulusOfContinuity::power(g.uniform(0.1, 3.0), g.log_uniform(0.5, 2.0), 1.0);
    case 1: return ModulusOfContinuity::log_power(g.uniform(0.5, 3.0));
    case 2: return ModulusOfContinuity::root_series(1 + g.index(30));
    case 3: return ModulusOfContinuity::tilde_phi(1 + g.index(30));
    default: {
      const std::size_t n = 2 + g.index(20);
      std::vector<double> t(n), w(n);
      double acc_t = 0.0, acc_w = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc_t += g.uniform(0.01, 1.0);
        acc_w += g.uniform(0.01, 1.0);
        t[i] = acc_t;
        w[i] = acc_w;
      }
      for (double& v : t) v /= acc_t;
      return ModulusOfContinuity::tabulated(t, w);
    }
  }
}

}  // namespace dinilab::testing
