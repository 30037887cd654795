// Acceptance gate: one PASS/FAIL line per criterion, each checked at its
// stated tolerance and runtime budget. Exit status is non-zero when any
// criterion fails.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "dinilab/collapse.hpp"
#include "dinilab/dini.hpp"
#include "dinilab/pde/decay.hpp"
#include "dinilab/pde/solver.hpp"
#include "dinilab/renorm.hpp"
#include "dinilab/runner/runner.hpp"
#include "dinilab/sequences.hpp"
#include "generators.hpp"

namespace {

using namespace dinilab;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
  void note(const std::string& what) { details.push_back("      " + what); }
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buffer[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof buffer, format, args);
  va_end(args);
  return buffer;
}

int run_criterion(int id, const std::string& title, double budget_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    outcome.check(false, std::string("threw: ") + e.what());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0.0)
    outcome.check(seconds < budget_seconds, fmt("runtime %.2f s < %.0f s", seconds, budget_seconds));
  std::printf("%s criterion %d: %s (%.2f s)\n", outcome.pass ? "PASS" : "FAIL", id, title.c_str(), seconds);
  for (const auto& line : outcome.details) std::printf("    %s\n", line.c_str());
  std::fflush(stdout);
  return outcome.pass ? 0 : 1;
}

template <class F>
void parallel_for(std::size_t count, F body) {
  const unsigned workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------

Outcome modulator_bounds() {
  constexpr std::size_t kSequences = 1000;
  constexpr std::uint64_t kSeed = 20261016;
  const double epsilons[] = {0.5, 1.0};
  const double deltas[] = {0.05, 0.09};
  std::atomic<std::size_t> failures{0};
  std::mutex first_mutex;
  std::string first_failure;
  std::atomic<std::size_t> blocks_checked{0};

  parallel_for(kSequences, [&](std::size_t index) {
    testing::Gen g(kSeed + 0x9E3779B97F4A7C15ull * (index + 1));
    const SummableSequence a = testing::random_mixture(g);
    for (double eps : epsilons) {
      for (double delta : deltas) {
        const ModulatorResult m = dp_modulator(a, eps, delta);
        const double slack = 4.0 * std::numeric_limits<double>::epsilon();
        bool ok = m.c(1) <= 1.0 / eps;
        for (std::size_t j = 1; j < m.blocks.size(); ++j) ok = ok && m.c(m.blocks[j]) <= m.c(m.blocks[j - 1]);
        ok = ok && m.b_norm.lower() >= eps * (1.0 - delta / 2.0) * m.a_norm.upper() * (1.0 - slack);
        ok = ok && m.b_norm.upper() <= eps * (1.0 + delta) * m.a_norm.lower() * (1.0 + slack);
        for (std::size_t j = 1; j <= m.block_sums.size(); ++j)
          ok = ok && m.block_sums[j - 1] < std::ldexp(eps * delta * m.a_norm.lower(), -static_cast<int>(j));
        blocks_checked += m.block_sums.size();
        if (!ok) {
          ++failures;
          std::lock_guard<std::mutex> lock(first_mutex);
          if (first_failure.empty())
            first_failure = fmt("sequence %zu (%s) eps=%g delta=%g: b in [%.12g, %.12g], a in [%.12g, %.12g]", index,
                                a.label().c_str(), eps, delta, m.b_norm.lower(), m.b_norm.upper(), m.a_norm.lower(),
                                m.a_norm.upper());
        }
      }
    }
  });
  Outcome o;
  o.check(failures == 0, fmt("%zu of %zu runs violate max c <= 1/eps, the norm bounds or a block bound", failures.load(),
                             kSequences * 4));
  o.note(fmt("%zu block sums checked against eps delta ||a|| / 2^j", blocks_checked.load()));
  if (!first_failure.empty()) o.note("first failure: " + first_failure);
  return o;
}

Outcome adversarial_sequences() {
  Outcome o;
  const CoefficientSequence families[] = {CoefficientSequence::harmonic(), CoefficientSequence::geometric(),
                                          CoefficientSequence::inverse_log()};
  for (const auto& c : families) {
    const AdversaryResult r = adversarial_for(c, 1e3);
    bool monotone = r.blocks.empty() || r.head_value >= r.blocks.front().value;
    for (std::size_t k = 1; k < r.blocks.size(); ++k)
      monotone = monotone && r.blocks[k].log_value <= r.blocks[k - 1].log_value;
    const std::uint64_t sampled = r.K ? std::min<std::uint64_t>(*r.K, 200000) : 200000;
    for (std::uint64_t j = 1; j < sampled; ++j) monotone = monotone && r.a.term(j + 1) <= r.a.term(j);
    const double norm_error = std::abs(r.norm.value - 1.0) + r.norm.error;
    o.check(monotone, c.label() + ": a non-increasing (blocks and first " + std::to_string(sampled) + " terms)");
    o.check(norm_error <= 1e-10, fmt("%s: | ||a||_1 - 1 | <= %.3g", c.label().c_str(), norm_error));
    o.check(r.partial_sum_lower > 1e3, fmt("%s: sum_{j<=K} a_j/c_j >= %.6g > 1000 at ln K = %.6g", c.label().c_str(),
                                           r.partial_sum_lower, r.log_K));
  }
  return o;
}

Outcome dini_brackets() {
  Outcome o;
  const double thetas[] = {0.1, 0.5, 0.9};
  auto bracket = [&](const ModulusOfContinuity& w, double exact) {
    for (double theta : thetas) {
      DiniOptions opt;
      opt.theta = theta;
      opt.tol = 1e-6;
      const DiniCertificate c = dini_integral(w, opt);
      o.check(c.verdict == DiniVerdict::dini && c.lower_bound <= exact && exact <= c.upper_bound &&
                  c.tail_estimate <= 1e-6,
              fmt("%s theta=%.1f: %.6g in [%.6g, %.6g], tail %.2g", w.label().c_str(), theta, exact, c.lower_bound,
                  c.upper_bound, c.tail_estimate));
    }
  };
  for (double alpha : {0.25, 0.5, 1.0, 2.0}) bracket(ModulusOfContinuity::power(alpha, 1.0, 1.0), 1.0 / alpha);
  bracket(ModulusOfContinuity::log_power(2.0), 1.0);
  const DiniCertificate divergent = dini_integral(ModulusOfContinuity::log_power(1.0));
  o.check(divergent.verdict == DiniVerdict::divergent && divergent.lower_bound > 1e6,
          fmt("log_power(alpha=1): verdict %s, lower bound %.3g", std::string(to_string(divergent.verdict)).c_str(),
              divergent.lower_bound));
  return o;
}

RenormParams criterion_params() {
  RenormParams p{.sigma = DegeneracyLaw::make(ModulusOfContinuity::power(1.0))};
  p.L = 2.0;
  p.beta = 0.75;
  p.delta = 1.0 / 20.0;
  p.depth = 40;
  return p;
}

Outcome renormalization_trace() {
  Outcome o;
  const RenormalizationTrace t = run_shoring_algorithm(criterion_params());
  o.check(std::abs(t.r() - 1.0 / 256.0) <= 1e-12, fmt("r = %.17g", t.r()));
  o.check(std::abs(t.scale.mu1 - 1.0 / 16.0) <= 1e-12, fmt("mu_1 = %.17g", t.scale.mu1));
  o.check(std::abs(t.scale.theta - 1.0 / 16.0) <= 1e-12, fmt("theta = %.17g", t.scale.theta));
  const double sigma1 = renormalized_sigma_eval(t, 1, 1.0);
  o.check(std::abs(sigma1 - 1.0) <= 1e-10, fmt("sigma_1(1) = %.17g", sigma1));

  double min_sigma = INFINITY;
  bool decreasing = true, raised_ok = true;
  std::size_t raised = 0;
  for (std::size_t k = 1; k <= t.depth(); ++k) {
    const RenormStep& s = t.steps[k - 1];
    if (k >= 2) min_sigma = std::min(min_sigma, renormalized_sigma_eval(t, k, s.c));
    if (k >= 2) decreasing = decreasing && s.tau < t.steps[k - 2].tau;
    if (s.branch == Branch::raised) {
      ++raised;
      raised_ok = raised_ok && s.tau <= s.a_over_c;
    }
  }
  o.check(min_sigma >= 1.0 - 1e-9, fmt("min_{2<=k<=40} sigma_k(c_k) = %.17g", min_sigma));
  o.check(decreasing, "tau strictly decreasing");
  o.check(t.tau_sum <= t.weighted_sum,
          fmt("sum tau_k = %.10g <= sum sigma^-1(theta^k)/c_k = %.10g", t.tau_sum, t.weighted_sum));
  o.check(raised_ok, fmt("tau_k <= sigma^-1(theta^k)/c_k at all %zu raised steps", raised));
  o.check(t.clamped_count == 0, fmt("%zu clamped branches", t.clamped_count));
  double kept_excess = 0.0;
  for (const auto& s : t.steps)
    if (s.tau > s.a_over_c) kept_excess += s.tau - s.a_over_c;
  o.note(fmt("steps with tau_k > a_k/c_k contribute %.6g; c_1 = 1/eps = %.6g", kept_excess, t.steps.front().c));
  return o;
}

Outcome shoring_and_collapse() {
  Outcome o;
  const RenormalizationTrace t = run_shoring_algorithm(criterion_params());
  const ShoringWitness w = is_shored_up([&t](std::size_t n, double s) { return renormalized_sigma_eval(t, n, s); },
                                        [&t](std::size_t n) { return t.steps[n - 1].c; }, t.depth(), 1.0 - 1e-9);
  o.check(w.shored_up, fmt("is_shored_up(sigma_k, c_k, floor 1 - 1e-9): min %.17g at k = %zu", w.min_value, w.argmin));

  const auto grid = uniform_grid(1.0, 1000);
  const CollapseReport powers = collapsing_measure_estimate(ModulusCollection::powers(200), grid, 200, 1e-9);
  o.check(powers.mu_estimate >= 0.99, fmt("mu_estimate({t^j : j <= 200}) = %.6g >= 0.99", powers.mu_estimate));
  o.note(fmt("t^200 < 1e-9 exactly for t < %.6g", std::pow(1e-9, 1.0 / 200.0)));
  const auto pair = ModulusCollection::finite({ModulusOfContinuity::power(1.0, 1.0, 1.0),
                                               ModulusOfContinuity::power(2.0, 1.0, 1.0)}, 1.0);
  const double mu_pair = collapsing_measure_estimate(pair, grid, 2, 1e-9).mu_estimate;
  o.check(mu_pair == 0.0, fmt("mu_estimate({t, t^2}) = %g", mu_pair));
  return o;
}

const double kBoundary = 2.0 * std::sqrt(2.0) / 3.0;

pde::ProblemSpec degenerate_problem(double h, double xi = 0.0) {
  pde::ProblemSpec p;
  p.sigma = DegeneracyLaw::make(ModulusOfContinuity::power(1.0));
  p.source = [](double, double) { return 1.0; };
  p.boundary = [](double, double) { return kBoundary; };
  p.xi = {xi, 0.0};
  p.h = h;
  return p;
}

double oracle_error(const pde::GridSolution& s) {
  double e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    e = std::max(e, std::abs(s.values[i] - kBoundary * std::pow(std::abs(s.x[i]), 1.5)));
  return e;
}

Outcome pde_oracle() {
  Outcome o;
  const double coarse = oracle_error(pde::solve(degenerate_problem(1e-3)));
  const double fine = oracle_error(pde::solve(degenerate_problem(5e-4)));
  o.check(coarse <= 5e-3, fmt("max error at h = 1e-3: %.4g <= 5e-3", coarse));
  o.check(coarse / fine >= 1.8, fmt("halving h: %.4g -> %.4g, factor %.4f >= 1.8", coarse, fine, coarse / fine));

  // Six levels of r = 1/4 need balls down to 4^-6; h = 2^-14 keeps 33 nodes there.
  const pde::GridSolution s = pde::solve(degenerate_problem(std::ldexp(1.0, -14)));
  const pde::DecayReport d = pde::fit_tangent_planes(s, {0.0, 0.0}, 0.25, 6);
  o.check(std::abs(d.holder_exponent - 0.5) <= 0.05, fmt("gradient Hoelder exponent %.4f = 0.50 +- 0.05", d.holder_exponent));
  bool monotone = d.scales.size() == 7;
  std::string ratios;
  for (std::size_t n = 0; n < d.scales.size(); ++n) {
    const double q = d.scales[n].E / d.scales[n].radius;
    ratios += fmt(n == 0 ? "%.4g" : ", %.4g", q);
    if (n > 0) monotone = monotone && q < d.scales[n - 1].E / d.scales[n - 1].radius;
  }
  o.check(monotone, "E_n / r^n strictly decreasing for n = 0..6: " + ratios);
  return o;
}

Outcome xi_uniformity() {
  Outcome o;
  const double xis[] = {0.0, 10.0, 100.0};
  std::vector<pde::GridSolution> solutions(3);
  parallel_for(3, [&](std::size_t i) { solutions[i] = pde::solve(degenerate_problem(1e-3, xis[i])); });
  const pde::DecayReport d = pde::fit_tangent_planes(solutions[0], {0.0, 0.0}, 0.25, 4);
  const double gamma = d.holder_exponent;
  o.note(fmt("gamma fitted from the xi = 0 solve: %.4f", gamma));
  std::vector<double> seminorms;
  for (std::size_t i = 0; i < 3; ++i) {
    seminorms.push_back(pde::holder_seminorm(solutions[i], {0.0, 0.0}, 0.5, gamma));
    o.note(fmt("xi = %g: [u]_gamma on B_1/2 = %.6g", xis[i], seminorms.back()));
  }
  const auto [lo, hi] = std::minmax_element(seminorms.begin(), seminorms.end());
  o.check((*hi - *lo) <= 0.1 * *hi, fmt("spread (max - min) / max = %.4f <= 0.10", (*hi - *lo) / *hi));
  o.note(fmt("uniform bound: max seminorm %.6g attained at xi = %g", *hi, xis[hi - seminorms.begin()]));
  return o;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  Outcome o;
  const fs::path configs = DINILAB_CONFIG_DIR;
  const fs::path root = fs::temp_directory_path() / ("dinilab_acceptance_" + std::to_string(::getpid()));
  const char* names[] = {"modulator_sweep.json", "adversary_inverse_log.json", "dini_log_power.json",
                         "renorm_linear.json",   "collapse_powers.json",       "pde_oracle.json",
                         "pde_xi_sweep.json",    "pipeline_linear.json"};
  for (const char* name : names) {
    std::size_t compared = 0, differing = 0;
    int codes[2] = {-1, -1};
    for (int pass = 0; pass < 2; ++pass) {
      auto config = runner::ExperimentConfig::load(configs / name);
      config.output_dir = root / std::to_string(pass) / name;
      std::ostringstream diagnostics;
      codes[pass] = runner::run_guarded(config, diagnostics);
    }
    for (const auto& entry : fs::recursive_directory_iterator(root / "0" / name)) {
      if (entry.path().extension() != ".csv") continue;
      const fs::path other = root / "1" / name / fs::relative(entry.path(), root / "0" / name);
      ++compared;
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
    }
    o.check(codes[0] == 0 && codes[1] == 0 && compared > 0 && differing == 0,
            fmt("%s: exit %d/%d, %zu CSVs compared, %zu differ", name, codes[0], codes[1], compared, differing));
  }
  fs::remove_all(root);
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  failed += run_criterion(1, "block modulator bounds on 1000 seeded sequences", 10.0, modulator_bounds);
  failed += run_criterion(2, "adversarial sequences for 1/j, 2^-j, 1/log(j+1)", 5.0, adversarial_sequences);
  failed += run_criterion(3, "Dini certificates bracket closed-form integrals", 5.0, dini_brackets);
  failed += run_criterion(4, "renormalization trace for sigma(t) = t", 5.0, renormalization_trace);
  failed += run_criterion(5, "shoring check and collapsing measure", 10.0, shoring_and_collapse);
  failed += run_criterion(6, "1D degenerate oracle, mesh convergence and gradient decay", 60.0, pde_oracle);
  failed += run_criterion(7, "Hoelder seminorms uniform in xi", 120.0, xi_uniformity);
  failed += run_criterion(8, "identical config and seed give byte-identical CSVs", 0.0, determinism);
  std::printf("%d of 8 criteria pass\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
