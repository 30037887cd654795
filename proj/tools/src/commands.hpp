#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "dinilab/pde/decay.hpp"
#include "dinilab/renorm.hpp"
#include "dinilab/runner/output.hpp"
#include "dinilab/runner/runner.hpp"

namespace dinilab::runner {

// Shared state of one run: the output directory and the files written so far.
struct RunContext {
  RunContext(const ExperimentConfig& c, fs::path dir, std::ostream* l) : config(c), out(std::move(dir)), log(l) {}

  const ExperimentConfig& config;
  fs::path out;
  std::ostream* log = nullptr;
  std::vector<std::string> files;
  int exit_code = kExitOk;
  Json summary = Json::object();

  fs::path file(const std::string& name) {
    files.push_back(name);
    return out / name;
  }
  void note(const std::string& message) const {
    if (log != nullptr && config.verbose) *log << "[dinilab] " << message << '\n';
  }
  void flag_failure() { exit_code = kExitNumeric; }
};

// Runs body(i) for i < count on up to `threads` workers. Results must go to
// per-index slots; the first exception by index is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

void run_dini(RunContext& ctx, const Json& section);
void run_modulator(RunContext& ctx, const Json& section);
void run_adversary(RunContext& ctx, const Json& section);
void run_collapse(RunContext& ctx, const Json& section);

struct C1Options {
  double C = 1.0;
  std::size_t points = 200;
  TailPolicy tail = TailPolicy::weighted_theta_tail;
};

// Writes trace.csv and renorm.json, plus c1_modulus.csv/.svg when
// `write_c1` is set; returns the trace and the parsed "c1" options.
std::pair<RenormalizationTrace, C1Options> run_renorm(RunContext& ctx, const Json& section, bool write_c1 = true);
void write_c1_modulus(RunContext& ctx, const RenormalizationTrace& trace, const C1Options& options);

struct PdeOutcome {
  std::vector<pde::GridSolution> solutions;
  std::vector<pde::DecayReport> reports;
};
PdeOutcome run_pde(RunContext& ctx, const Json& section, const RenormalizationTrace* trace = nullptr);

void run_pipeline(RunContext& ctx);

}  // namespace dinilab::runner
