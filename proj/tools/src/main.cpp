#include <CLI11.hpp>
#include <iostream>

#include "dinilab/errors.hpp"
#include "dinilab/runner/runner.hpp"

int main(int argc, char** argv) {
  using namespace dinilab::runner;
  CLI::App app{"dinilab: Dini-modulus, modulator, renormalization and degenerate-PDE experiments"};
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "Experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "Output directory (overrides output_dir in the config)");
  app.add_option("--seed", seed, "Seed for randomized sweeps (overrides the config)");
  app.add_option("--threads", threads, "Worker threads for parameter sweeps")->check(CLI::Range(1u, 1024u));
  app.add_flag("--verbose", verbose, "Progress notes on stderr");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  ExperimentConfig config;
  try {
    config = ExperimentConfig::load(config_path);
  } catch (const std::exception& e) {
    std::cerr << "dinilab: " << e.what() << '\n';
    return exit_code_for(e);
  }
  if (!out_dir.empty()) config.output_dir = out_dir;
  if (seed) config.seed = *seed;
  if (threads > 0) config.threads = threads;
  config.verbose = verbose;
  return run_guarded(config, std::cerr, &std::cerr);
}
