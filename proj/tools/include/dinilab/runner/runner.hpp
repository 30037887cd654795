/// @file runner.hpp
/// @brief Experiment runner: validates a JSON config, dispatches to the
/// library, writes CSV/JSON/SVG artifacts and a manifest with content hashes.
///
/// Config layout: {"command": "...", "output_dir": "...", "seed": 0,
/// "threads": 1, "<command>": {section}}; `pipeline` reads the "renorm" and
/// "pde" sections (plus an optional "pipeline" section).
#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dinilab/runner/json_reader.hpp"

namespace dinilab::runner {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIo = 4;

struct ExperimentConfig {
  Json document;
  std::string command;
  fs::path output_dir = "dinilab-out";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool verbose = false;
  fs::path base_dir;  // relative CSV paths resolve here

  /// IoError when unreadable, ValidationError when malformed.
  static ExperimentConfig load(const fs::path& path);
  static ExperimentConfig from_json(Json document, fs::path base_dir = {});
};

struct RunReport {
  /// kExitOk, or kExitNumeric when a result is inconclusive or a checked
  /// bound failed (artifacts are still written).
  int exit_code = kExitOk;
  std::vector<std::string> files;  // relative to the output directory, manifest last
  Json summary;
};

/// Throws the library's exceptions; use run_guarded for exit-code mapping.
RunReport run(const ExperimentConfig& config, std::ostream* log = nullptr);

/// ValidationError -> 2, NumericFailure / InvariantError -> 3, IoError and
/// filesystem errors -> 4; anything else -> 3.
int exit_code_for(const std::exception& error);

/// Runs and reports errors on `diagnostics`; returns the process exit code.
int run_guarded(const ExperimentConfig& config, std::ostream& diagnostics, std::ostream* log = nullptr);

}  // namespace dinilab::runner
