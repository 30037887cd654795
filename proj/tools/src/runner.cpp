#include "dinilab/runner/runner.hpp"

#include <openssl/crypto.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <ostream>
#include <thread>

#include "commands.hpp"
#include "dinilab/errors.hpp"

#ifndef DINILAB_VERSION
#define DINILAB_VERSION "unknown"
#endif

namespace dinilab::runner {

namespace {

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"dini", "modulator", "adversary", "collapse", "renorm", "pde", "pipeline"};
  return names;
}

const Json& section(const ExperimentConfig& config, const std::string& name) {
  const auto it = config.document.find(name);
  if (it == config.document.end())
    throw ValidationError("config: command '" + config.command + "' needs a \"" + name + "\" section");
  return *it;
}

void write_manifest(RunContext& ctx, double wall_seconds) {
  Json files = Json::array();
  for (const auto& name : ctx.files) {
    const fs::path path = ctx.out / name;
    files.push_back({{"path", name}, {"sha256", sha256_file(path)}, {"bytes", fs::file_size(path)}});
  }
  const Json manifest = {
      {"tool", "dinilab"},
      {"command", ctx.config.command},
      {"seed", ctx.config.seed},
      {"threads", ctx.config.threads},
      {"config", ctx.config.document},
      {"versions",
       {{"dinilab", DINILAB_VERSION},
        {"compiler", __VERSION__},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                              "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"openssl", OpenSSL_version(OPENSSL_VERSION)}}},
      {"wall_time_seconds", wall_seconds},
      {"exit_code", ctx.exit_code},
      {"summary", ctx.summary},
      {"files", files},
  };
  write_json(ctx.out / "manifest.json", manifest);
  ctx.files.push_back("manifest.json");
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  Json document;
  try {
    document = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  return from_json(std::move(document), path.parent_path());
}

ExperimentConfig ExperimentConfig::from_json(Json document, fs::path base_dir) {
  ExperimentConfig config;
  JsonReader in(document, "config");
  config.command = in.string("command");
  if (std::find(commands().begin(), commands().end(), config.command) == commands().end())
    throw ValidationError("config.command: unknown command '" + config.command +
                          "' (dini, modulator, adversary, collapse, renorm, pde, pipeline)");
  config.output_dir = in.string("output_dir", config.output_dir.string());
  config.seed = in.count("seed", 0);
  const std::uint64_t threads = in.count("threads", 1);
  if (threads == 0 || threads > 1024) throw ValidationError("config.threads: must lie in [1, 1024]");
  config.threads = static_cast<unsigned>(threads);
  in.string("description", "");
  for (const auto& name : commands()) in.raw_optional(name);
  in.finish();
  config.document = std::move(document);
  config.base_dir = std::move(base_dir);
  return config;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

RunReport run(const ExperimentConfig& config, std::ostream* log) {
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.output_dir.string() + ": " + ec.message());

  RunContext ctx{config, config.output_dir, log};
  ctx.note("command " + config.command + ", output " + config.output_dir.string());
  const std::string& c = config.command;
  if (c == "dini") run_dini(ctx, section(config, "dini"));
  else if (c == "modulator") run_modulator(ctx, section(config, "modulator"));
  else if (c == "adversary") run_adversary(ctx, section(config, "adversary"));
  else if (c == "collapse") run_collapse(ctx, section(config, "collapse"));
  else if (c == "renorm") run_renorm(ctx, section(config, "renorm"));
  else if (c == "pde") run_pde(ctx, section(config, "pde"));
  else run_pipeline(ctx);

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(ctx, seconds);
  ctx.note("wrote " + std::to_string(ctx.files.size()) + " files");
  return RunReport{ctx.exit_code, ctx.files, ctx.summary};
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ValidationError*>(&error) != nullptr) return kExitValidation;
  if (dynamic_cast<const IoError*>(&error) != nullptr) return kExitIo;
  if (dynamic_cast<const fs::filesystem_error*>(&error) != nullptr) return kExitIo;
  return kExitNumeric;
}

int run_guarded(const ExperimentConfig& config, std::ostream& diagnostics, std::ostream* log) {
  try {
    const RunReport report = run(config, log);
    if (report.exit_code != kExitOk)
      diagnostics << "dinilab: " << config.command << " finished with an inconclusive or failed check (see "
                  << (config.output_dir / "manifest.json").string() << ")\n";
    return report.exit_code;
  } catch (const NonConvergence& e) {
    diagnostics << "dinilab: numeric failure: " << e.what() << " (" << e.history().size() << " sweeps recorded)\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    const char* kind = code == kExitValidation ? "invalid input" : code == kExitIo ? "i/o error" : "numeric failure";
    diagnostics << "dinilab: " << kind << ": " << e.what() << '\n';
    return code;
  }
}

}  // namespace dinilab::runner
