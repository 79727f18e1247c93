#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "snls/app/config.hpp"
#include "snls/errors.hpp"

namespace snls::app {

inline constexpr const char* kToolVersion = "snls 0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitInvariant = 4,
};

int exit_code_for(ErrorKind kind) noexcept;

struct CommandOptions {
  std::string output_dir;  // overrides the config's output_dir when set
  int parallelism = 1;
};

struct CommandOutcome {
  int exit_code = kExitOk;
  nlohmann::json summary;           // also written into the manifest
  std::vector<std::string> files;   // outputs, manifest last
};

// Each command writes its outputs plus manifest.json into the output
// directory. Everything except the manifest's wall-clock field is a function
// of (config, build).
CommandOutcome run_simulate(const RunConfig& cfg, const CommandOptions& opts);
CommandOutcome run_invariants(const RunConfig& cfg, const CommandOptions& opts);
CommandOutcome run_dispersion(const RunConfig& cfg, const CommandOptions& opts);
CommandOutcome run_gradcheck(const RunConfig& cfg, const CommandOptions& opts);
CommandOutcome run_optimize(const RunConfig& cfg, const CommandOptions& opts);

CommandOutcome run_command(const std::string& name, const RunConfig& cfg, const CommandOptions& opts);

}  // namespace snls::app
