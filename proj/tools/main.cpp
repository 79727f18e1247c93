#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "snls/app/commands.hpp"
#include "snls/app/config.hpp"

int main(int argc, char** argv) {
  using namespace snls::app;
  CLI::App app{"Stochastic NLS on graphs: simulation, invariants, dispersion and optimal control"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::string output;
  int parallelism = 1;
  std::string log_level = "info";
  app.add_option("--config", config_path, "JSON config file (defaults when omitted)");
  app.add_option("--output", output, "output directory (overrides output_dir)");
  app.add_option("--parallelism", parallelism, "worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));
  for (const char* name : {"simulate", "invariants", "dispersion", "gradcheck", "optimize"}) {
    app.add_subcommand(name);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));
  spdlog::set_pattern("[%l] %v");
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const RunConfig cfg = config_path.empty() ? build_config(nlohmann::json::object())
                                              : load_config_file(config_path);
    CommandOptions opts;
    opts.output_dir = output;
    opts.parallelism = parallelism;
    const CommandOutcome out = run_command(command, cfg, opts);
    for (const auto& f : out.files) spdlog::info("wrote {}", f);
    if (out.exit_code != kExitOk) spdlog::error("{} finished with failed checks", command);
    return out.exit_code;
  } catch (const snls::Error& e) {
    spdlog::error("{}", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitNumerical;
  }
}
