// Batch CLI for the dyne measurement simulator.
//
//   dynelab <traj|dist|sweep|polar> --config <path>
//           [--seed U64] [--trials N] [--workers K] [--out DIR]
//           [--format csv|jsonl] [--preset paper-apparatus|ideal]
//
// Exit status: 0 success, 1 validation error, 2 runtime/IO error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dynelab/config.hpp"
#include "dynelab/output.hpp"
#include "dynelab/runner.hpp"
#include "dynelab/version.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  dynelab::ConfigOverrides overrides;
};

void add_common_options(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Experiment config (JSON)")
      ->required();
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&](std::uint64_t v) { opts.overrides.master_seed = v; },
      "Master seed override");
  cmd->add_option_function<int>(
      "--trials", [&](int v) { opts.overrides.trials = v; },
      "Trials per ensemble override");
  cmd->add_option_function<int>(
      "--workers", [&](int v) { opts.overrides.workers = v; },
      "Worker thread count (default: DYNELAB_WORKERS env or hardware)");
  cmd->add_option_function<std::string>(
      "--out", [&](const std::string& v) { opts.overrides.out_dir = v; },
      "Output directory");
  cmd->add_option_function<std::string>(
      "--format", [&](const std::string& v) { opts.overrides.format = v; },
      "Output format: csv or jsonl");
  cmd->add_option_function<std::string>(
      "--preset", [&](const std::string& v) { opts.overrides.preset = v; },
      "Parameter preset: paper-apparatus or ideal");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(dynelab::kToolName) +
               " - adaptive/heterodyne phase measurement simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dynelab::kToolName) + " " +
                                        dynelab::kToolVersion);

  CliOptions opts;
  const char* subcommands[] = {"traj", "dist", "sweep", "polar"};
  const char* descriptions[] = {
      "Per-step trajectory records (photocurrent and LO phase)",
      "Estimator distributions and stats at one photon number",
      "Variance vs photon number comparison table",
      "Adaptive variance vs signal phase with heterodyne band"};
  for (int i = 0; i < 4; ++i) {
    add_common_options(app.add_subcommand(subcommands[i], descriptions[i]),
                       opts);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const std::string subcommand = app.get_subcommands().front()->get_name();
  try {
    const dynelab::ExperimentConfig config =
        dynelab::load_config(opts.config_path, opts.overrides);
    const dynelab::RunResult result = dynelab::run_command(subcommand, config);
    for (const auto& file : result.files) {
      std::cout << "wrote " << file.string() << '\n';
    }
    if (!result.errors.empty()) {
      for (const auto& err : result.errors) {
        std::cerr << "error: " << err << '\n';
      }
      return 2;
    }
    return 0;
  } catch (const dynelab::ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
}
