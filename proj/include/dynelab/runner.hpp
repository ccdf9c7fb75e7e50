#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dynelab/config.hpp"

namespace dynelab {

struct RunResult {
  std::vector<std::filesystem::path> files;  // data files plus manifest.json
  std::vector<std::string> errors;           // ensemble-level failures
};

// Executes one subcommand (traj | dist | sweep | polar), writing the data
// files and a manifest.json into config.out_dir. Throws ConfigError for an
// unknown subcommand and IoError for filesystem failures; recoverable
// per-row errors are returned (and recorded in the manifest) instead.
RunResult run_command(const std::string& subcommand,
                      const ExperimentConfig& config);

}  // namespace dynelab
