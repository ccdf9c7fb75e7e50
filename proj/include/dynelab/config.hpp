#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynelab/ensemble.hpp"
#include "dynelab/engine.hpp"

namespace dynelab {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class OutputFormat { Csv, JsonLines };

std::string format_name(OutputFormat format);

// Fully resolved experiment description. Every run is a pure function of
// this struct plus the master seed, regardless of worker count.
struct ExperimentConfig {
  PulseParams pulse;
  NoiseModel noise;
  LoopModel loop;
  std::vector<Policy> policies;
  int n_steps = 4096;
  bool noise_free = false;
  int trials = 150;
  int ensembles = 20;
  PhaseRule phase_rule = PhaseRule::RandomPerEnsemble;
  Weighting weighting = Weighting::PerEnsemble;
  std::uint64_t master_seed = 42;
  int histogram_bins = 64;
  int trajectories = 3;                          // traj subcommand
  int phase_points = 12;                         // polar subcommand
  std::vector<double> photon_grid = {10.0, 50.0, 300.0};  // sweep subcommand
  std::string out_dir = "out";
  OutputFormat format = OutputFormat::Csv;
  int workers = 0;  // 0 = DYNELAB_WORKERS env var, else hardware concurrency
};

// Optional command-line overrides applied on top of the file contents.
struct ConfigOverrides {
  std::optional<std::uint64_t> master_seed;
  std::optional<int> trials;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  std::optional<std::string> preset;
};

// Parses, applies preset + overrides, fills defaults and validates. Error
// messages name the offending key. Unknown keys are rejected.
ExperimentConfig load_config_text(const std::string& text,
                                  const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             const ConfigOverrides& overrides = {});

// Serializes back to the accepted schema; load_config_text on the result
// reproduces the same configuration.
std::string config_to_json_text(const ExperimentConfig& config);

// Worker count used for execution (resolves 0 via environment/hardware).
int effective_workers(const ExperimentConfig& config);

}  // namespace dynelab
