// Config schema (JSON). All keys optional; unknown keys are rejected.
//
// {
//   "preset": "ideal" | "paper-apparatus",
//   "pulse": {"mean_photon_number": 50.0, "true_phase": 0.0,
//             "duration_us": 50.0},
//   "noise": {"efficiency": 1.0, "electronic_noise_ratio": 0.0},
//   "loop":  {"slew_limit": "inf" | 75.0, "delay_steps": 0,
//             "initial_lo_phase": "random" | 0.4},
//   "policies": ["adaptive", "heterodyne", "fixed"],
//   "heterodyne_beat_cycles": 90.0,
//   "fixed_lo_phase": 0.0,
//   "n_steps": 4096, "noise_free": false,
//   "trials": 150, "ensembles": 20,
//   "phase_assignment": "random-per-ensemble" | "fixed",
//   "ensemble_weighting": "per-ensemble" | "per-trial",
//   "master_seed": 42,
//   "histogram_bins": 64, "trajectories": 3, "phase_points": 12,
//   "photon_grid": [10.0, 50.0, 300.0],
//   "out_dir": "out", "format": "csv" | "jsonl", "workers": 0
// }

#include "dynelab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dynelab/parallel.hpp"

namespace dynelab {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown_keys(const json& node, const std::string& scope,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, value] : node.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key: " + (scope.empty() ? key : scope + "." + key));
    }
  }
}

double require_number(const json& node, const std::string& key) {
  if (!node.is_number()) {
    throw ConfigError(key + ": expected a number");
  }
  const double v = node.get<double>();
  if (!std::isfinite(v)) {
    throw ConfigError(key + ": must be finite");
  }
  return v;
}

int require_int(const json& node, const std::string& key) {
  if (!node.is_number_integer()) {
    throw ConfigError(key + ": expected an integer");
  }
  return node.get<int>();
}

PhaseAngle require_phase(const json& node, const std::string& key) {
  return wrap_phase(require_number(node, key));
}

void apply_preset(ExperimentConfig& config, double& beat_cycles,
                  const std::string& preset) {
  if (preset == "ideal") {
    config.noise = NoiseModel{1.0, 0.0};
    config.loop.slew_limit = kUnlimitedSlew;
    config.loop.delay_steps = 0;
  } else if (preset == "paper-apparatus") {
    // 6 dB of shot noise over electronic noise, 1.5 MHz x 50 us slew
    // product, 1.8 MHz x 50 us heterodyne detuning, 150-shot ensembles.
    config.noise.electronic_noise_ratio = std::pow(10.0, -6.0 / 10.0);
    config.loop.slew_limit = 75.0;
    beat_cycles = 90.0;
    config.trials = 150;
  } else {
    throw ConfigError("preset: unknown preset '" + preset + "'");
  }
}

}  // namespace

std::string format_name(OutputFormat format) {
  return format == OutputFormat::Csv ? "csv" : "jsonl";
}

ExperimentConfig load_config_text(const std::string& text,
                                  const ConfigOverrides& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config parse error: ") + err.what());
  }
  if (!root.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }

  reject_unknown_keys(
      root, "",
      {"preset", "pulse", "noise", "loop", "policies",
       "heterodyne_beat_cycles", "fixed_lo_phase", "n_steps", "noise_free",
       "trials", "ensembles", "phase_assignment", "ensemble_weighting",
       "master_seed", "histogram_bins", "trajectories", "phase_points",
       "photon_grid", "out_dir", "format", "workers"});

  ExperimentConfig config;
  double beat_cycles = 90.0;
  PhaseAngle fixed_lo_phase = wrap_phase(0.0);
  std::vector<std::string> policy_names = {"adaptive", "heterodyne"};

  // Preset first (command line wins over the file), then explicit keys.
  std::string preset;
  if (root.contains("preset")) {
    if (!root["preset"].is_string()) {
      throw ConfigError("preset: expected a string");
    }
    preset = root["preset"].get<std::string>();
  }
  if (overrides.preset) {
    preset = *overrides.preset;
  }
  if (!preset.empty()) {
    apply_preset(config, beat_cycles, preset);
  }

  if (root.contains("pulse")) {
    const json& pulse = root["pulse"];
    if (!pulse.is_object()) {
      throw ConfigError("pulse: expected an object");
    }
    reject_unknown_keys(pulse, "pulse",
                        {"mean_photon_number", "true_phase", "duration_us"});
    if (pulse.contains("mean_photon_number")) {
      config.pulse.mean_photon_number =
          require_number(pulse["mean_photon_number"], "pulse.mean_photon_number");
    }
    if (pulse.contains("true_phase")) {
      config.pulse.true_phase =
          require_phase(pulse["true_phase"], "pulse.true_phase");
    }
    if (pulse.contains("duration_us")) {
      config.pulse.duration_us =
          require_number(pulse["duration_us"], "pulse.duration_us");
    }
  }

  if (root.contains("noise")) {
    const json& noise = root["noise"];
    if (!noise.is_object()) {
      throw ConfigError("noise: expected an object");
    }
    reject_unknown_keys(noise, "noise",
                        {"efficiency", "electronic_noise_ratio"});
    if (noise.contains("efficiency")) {
      config.noise.efficiency =
          require_number(noise["efficiency"], "noise.efficiency");
    }
    if (noise.contains("electronic_noise_ratio")) {
      config.noise.electronic_noise_ratio = require_number(
          noise["electronic_noise_ratio"], "noise.electronic_noise_ratio");
    }
  }

  if (root.contains("loop")) {
    const json& loop = root["loop"];
    if (!loop.is_object()) {
      throw ConfigError("loop: expected an object");
    }
    reject_unknown_keys(loop, "loop",
                        {"slew_limit", "delay_steps", "initial_lo_phase"});
    if (loop.contains("slew_limit")) {
      const json& slew = loop["slew_limit"];
      if (slew.is_string() && slew.get<std::string>() == "inf") {
        config.loop.slew_limit = kUnlimitedSlew;
      } else {
        config.loop.slew_limit = require_number(slew, "loop.slew_limit");
      }
    }
    if (loop.contains("delay_steps")) {
      config.loop.delay_steps =
          require_int(loop["delay_steps"], "loop.delay_steps");
    }
    if (loop.contains("initial_lo_phase")) {
      const json& initial = loop["initial_lo_phase"];
      if (initial.is_string() && initial.get<std::string>() == "random") {
        config.loop.initial_lo_phase.reset();
      } else {
        config.loop.initial_lo_phase =
            require_phase(initial, "loop.initial_lo_phase");
      }
    }
  }

  if (root.contains("policies")) {
    const json& policies = root["policies"];
    if (!policies.is_array() || policies.empty()) {
      throw ConfigError("policies: expected a nonempty array of names");
    }
    policy_names.clear();
    for (const json& p : policies) {
      if (!p.is_string()) {
        throw ConfigError("policies: entries must be strings");
      }
      policy_names.push_back(p.get<std::string>());
    }
  }
  if (root.contains("heterodyne_beat_cycles")) {
    beat_cycles =
        require_number(root["heterodyne_beat_cycles"], "heterodyne_beat_cycles");
  }
  if (root.contains("fixed_lo_phase")) {
    fixed_lo_phase = require_phase(root["fixed_lo_phase"], "fixed_lo_phase");
  }

  if (root.contains("n_steps")) {
    config.n_steps = require_int(root["n_steps"], "n_steps");
  }
  if (root.contains("noise_free")) {
    if (!root["noise_free"].is_boolean()) {
      throw ConfigError("noise_free: expected a boolean");
    }
    config.noise_free = root["noise_free"].get<bool>();
  }
  if (root.contains("trials")) {
    config.trials = require_int(root["trials"], "trials");
  }
  if (root.contains("ensembles")) {
    config.ensembles = require_int(root["ensembles"], "ensembles");
  }
  if (root.contains("phase_assignment")) {
    const std::string rule = root["phase_assignment"].is_string()
                                 ? root["phase_assignment"].get<std::string>()
                                 : std::string();
    if (rule == "fixed") {
      config.phase_rule = PhaseRule::Fixed;
    } else if (rule == "random-per-ensemble") {
      config.phase_rule = PhaseRule::RandomPerEnsemble;
    } else {
      throw ConfigError(
          "phase_assignment: expected 'fixed' or 'random-per-ensemble'");
    }
  }
  if (root.contains("ensemble_weighting")) {
    const std::string rule = root["ensemble_weighting"].is_string()
                                 ? root["ensemble_weighting"].get<std::string>()
                                 : std::string();
    if (rule == "per-ensemble") {
      config.weighting = Weighting::PerEnsemble;
    } else if (rule == "per-trial") {
      config.weighting = Weighting::PerTrial;
    } else {
      throw ConfigError(
          "ensemble_weighting: expected 'per-ensemble' or 'per-trial'");
    }
  }
  if (root.contains("master_seed")) {
    if (!root["master_seed"].is_number_unsigned() &&
        !root["master_seed"].is_number_integer()) {
      throw ConfigError("master_seed: expected an integer");
    }
    config.master_seed = root["master_seed"].get<std::uint64_t>();
  }
  if (root.contains("histogram_bins")) {
    config.histogram_bins = require_int(root["histogram_bins"], "histogram_bins");
  }
  if (root.contains("trajectories")) {
    config.trajectories = require_int(root["trajectories"], "trajectories");
  }
  if (root.contains("phase_points")) {
    config.phase_points = require_int(root["phase_points"], "phase_points");
  }
  if (root.contains("photon_grid")) {
    const json& grid = root["photon_grid"];
    if (!grid.is_array() || grid.empty()) {
      throw ConfigError("photon_grid: expected a nonempty array");
    }
    config.photon_grid.clear();
    for (const json& v : grid) {
      config.photon_grid.push_back(require_number(v, "photon_grid"));
    }
  }
  if (root.contains("out_dir")) {
    if (!root["out_dir"].is_string()) {
      throw ConfigError("out_dir: expected a string");
    }
    config.out_dir = root["out_dir"].get<std::string>();
  }
  if (root.contains("format")) {
    const std::string fmt = root["format"].is_string()
                                ? root["format"].get<std::string>()
                                : std::string();
    if (fmt == "csv") {
      config.format = OutputFormat::Csv;
    } else if (fmt == "jsonl") {
      config.format = OutputFormat::JsonLines;
    } else {
      throw ConfigError("format: expected 'csv' or 'jsonl'");
    }
  }
  if (root.contains("workers")) {
    config.workers = require_int(root["workers"], "workers");
  }

  // Command-line overrides.
  if (overrides.master_seed) {
    config.master_seed = *overrides.master_seed;
  }
  if (overrides.trials) {
    config.trials = *overrides.trials;
  }
  if (overrides.workers) {
    config.workers = *overrides.workers;
  }
  if (overrides.out_dir) {
    config.out_dir = *overrides.out_dir;
  }
  if (overrides.format) {
    if (*overrides.format == "csv") {
      config.format = OutputFormat::Csv;
    } else if (*overrides.format == "jsonl") {
      config.format = OutputFormat::JsonLines;
    } else {
      throw ConfigError("format: expected 'csv' or 'jsonl'");
    }
  }

  // Assemble the policy set.
  std::set<std::string> seen;
  config.policies.clear();
  for (const std::string& name : policy_names) {
    if (!seen.insert(name).second) {
      throw ConfigError("policies: duplicate entry '" + name + "'");
    }
    if (name == "adaptive") {
      config.policies.push_back(AdaptiveDyne{});
    } else if (name == "heterodyne") {
      config.policies.push_back(Heterodyne{beat_cycles});
    } else if (name == "fixed") {
      config.policies.push_back(FixedLo{fixed_lo_phase});
    } else {
      throw ConfigError("policies: unknown policy '" + name + "'");
    }
  }

  // Validation, with messages naming the config key.
  const auto check = [](const auto& value, const std::string& scope) {
    try {
      validate(value);
    } catch (const std::domain_error& err) {
      throw ConfigError(scope + ": " + err.what());
    }
  };
  check(config.pulse, "pulse");
  check(config.noise, "noise");
  check(config.loop, "loop");
  for (const Policy& p : config.policies) {
    check(p, "policies[" + policy_name(p) + "]");
  }
  if (config.n_steps < 2) {
    throw ConfigError("n_steps: must be >= 2");
  }
  if (config.trials < 2) {
    throw ConfigError("trials: must be >= 2");
  }
  if (config.ensembles < 1 ||
      static_cast<std::uint64_t>(config.ensembles) > kMaxEnsemblesPerPoint) {
    throw ConfigError("ensembles: must lie in [1, 4096]");
  }
  if (config.histogram_bins < 2) {
    throw ConfigError("histogram_bins: must be >= 2");
  }
  if (config.trajectories < 1) {
    throw ConfigError("trajectories: must be >= 1");
  }
  if (config.phase_points < 2) {
    throw ConfigError("phase_points: must be >= 2");
  }
  if (!std::is_sorted(config.photon_grid.begin(), config.photon_grid.end())) {
    throw ConfigError("photon_grid: must be sorted ascending");
  }
  for (double n : config.photon_grid) {
    if (!(n > 0.0)) {
      throw ConfigError("photon_grid: values must be > 0");
    }
  }
  if (config.workers < 0) {
    throw ConfigError("workers: must be >= 0");
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_config_text(buffer.str(), overrides);
}

std::string config_to_json_text(const ExperimentConfig& config) {
  ordered_json root;
  root["pulse"] = {{"mean_photon_number", config.pulse.mean_photon_number},
                   {"true_phase", config.pulse.true_phase.radians()},
                   {"duration_us", config.pulse.duration_us}};
  root["noise"] = {{"efficiency", config.noise.efficiency},
                   {"electronic_noise_ratio", config.noise.electronic_noise_ratio}};
  ordered_json loop;
  if (config.loop.slew_limit == kUnlimitedSlew) {
    loop["slew_limit"] = "inf";
  } else {
    loop["slew_limit"] = config.loop.slew_limit;
  }
  loop["delay_steps"] = config.loop.delay_steps;
  if (config.loop.initial_lo_phase) {
    loop["initial_lo_phase"] = config.loop.initial_lo_phase->radians();
  } else {
    loop["initial_lo_phase"] = "random";
  }
  root["loop"] = loop;

  ordered_json names = ordered_json::array();
  double beat_cycles = 90.0;
  double fixed_phase = 0.0;
  for (const Policy& p : config.policies) {
    names.push_back(policy_name(p));
    if (const auto* het = std::get_if<Heterodyne>(&p)) {
      beat_cycles = het->beat_cycles;
    }
    if (const auto* fixed = std::get_if<FixedLo>(&p)) {
      fixed_phase = fixed->phase.radians();
    }
  }
  root["policies"] = names;
  root["heterodyne_beat_cycles"] = beat_cycles;
  root["fixed_lo_phase"] = fixed_phase;
  root["n_steps"] = config.n_steps;
  root["noise_free"] = config.noise_free;
  root["trials"] = config.trials;
  root["ensembles"] = config.ensembles;
  root["phase_assignment"] = config.phase_rule == PhaseRule::Fixed
                                 ? "fixed"
                                 : "random-per-ensemble";
  root["ensemble_weighting"] = config.weighting == Weighting::PerEnsemble
                                   ? "per-ensemble"
                                   : "per-trial";
  root["master_seed"] = config.master_seed;
  root["histogram_bins"] = config.histogram_bins;
  root["trajectories"] = config.trajectories;
  root["phase_points"] = config.phase_points;
  root["photon_grid"] = config.photon_grid;
  root["out_dir"] = config.out_dir;
  root["format"] = format_name(config.format);
  root["workers"] = config.workers;
  return root.dump(2);
}

int effective_workers(const ExperimentConfig& config) {
  if (config.workers > 0) {
    return config.workers;
  }
  if (const char* env = std::getenv("DYNELAB_WORKERS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) {
      return parsed;
    }
  }
  return resolve_workers(0);
}

}  // namespace dynelab
