#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynelab/engine.hpp"
#include "dynelab/stats.hpp"

namespace dynelab {

enum class PhaseRule { Fixed, RandomPerEnsemble };
enum class Weighting { PerEnsemble, PerTrial };

// Stream-index layout: trial streams count up from 0 (offset by ensemble and
// point so every trajectory has a unique stream), while meta draws such as
// the per-ensemble signal phase live in a disjoint high block.
inline constexpr std::uint64_t kMetaStreamBase = 1ULL << 63;
inline constexpr std::uint64_t kMaxEnsemblesPerPoint = 4096;

struct EnsembleConfig {
  PulseParams pulse;
  NoiseModel noise;
  LoopModel loop;
  SimOptions sim;
  int trials = 150;
  int workers = 1;
  std::uint64_t stream_offset = 0;
};

struct KindSamples {
  EstimatorKind kind = EstimatorKind::MarkI;
  EstimateSet set;
};

// Runs `trials` independent trajectories (stream indices stream_offset ...
// stream_offset + trials - 1) under one policy at a fixed signal phase and
// collects every estimator kind the policy produces. Aggregation is keyed by
// trial index, so results are identical for any worker count.
std::vector<KindSamples> run_ensemble(const EnsembleConfig& config,
                                      const Policy& policy,
                                      std::uint64_t master_seed);

// Summary of one experiment point (one N or one signal phase) built from
// `ensembles` consecutive ensembles.
struct PointSummary {
  EstimatorKind kind = EstimatorKind::MarkI;
  long long trials_total = 0;
  int ensembles = 0;
  int degenerate_ensembles = 0;
  long long ambiguous_count = 0;
  double wrapped_variance = 0.0;     // weighting rule applied
  double wrapped_variance_se = 0.0;  // batch SE across ensembles
  double holevo_variance = 0.0;
  std::vector<double> ensemble_wrapped;   // per-ensemble wrapped variances
  std::vector<double> pooled_deviations;  // wrap(phi - ensemble mean), pooled
};

struct PointConfig {
  EnsembleConfig base;  // base.trials = trials per ensemble
  int ensembles = 20;
  PhaseRule phase_rule = PhaseRule::RandomPerEnsemble;
  Weighting weighting = Weighting::PerEnsemble;
  std::uint64_t point_index = 0;  // decorrelates meta draws across points
};

// Signal phase used by ensemble e at this point under the phase rule.
PhaseAngle ensemble_signal_phase(const PointConfig& config, int ensemble_index,
                                 std::uint64_t master_seed);

std::vector<PointSummary> run_point(const PointConfig& config,
                                    const Policy& policy,
                                    std::uint64_t master_seed);

struct SweepPolicyResult {
  Policy policy;
  PointSummary summary;  // headline estimator for the policy
};

struct SweepRow {
  double mean_photon_number = 0.0;
  std::vector<SweepPolicyResult> results;
  ReferenceCurves references;
  std::vector<std::string> errors;  // per-policy failures, row kept
};

// One row per grid value comparing the given policies; row failures are
// recorded without aborting the remaining rows.
std::vector<SweepRow> sweep_photon_number(const PointConfig& config,
                                          const std::vector<Policy>& policies,
                                          const std::vector<double>& grid,
                                          std::uint64_t master_seed);

}  // namespace dynelab
