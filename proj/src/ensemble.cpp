#include "dynelab/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dynelab/parallel.hpp"

namespace dynelab {

std::vector<KindSamples> run_ensemble(const EnsembleConfig& config,
                                      const Policy& policy,
                                      std::uint64_t master_seed) {
  if (config.trials < 2) {
    throw std::domain_error("run_ensemble: trials must be >= 2");
  }
  validate(config.pulse);
  validate(config.noise);
  validate(config.loop);
  validate(policy);
  validate(config.sim);

  const bool heterodyne = std::holds_alternative<Heterodyne>(policy);
  std::vector<KindSamples> out;
  if (heterodyne) {
    out.push_back({EstimatorKind::IQ, {}});
  } else {
    out.push_back({EstimatorKind::MarkI, {}});
    out.push_back({EstimatorKind::MarkII, {}});
  }

  const std::size_t trials = static_cast<std::size_t>(config.trials);
  // One slot per (trial, kind); workers fill disjoint slots.
  std::vector<std::vector<EstimateSample>> slots(
      out.size(), std::vector<EstimateSample>(trials));

  parallel_for(trials, config.workers, [&](std::size_t t) {
    RngStream rng(master_seed,
                  config.stream_offset + static_cast<std::uint64_t>(t));
    const TrajectoryOutcome traj = simulate_trajectory(
        config.pulse, config.noise, config.loop, policy, config.sim, rng);
    for (const TrialEstimate& e : traj.estimates) {
      for (std::size_t k = 0; k < out.size(); ++k) {
        if (out[k].kind == e.estimate.kind) {
          slots[k][t] = EstimateSample{
              config.stream_offset + static_cast<std::uint64_t>(t),
              e.estimate.phi_hat.radians(), e.ambiguous};
        }
      }
    }
  });

  for (std::size_t k = 0; k < out.size(); ++k) {
    for (const EstimateSample& s : slots[k]) {
      out[k].set.add(s);
    }
  }
  return out;
}

PhaseAngle ensemble_signal_phase(const PointConfig& config, int ensemble_index,
                                 std::uint64_t master_seed) {
  if (config.phase_rule == PhaseRule::Fixed) {
    return config.base.pulse.true_phase;
  }
  RngStream meta(master_seed,
                 kMetaStreamBase +
                     config.point_index * kMaxEnsemblesPerPoint +
                     static_cast<std::uint64_t>(ensemble_index));
  return meta.uniform_phase();
}

std::vector<PointSummary> run_point(const PointConfig& config,
                                    const Policy& policy,
                                    std::uint64_t master_seed) {
  if (config.ensembles < 1 ||
      static_cast<std::uint64_t>(config.ensembles) > kMaxEnsemblesPerPoint) {
    throw std::domain_error("run_point: ensembles out of range");
  }

  std::vector<PointSummary> summaries;
  for (int e = 0; e < config.ensembles; ++e) {
    EnsembleConfig ens = config.base;
    ens.pulse.true_phase = ensemble_signal_phase(config, e, master_seed);
    ens.stream_offset =
        config.base.stream_offset +
        static_cast<std::uint64_t>(e) * static_cast<std::uint64_t>(ens.trials);

    const std::vector<KindSamples> kinds =
        run_ensemble(ens, policy, master_seed);
    if (summaries.empty()) {
      summaries.resize(kinds.size());
      for (std::size_t k = 0; k < kinds.size(); ++k) {
        summaries[k].kind = kinds[k].kind;
      }
    }

    for (std::size_t k = 0; k < kinds.size(); ++k) {
      PointSummary& sum = summaries[k];
      const std::vector<double> phases = kinds[k].set.phases();
      sum.trials_total += static_cast<long long>(phases.size());
      ++sum.ensembles;
      for (const EstimateSample& s : kinds[k].set.samples()) {
        if (s.ambiguous) {
          ++sum.ambiguous_count;
        }
      }
      try {
        const PhaseAngle mean = circular_mean(phases);
        const std::vector<double> devs = wrapped_deviations(phases, mean);
        double ss = 0.0;
        for (double d : devs) {
          ss += d * d;
        }
        sum.ensemble_wrapped.push_back(ss / static_cast<double>(devs.size()));
        sum.holevo_variance += holevo_variance(phases);
        sum.pooled_deviations.insert(sum.pooled_deviations.end(), devs.begin(),
                                     devs.end());
      } catch (const DegenerateMean&) {
        ++sum.degenerate_ensembles;
      }
    }
  }

  for (PointSummary& sum : summaries) {
    const std::size_t usable = sum.ensemble_wrapped.size();
    if (usable == 0) {
      throw DegenerateMean("run_point: every ensemble mean was degenerate");
    }
    if (config.weighting == Weighting::PerEnsemble) {
      double total = 0.0;
      for (double v : sum.ensemble_wrapped) {
        total += v;
      }
      sum.wrapped_variance = total / static_cast<double>(usable);
    } else {
      double ss = 0.0;
      for (double d : sum.pooled_deviations) {
        ss += d * d;
      }
      sum.wrapped_variance =
          ss / static_cast<double>(sum.pooled_deviations.size());
    }
    sum.holevo_variance /= static_cast<double>(usable);
    sum.wrapped_variance_se =
        usable >= 2 ? batch_standard_error(sum.ensemble_wrapped) : 0.0;
  }
  return summaries;
}

namespace {

PointSummary headline_summary(std::vector<PointSummary> summaries,
                              EstimatorKind kind) {
  for (PointSummary& s : summaries) {
    if (s.kind == kind) {
      return std::move(s);
    }
  }
  throw std::logic_error("headline estimator missing from point summaries");
}

}  // namespace

std::vector<SweepRow> sweep_photon_number(const PointConfig& config,
                                          const std::vector<Policy>& policies,
                                          const std::vector<double>& grid,
                                          std::uint64_t master_seed) {
  if (grid.empty()) {
    throw std::domain_error("sweep_photon_number: empty photon-number grid");
  }
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw std::domain_error("sweep_photon_number: grid must be sorted");
  }
  for (double n : grid) {
    if (!(n > 0.0)) {
      throw std::domain_error("sweep_photon_number: grid values must be > 0");
    }
  }

  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SweepRow row;
    row.mean_photon_number = grid[i];
    row.references =
        reference_curves(grid[i], config.base.noise.efficiency,
                         config.base.noise.electronic_noise_ratio);
    for (const Policy& policy : policies) {
      PointConfig point = config;
      point.base.pulse.mean_photon_number = grid[i];
      point.point_index = config.point_index + i;
      try {
        row.results.push_back(
            {policy, headline_summary(run_point(point, policy, master_seed),
                                      headline_kind(policy))});
      } catch (const std::exception& err) {
        row.errors.push_back(policy_name(policy) + ": " + err.what());
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dynelab
