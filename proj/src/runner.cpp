#include "dynelab/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>

#include "dynelab/ensemble.hpp"
#include "dynelab/manifest.hpp"
#include "dynelab/output.hpp"
#include "dynelab/version.hpp"

namespace dynelab {

namespace {

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

PointConfig make_point_config(const ExperimentConfig& config) {
  PointConfig point;
  point.base.pulse = config.pulse;
  point.base.noise = config.noise;
  point.base.loop = config.loop;
  point.base.sim.n_steps = config.n_steps;
  point.base.sim.noise_free = config.noise_free;
  point.base.trials = config.trials;
  point.base.workers = effective_workers(config);
  point.ensembles = config.ensembles;
  point.phase_rule = config.phase_rule;
  point.weighting = config.weighting;
  return point;
}

PointSummary summary_for(std::vector<PointSummary> summaries,
                         EstimatorKind kind) {
  for (PointSummary& s : summaries) {
    if (s.kind == kind) {
      return std::move(s);
    }
  }
  throw std::logic_error("estimator kind missing from point summaries");
}

// Per-step records for a handful of trajectories under each policy.
Table run_traj(const ExperimentConfig& config) {
  Table table;
  table.columns = {"policy", "trajectory", "step", "time", "lo_phase",
                   "charge"};
  SimOptions sim{config.n_steps, true, config.noise_free};
  for (const Policy& policy : config.policies) {
    for (int j = 0; j < config.trajectories; ++j) {
      RngStream rng(config.master_seed, static_cast<std::uint64_t>(j));
      const TrajectoryOutcome traj =
          simulate_trajectory(config.pulse, config.noise, config.loop, policy,
                              sim, rng);
      for (int k = 0; k < traj.record.n_steps; ++k) {
        table.rows.push_back({policy_name(policy),
                              static_cast<std::int64_t>(j),
                              static_cast<std::int64_t>(k),
                              static_cast<double>(k) * traj.record.dt,
                              traj.record.lo_phases[static_cast<std::size_t>(k)],
                              traj.record.charges[static_cast<std::size_t>(k)]});
      }
    }
  }
  return table;
}

// Ensemble statistics and centered histograms per policy at one photon
// number.
void run_dist(const ExperimentConfig& config, Table& stats_table,
              Table& hist_table, std::vector<std::string>& errors) {
  stats_table.columns = {"policy",           "estimator",
                         "trials",           "ensembles",
                         "wrapped_variance", "stderr",
                         "holevo_variance",  "ambiguous_count",
                         "degenerate_ensembles"};
  hist_table.columns = {"policy", "estimator", "bin_lo", "bin_hi", "count",
                        "total"};
  const PointConfig point = make_point_config(config);
  for (const Policy& policy : config.policies) {
    try {
      const std::vector<PointSummary> summaries =
          run_point(point, policy, config.master_seed);
      for (const PointSummary& sum : summaries) {
        stats_table.rows.push_back(
            {policy_name(policy), estimator_name(sum.kind),
             static_cast<std::int64_t>(sum.trials_total),
             static_cast<std::int64_t>(sum.ensembles), sum.wrapped_variance,
             sum.wrapped_variance_se, sum.holevo_variance,
             static_cast<std::int64_t>(sum.ambiguous_count),
             static_cast<std::int64_t>(sum.degenerate_ensembles)});
        const Histogram hist =
            build_histogram(sum.pooled_deviations, wrap_phase(0.0),
                            config.histogram_bins);
        for (std::size_t b = 0; b < hist.counts.size(); ++b) {
          hist_table.rows.push_back(
              {policy_name(policy), estimator_name(sum.kind),
               hist.bin_edges[b], hist.bin_edges[b + 1],
               static_cast<std::uint64_t>(hist.counts[b]),
               static_cast<std::uint64_t>(hist.total)});
        }
      }
    } catch (const DegenerateMean& err) {
      errors.push_back(policy_name(policy) + ": " + err.what());
    }
  }
}

Table run_sweep(const ExperimentConfig& config,
                std::vector<std::string>& errors) {
  Table table;
  table.columns = {"N",      "policy",           "wrapped_variance",
                   "holevo_variance", "stderr",  "het_limit",
                   "fund_limit",      "ambiguous_count"};
  const PointConfig point = make_point_config(config);
  const std::vector<SweepRow> rows = sweep_photon_number(
      point, config.policies, config.photon_grid, config.master_seed);
  for (const SweepRow& row : rows) {
    for (const SweepPolicyResult& res : row.results) {
      table.rows.push_back({row.mean_photon_number, policy_name(res.policy),
                            res.summary.wrapped_variance,
                            res.summary.holevo_variance,
                            res.summary.wrapped_variance_se,
                            row.references.heterodyne_limit,
                            row.references.fundamental_limit,
                            static_cast<std::int64_t>(res.summary.ambiguous_count)});
    }
    errors.insert(errors.end(), row.errors.begin(), row.errors.end());
  }
  return table;
}

// Adaptive variance per signal phase, plus the heterodyne one-sigma band
// pooled across the same phases.
Table run_polar(const ExperimentConfig& config,
                std::vector<std::string>& errors) {
  Table table;
  table.columns = {"phase",     "wrapped_variance", "stderr",
                   "ensembles", "ambiguous_count",  "het_mean",
                   "het_lo",    "het_hi"};
  PointConfig point = make_point_config(config);
  point.phase_rule = PhaseRule::Fixed;  // fixed phase within each ensemble

  double beat_cycles = 90.0;
  for (const Policy& p : config.policies) {
    if (const auto* het = std::get_if<Heterodyne>(&p)) {
      beat_cycles = het->beat_cycles;
    }
  }

  struct PhaseRow {
    double phase;
    PointSummary adaptive;
  };
  std::vector<PhaseRow> rows;
  std::vector<double> het_variances;
  for (int i = 0; i < config.phase_points; ++i) {
    const PhaseAngle phase = wrap_phase(
        kTwoPi * static_cast<double>(i) / static_cast<double>(config.phase_points));
    point.base.pulse.true_phase = phase;
    point.point_index = static_cast<std::uint64_t>(i);
    try {
      PointSummary adaptive =
          summary_for(run_point(point, AdaptiveDyne{}, config.master_seed),
                      EstimatorKind::MarkII);
      const PointSummary het =
          summary_for(run_point(point, Heterodyne{beat_cycles},
                                config.master_seed),
                      EstimatorKind::IQ);
      het_variances.push_back(het.wrapped_variance);
      rows.push_back({phase.radians(), std::move(adaptive)});
    } catch (const DegenerateMean& err) {
      errors.push_back("phase " + format_double(phase.radians()) + ": " +
                       err.what());
    }
  }

  double het_mean = 0.0;
  double het_sd = 0.0;
  if (!het_variances.empty()) {
    for (double v : het_variances) {
      het_mean += v;
    }
    het_mean /= static_cast<double>(het_variances.size());
    double ss = 0.0;
    for (double v : het_variances) {
      ss += (v - het_mean) * (v - het_mean);
    }
    het_sd = het_variances.size() >= 2
                 ? std::sqrt(ss / static_cast<double>(het_variances.size() - 1))
                 : 0.0;
  }

  for (const PhaseRow& row : rows) {
    table.rows.push_back({row.phase, row.adaptive.wrapped_variance,
                          row.adaptive.wrapped_variance_se,
                          static_cast<std::int64_t>(row.adaptive.ensembles),
                          static_cast<std::int64_t>(row.adaptive.ambiguous_count),
                          het_mean, het_mean - het_sd, het_mean + het_sd});
  }
  return table;
}

}  // namespace

RunResult run_command(const std::string& subcommand,
                      const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = utc_timestamp();

  const std::filesystem::path out_dir = config.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory: " + out_dir.string());
  }

  RunResult result;
  std::vector<std::pair<std::string, Table>> tables;

  if (subcommand == "traj") {
    tables.emplace_back("traj", run_traj(config));
  } else if (subcommand == "dist") {
    Table stats_table;
    Table hist_table;
    run_dist(config, stats_table, hist_table, result.errors);
    tables.emplace_back("dist_stats", std::move(stats_table));
    tables.emplace_back("dist_hist", std::move(hist_table));
  } else if (subcommand == "sweep") {
    tables.emplace_back("sweep", run_sweep(config, result.errors));
  } else if (subcommand == "polar") {
    tables.emplace_back("polar", run_polar(config, result.errors));
  } else {
    throw ConfigError("unknown subcommand: " + subcommand);
  }

  RunManifest manifest;
  manifest.tool = std::string(kToolName) + " " + kToolVersion;
  manifest.command = subcommand;
  manifest.master_seed = config.master_seed;
  manifest.workers = effective_workers(config);
  manifest.config_json = config_to_json_text(config);
  manifest.errors = result.errors;
  manifest.started_utc = started_utc;

  for (const auto& [stem, table] : tables) {
    const std::filesystem::path path = table_path(out_dir, stem, config.format);
    write_table(table, config.format, path);
    manifest.outputs.push_back(
        OutputRecord{path.filename().string(),
                     std::filesystem::file_size(path),
                     [&] {
                       std::ostringstream hex;
                       hex << std::hex << fnv1a64_file(path);
                       return hex.str();
                     }()});
    result.files.push_back(path);
  }

  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  const std::filesystem::path manifest_path = out_dir / "manifest.json";
  write_manifest(manifest, manifest_path);
  result.files.push_back(manifest_path);
  return result;
}

}  // namespace dynelab
