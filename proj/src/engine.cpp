#include "dynelab/engine.hpp"

#include <cmath>

namespace dynelab {

std::string policy_name(const Policy& policy) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AdaptiveDyne>) {
          return "adaptive";
        } else if constexpr (std::is_same_v<T, Heterodyne>) {
          return "heterodyne";
        } else {
          return "fixed";
        }
      },
      policy);
}

EstimatorKind headline_kind(const Policy& policy) {
  if (std::holds_alternative<Heterodyne>(policy)) {
    return EstimatorKind::IQ;
  }
  if (std::holds_alternative<FixedLo>(policy)) {
    return EstimatorKind::MarkI;
  }
  return EstimatorKind::MarkII;
}

double photocurrent_increment(const PulseParams& pulse, const NoiseModel& noise,
                              PhaseAngle lo_phase, double dt, double dW) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::domain_error("photocurrent_increment: dt must be positive");
  }
  const double amplitude =
      2.0 * std::sqrt(noise.efficiency * pulse.mean_photon_number);
  const double detuning = pulse.true_phase.radians() - lo_phase.radians();
  return amplitude * std::cos(detuning) * dt +
         std::sqrt(1.0 + noise.electronic_noise_ratio) * dW;
}

PhaseAngle apply_actuator(PhaseAngle commanded, PhaseAngle previous,
                          const LoopModel& loop, double dt) {
  if (!(dt > 0.0)) {
    throw std::domain_error("apply_actuator: dt must be positive");
  }
  if (loop.slew_limit == kUnlimitedSlew) {
    return commanded;
  }
  const double gap = phase_difference(commanded, previous);
  const double max_move = loop.slew_limit * dt;
  if (std::abs(gap) <= max_move) {
    return commanded;
  }
  // gap = +pi for an antipodal command, so the tie moves in +phase.
  const double direction = (gap >= 0.0) ? 1.0 : -1.0;
  return wrap_phase(previous.radians() + direction * max_move);
}

PhaseAngle lo_command(const Policy& policy, const DyneAccumulators& acc,
                      double t, PhaseAngle fallback) {
  if (t < 0.0 || t > 1.0 + kElapsedTolerance) {
    throw std::domain_error("lo_command: t outside [0, 1]");
  }
  return std::visit(
      [&](const auto& p) -> PhaseAngle {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AdaptiveDyne>) {
          return feedback_phase(acc, fallback);
        } else if constexpr (std::is_same_v<T, Heterodyne>) {
          return wrap_phase(fallback.radians() + kTwoPi * p.beat_cycles * t);
        } else {
          return p.phase;
        }
      },
      policy);
}

void validate(const PulseParams& pulse) {
  if (!(pulse.mean_photon_number >= 0.0) ||
      !std::isfinite(pulse.mean_photon_number)) {
    throw std::domain_error("mean_photon_number must be >= 0");
  }
  if (!(pulse.duration_us > 0.0)) {
    throw std::domain_error("duration_us must be > 0");
  }
}

void validate(const NoiseModel& noise) {
  if (!(noise.efficiency > 0.0) || noise.efficiency > 1.0) {
    throw std::domain_error("efficiency must lie in (0, 1]");
  }
  if (!(noise.electronic_noise_ratio >= 0.0) ||
      !std::isfinite(noise.electronic_noise_ratio)) {
    throw std::domain_error("electronic_noise_ratio must be >= 0");
  }
}

void validate(const LoopModel& loop) {
  if (!(loop.slew_limit > 0.0)) {
    throw std::domain_error("slew_limit must be > 0");
  }
  if (loop.delay_steps < 0) {
    throw std::domain_error("delay_steps must be >= 0");
  }
}

void validate(const Policy& policy) {
  if (const auto* het = std::get_if<Heterodyne>(&policy)) {
    if (!(het->beat_cycles > 0.0) || !std::isfinite(het->beat_cycles)) {
      throw std::domain_error("beat_cycles must be > 0");
    }
  }
}

void validate(const SimOptions& options) {
  if (options.n_steps < 2) {
    throw std::domain_error("n_steps must be >= 2");
  }
}

TrajectoryOutcome simulate_trajectory(const PulseParams& pulse,
                                      const NoiseModel& noise,
                                      const LoopModel& loop,
                                      const Policy& policy,
                                      const SimOptions& options,
                                      RngStream& rng) {
  validate(pulse);
  validate(noise);
  validate(loop);
  validate(policy);
  validate(options);

  const int n = options.n_steps;
  const double dt = 1.0 / static_cast<double>(n);
  const double sqrt_dt = std::sqrt(dt);

  const PhaseAngle initial =
      loop.initial_lo_phase ? *loop.initial_lo_phase : rng.uniform_phase();
  const PhaseAngle fallback = initial;

  TrajectoryOutcome out;
  out.initial_lo_phase = initial;
  out.record.n_steps = n;
  out.record.dt = dt;
  if (options.record_full) {
    out.record.charges.reserve(static_cast<std::size_t>(n));
    out.record.lo_phases.reserve(static_cast<std::size_t>(n));
  }

  std::vector<PhaseAngle> commands(static_cast<std::size_t>(n));
  DyneAccumulators acc;
  PhaseAngle lo_prev = initial;

  for (int k = 0; k < n; ++k) {
    const int source = k - loop.delay_steps - 1;
    const PhaseAngle target =
        (source >= 0) ? commands[static_cast<std::size_t>(source)] : initial;
    const PhaseAngle lo = apply_actuator(target, lo_prev, loop, dt);

    const double dW = options.noise_free ? 0.0 : rng.normal() * sqrt_dt;
    const double charge = photocurrent_increment(pulse, noise, lo, dt, dW);
    acc = accumulate_step(acc, charge, lo, dt);

    commands[static_cast<std::size_t>(k)] =
        lo_command(policy, acc, static_cast<double>(k + 1) * dt, fallback);
    lo_prev = lo;

    if (options.record_full) {
      out.record.charges.push_back(charge);
      out.record.lo_phases.push_back(lo.radians());
    }
  }
  out.record.final_acc = acc;

  const auto push = [&](EstimatorKind kind,
                        EstimateResult (*estimator)(const DyneAccumulators&)) {
    try {
      out.estimates.push_back({estimator(acc), false});
    } catch (const AmbiguousEstimate&) {
      out.estimates.push_back({EstimateResult{fallback, 0.0, kind}, true});
    }
  };
  if (std::holds_alternative<Heterodyne>(policy)) {
    push(EstimatorKind::IQ, &estimate_iq);
  } else {
    push(EstimatorKind::MarkI, &estimate_mark1);
    push(EstimatorKind::MarkII, &estimate_mark2);
  }
  return out;
}

}  // namespace dynelab
