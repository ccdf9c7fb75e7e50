#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "dynelab/accumulators.hpp"
#include "dynelab/phase.hpp"
#include "dynelab/rng.hpp"

namespace dynelab {

// Flat-envelope coherent pulse on normalized time [0, 1]; the field amplitude
// is sqrt(mean_photon_number). duration_us is carried as metadata only.
struct PulseParams {
  double mean_photon_number = 0.0;
  PhaseAngle true_phase{};
  double duration_us = 50.0;
};

struct NoiseModel {
  double efficiency = 1.0;              // eta in (0, 1]
  double electronic_noise_ratio = 0.0;  // electronic-to-shot power ratio r
};

inline constexpr double kUnlimitedSlew = std::numeric_limits<double>::infinity();

struct LoopModel {
  double slew_limit = kUnlimitedSlew;  // radians per normalized time
  int delay_steps = 0;
  // nullopt draws the initial LO phase uniformly per trajectory.
  std::optional<PhaseAngle> initial_lo_phase;
};

struct AdaptiveDyne {};
struct Heterodyne {
  double beat_cycles = 90.0;
};
struct FixedLo {
  PhaseAngle phase{};
};
using Policy = std::variant<AdaptiveDyne, Heterodyne, FixedLo>;

std::string policy_name(const Policy& policy);
EstimatorKind headline_kind(const Policy& policy);

struct SimOptions {
  int n_steps = 4096;
  bool record_full = false;
  bool noise_free = false;  // forces every dW to zero (diagnostics)
};

struct TrajectoryRecord {
  int n_steps = 0;
  double dt = 0.0;
  std::vector<double> charges;    // I_k * dt, filled when record_full
  std::vector<double> lo_phases;  // Phi_k in radians, filled when record_full
  DyneAccumulators final_acc;
};

struct TrialEstimate {
  EstimateResult estimate;
  bool ambiguous = false;  // estimator was degenerate; phi_hat holds fallback
};

struct TrajectoryOutcome {
  TrajectoryRecord record;
  std::vector<TrialEstimate> estimates;
  PhaseAngle initial_lo_phase{};
};

// Balanced photocurrent charge over one step:
//   I*dt = 2*sqrt(eta*N)*cos(phi - Phi)*dt + sqrt(1 + r)*dW,  dW ~ N(0, dt).
// Exact for coherent inputs, including N near zero.
double photocurrent_increment(const PulseParams& pulse, const NoiseModel& noise,
                              PhaseAngle lo_phase, double dt, double dW);

// Rate-limited actuator: moves from previous toward commanded along the
// shorter arc by at most slew_limit*dt. An exactly antipodal command moves in
// the +phase direction.
PhaseAngle apply_actuator(PhaseAngle commanded, PhaseAngle previous,
                          const LoopModel& loop, double dt);

// Commanded LO phase at time t under each policy.
PhaseAngle lo_command(const Policy& policy, const DyneAccumulators& acc,
                      double t, PhaseAngle fallback);

// Closed-loop Euler-Maruyama run over n_steps. The command applied at step k
// was computed from data through step k - delay_steps - 1; until a command
// exists the initial LO phase holds. Degenerate estimators are reported as
// ambiguous outcomes carrying the initial LO phase, never as failures.
TrajectoryOutcome simulate_trajectory(const PulseParams& pulse,
                                      const NoiseModel& noise,
                                      const LoopModel& loop,
                                      const Policy& policy,
                                      const SimOptions& options,
                                      RngStream& rng);

// Parameter validation shared by the engine and the config loader; throws
// std::domain_error naming the offending field.
void validate(const PulseParams& pulse);
void validate(const NoiseModel& noise);
void validate(const LoopModel& loop);
void validate(const Policy& policy);
void validate(const SimOptions& options);

}  // namespace dynelab
