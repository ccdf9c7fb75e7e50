#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dynelab/engine.hpp"
#include "dynelab/significance.hpp"
#include "dynelab/stats.hpp"

using namespace dynelab;

namespace {

// Replays a recorded trajectory through the pure accumulator path and
// returns the command sequence the controller must have produced.
std::vector<double> replay_commands(const TrajectoryOutcome& out,
                                    const Policy& policy) {
  DyneAccumulators acc;
  std::vector<double> commands;
  const double dt = out.record.dt;
  for (int k = 0; k < out.record.n_steps; ++k) {
    acc = accumulate_step(acc, out.record.charges[static_cast<std::size_t>(k)],
                          wrap_phase(out.record.lo_phases[static_cast<std::size_t>(k)]),
                          dt);
    commands.push_back(
        lo_command(policy, acc, static_cast<double>(k + 1) * dt,
                   out.initial_lo_phase)
            .radians());
  }
  return commands;
}

}  // namespace

TEST_CASE("photocurrent_increment matches the affine model") {
  PulseParams vacuum;
  NoiseModel ideal;
  CHECK(photocurrent_increment(vacuum, ideal, wrap_phase(0.3), 0.01, 0.0) ==
        0.0);

  PulseParams pulse;
  pulse.mean_photon_number = 4.0;
  pulse.true_phase = wrap_phase(0.9);
  CHECK(photocurrent_increment(pulse, ideal, wrap_phase(0.9), 0.01, 0.0) ==
        doctest::Approx(0.04));

  CHECK_THROWS_AS(photocurrent_increment(pulse, ideal, wrap_phase(0.0), 0.0, 0.0),
                  std::domain_error);
}

TEST_CASE("photocurrent_increment variance matches (1+r)*dt") {
  // Monte Carlo oracle: sample statistics of the vacuum increment.
  PulseParams vacuum;
  NoiseModel noise;
  noise.electronic_noise_ratio = 0.25;
  const double dt = 0.01;
  RngStream rng(99, 0);
  const int n = 1'000'000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dW = rng.normal() * std::sqrt(dt);
    const double q =
        photocurrent_increment(vacuum, noise, wrap_phase(0.0), dt, dW);
    sum += q;
    sum_sq += q * q;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  const double expected = (1.0 + noise.electronic_noise_ratio) * dt;
  // Var of the sample variance is ~ 2 var^2 / n for Gaussian data.
  const double se = expected * std::sqrt(2.0 / n);
  CHECK(std::abs(var - expected) < 4.0 * se);
}

TEST_CASE("apply_actuator rate limiting") {
  LoopModel unlimited;
  CHECK(apply_actuator(wrap_phase(2.0), wrap_phase(-1.0), unlimited, 0.01)
            .radians() == doctest::Approx(2.0));

  LoopModel slow;
  slow.slew_limit = 10.0;
  SUBCASE("antipodal command moves in +phase") {
    CHECK(apply_actuator(wrap_phase(kPi), wrap_phase(0.0), slow, 0.01)
              .radians() == doctest::Approx(0.1));
  }
  SUBCASE("within-slew step completes") {
    CHECK(apply_actuator(wrap_phase(0.05), wrap_phase(0.0), slow, 0.01)
              .radians() == doctest::Approx(0.05));
  }
  SUBCASE("moves along the shorter arc") {
    // From +3.0 to -3.0 the short way is through +pi.
    const PhaseAngle next =
        apply_actuator(wrap_phase(-3.0), wrap_phase(3.0), slow, 0.01);
    CHECK(next.radians() == doctest::Approx(3.1));
  }
}

TEST_CASE("lo_command per policy") {
  DyneAccumulators acc;
  const PhaseAngle fallback = wrap_phase(0.0);
  SUBCASE("heterodyne ramp") {
    // t = 0.25 puts the ramp at 45*pi, i.e. the +pi point of the circle.
    const PhaseAngle ramp = lo_command(Heterodyne{90.0}, acc, 0.25, fallback);
    CHECK(std::abs(phase_difference(ramp, wrap_phase(kPi))) < 1e-9);
    CHECK(lo_command(Heterodyne{90.0}, acc, 0.125, fallback).radians() ==
          doctest::Approx(kPi / 2.0));
  }
  SUBCASE("fixed LO ignores time and record") {
    for (double t : {0.0, 0.3, 1.0}) {
      CHECK(lo_command(FixedLo{wrap_phase(kPi / 2.0)}, acc, t, fallback)
                .radians() == doctest::Approx(kPi / 2.0));
    }
  }
  SUBCASE("adaptive delegates to feedback_phase") {
    acc.a = {1.0, 0.0};
    CHECK(lo_command(AdaptiveDyne{}, acc, 0.5, fallback).radians() ==
          doctest::Approx(kPi / 2.0));
  }
}

TEST_CASE("simulate_trajectory is deterministic in (seed, index, config)") {
  PulseParams pulse;
  pulse.mean_photon_number = 20.0;
  pulse.true_phase = wrap_phase(0.8);
  NoiseModel noise;
  LoopModel loop;
  SimOptions options{512, true, false};

  RngStream rng_a(1234, 7);
  RngStream rng_b(1234, 7);
  const TrajectoryOutcome a =
      simulate_trajectory(pulse, noise, loop, AdaptiveDyne{}, options, rng_a);
  const TrajectoryOutcome b =
      simulate_trajectory(pulse, noise, loop, AdaptiveDyne{}, options, rng_b);
  REQUIRE(a.record.charges.size() == b.record.charges.size());
  for (std::size_t k = 0; k < a.record.charges.size(); ++k) {
    CHECK(a.record.charges[k] == b.record.charges[k]);
    CHECK(a.record.lo_phases[k] == b.record.lo_phases[k]);
  }
  REQUIRE(a.estimates.size() == b.estimates.size());
  for (std::size_t i = 0; i < a.estimates.size(); ++i) {
    CHECK(a.estimates[i].estimate.phi_hat.radians() ==
          b.estimates[i].estimate.phi_hat.radians());
  }

  RngStream rng_c(1234, 8);
  const TrajectoryOutcome c =
      simulate_trajectory(pulse, noise, loop, AdaptiveDyne{}, options, rng_c);
  CHECK(a.record.charges.front() != c.record.charges.front());
}

TEST_CASE("record shape and estimate kinds per policy") {
  PulseParams pulse;
  pulse.mean_photon_number = 5.0;
  NoiseModel noise;
  LoopModel loop;
  SimOptions with_record{128, true, false};
  SimOptions without_record{128, false, false};

  RngStream rng(5, 0);
  const TrajectoryOutcome adaptive = simulate_trajectory(
      pulse, noise, loop, AdaptiveDyne{}, with_record, rng);
  CHECK(adaptive.record.charges.size() == 128);
  CHECK(adaptive.record.lo_phases.size() == 128);
  for (double phi : adaptive.record.lo_phases) {
    CHECK(phi > -kPi);
    CHECK(phi <= kPi);
  }
  CHECK(adaptive.record.final_acc.elapsed == doctest::Approx(1.0));
  REQUIRE(adaptive.estimates.size() == 2);
  CHECK(adaptive.estimates[0].estimate.kind == EstimatorKind::MarkI);
  CHECK(adaptive.estimates[1].estimate.kind == EstimatorKind::MarkII);

  RngStream rng2(5, 1);
  const TrajectoryOutcome het = simulate_trajectory(
      pulse, noise, loop, Heterodyne{90.0}, without_record, rng2);
  CHECK(het.record.charges.empty());
  CHECK(het.record.lo_phases.empty());
  REQUIRE(het.estimates.size() == 1);
  CHECK(het.estimates[0].estimate.kind == EstimatorKind::IQ);
}

TEST_CASE("fixed-LO records are mark2-degenerate and flagged, not dropped") {
  PulseParams pulse;
  pulse.mean_photon_number = 3.0;
  pulse.true_phase = wrap_phase(1.0);
  NoiseModel noise;
  LoopModel loop;
  loop.initial_lo_phase = wrap_phase(0.4);
  SimOptions options{256, false, false};
  RngStream rng(17, 3);
  const TrajectoryOutcome out = simulate_trajectory(
      pulse, noise, loop, FixedLo{wrap_phase(0.4)}, options, rng);
  REQUIRE(out.estimates.size() == 2);
  CHECK(out.estimates[0].estimate.kind == EstimatorKind::MarkI);
  CHECK_FALSE(out.estimates[0].ambiguous);
  CHECK(out.estimates[1].estimate.kind == EstimatorKind::MarkII);
  CHECK(out.estimates[1].ambiguous);
  // The substitute estimate is the deterministic fallback phase.
  CHECK(out.estimates[1].estimate.phi_hat.radians() == doctest::Approx(0.4));
}

TEST_CASE("noise-free adaptive run recovers the signal phase") {
  PulseParams pulse;
  pulse.mean_photon_number = 50.0;
  pulse.true_phase = wrap_phase(1.2);
  NoiseModel noise;
  LoopModel loop;
  loop.initial_lo_phase = wrap_phase(-2.0);
  SimOptions options{4096, false, true};
  RngStream rng(0, 0);
  const TrajectoryOutcome out = simulate_trajectory(
      pulse, noise, loop, AdaptiveDyne{}, options, rng);
  REQUIRE(out.estimates.size() == 2);
  const double mark2 = out.estimates[1].estimate.phi_hat.radians();
  CHECK(std::abs(wrap_phase(mark2 - 1.2).radians()) < 1e-3);
}

TEST_CASE("noiseless heterodyne with integer half-cycles is exact") {
  PulseParams pulse;
  pulse.mean_photon_number = 9.0;
  pulse.true_phase = wrap_phase(0.4);
  NoiseModel noise;
  LoopModel loop;
  loop.initial_lo_phase = wrap_phase(0.0);
  const double beat_cycles = 90.0;
  SimOptions options{4096, true, true};
  RngStream rng(0, 0);
  const TrajectoryOutcome out = simulate_trajectory(
      pulse, noise, loop, Heterodyne{beat_cycles}, options, rng);
  // The left-edge ramp sums a full set of roots of unity, so b vanishes to
  // rounding and arg(a) is the signal phase.
  CHECK(std::abs(out.record.final_acc.b) <
        4.0 * kPi * beat_cycles / options.n_steps);
  CHECK(std::abs(out.record.final_acc.b) < 1e-10);
  CHECK(out.estimates[0].estimate.phi_hat.radians() ==
        doctest::Approx(0.4).epsilon(1e-10));
}

TEST_CASE("vacuum estimates are uniform on the circle") {
  PulseParams vacuum;
  NoiseModel noise;
  LoopModel loop;  // random initial LO phase
  SimOptions options{256, false, false};
  std::vector<double> phases;
  const int trials = 10'000;
  for (int t = 0; t < trials; ++t) {
    RngStream rng(314159, static_cast<std::uint64_t>(t));
    const TrajectoryOutcome out = simulate_trajectory(
        vacuum, noise, loop, AdaptiveDyne{}, options, rng);
    phases.push_back(out.estimates[1].estimate.phi_hat.radians());
  }
  CHECK(chi_square_uniformity_pvalue(phases, 16) > 0.001);
}

TEST_CASE("coupled equivariance: shifting signal and initial LO phase") {
  const double delta = 1.234;
  PulseParams pulse;
  pulse.mean_photon_number = 12.0;
  pulse.true_phase = wrap_phase(0.3);
  PulseParams shifted_pulse = pulse;
  shifted_pulse.true_phase = wrap_phase(0.3 + delta);
  NoiseModel noise;
  noise.electronic_noise_ratio = 0.1;
  LoopModel loop;
  loop.slew_limit = 200.0;
  loop.initial_lo_phase = wrap_phase(-0.7);
  LoopModel shifted_loop = loop;
  shifted_loop.initial_lo_phase = wrap_phase(-0.7 + delta);
  SimOptions options{1024, true, false};

  RngStream rng_a(2024, 5);
  RngStream rng_b(2024, 5);  // identical dW path
  const TrajectoryOutcome a = simulate_trajectory(
      pulse, noise, loop, AdaptiveDyne{}, options, rng_a);
  const TrajectoryOutcome b = simulate_trajectory(
      shifted_pulse, noise, shifted_loop, AdaptiveDyne{}, options, rng_b);
  for (std::size_t k = 0; k < a.record.lo_phases.size(); ++k) {
    const double diff =
        wrap_phase(b.record.lo_phases[k] - a.record.lo_phases[k] - delta)
            .radians();
    CHECK(std::abs(diff) < 1e-12);
  }
  for (std::size_t i = 0; i < a.estimates.size(); ++i) {
    const double diff = wrap_phase(b.estimates[i].estimate.phi_hat.radians() -
                                   a.estimates[i].estimate.phi_hat.radians() -
                                   delta)
                            .radians();
    CHECK(std::abs(diff) < 1e-12);
  }
}

TEST_CASE("command causality with loop delay") {
  PulseParams pulse;
  pulse.mean_photon_number = 30.0;
  pulse.true_phase = wrap_phase(0.5);
  NoiseModel noise;
  LoopModel loop;
  loop.initial_lo_phase = wrap_phase(1.1);
  SimOptions options{256, true, false};
  for (int delay : {0, 3, 17}) {
    loop.delay_steps = delay;
    RngStream rng(88, static_cast<std::uint64_t>(delay));
    const Policy policy = AdaptiveDyne{};
    const TrajectoryOutcome out =
        simulate_trajectory(pulse, noise, loop, policy, options, rng);
    const std::vector<double> commands = replay_commands(out, policy);
    for (int k = 0; k < options.n_steps; ++k) {
      const int source = k - delay - 1;
      const double expected =
          source >= 0 ? commands[static_cast<std::size_t>(source)]
                      : out.initial_lo_phase.radians();
      CHECK(out.record.lo_phases[static_cast<std::size_t>(k)] ==
            doctest::Approx(expected).epsilon(1e-14));
    }
  }
}

TEST_CASE("effective photon number reduction (N, eta, r) -> (N_eff, 1, 0)") {
  // Pathwise exact version: identical streams give identical estimates.
  PulseParams pulse;
  pulse.mean_photon_number = 40.0;
  pulse.true_phase = wrap_phase(0.7);
  NoiseModel noise{0.5, 0.25};
  PulseParams reduced_pulse = pulse;
  reduced_pulse.mean_photon_number = 0.5 * 40.0 / 1.25;  // 16
  NoiseModel reduced_noise{1.0, 0.0};
  LoopModel loop;
  SimOptions options{512, false, false};
  for (int t = 0; t < 50; ++t) {
    RngStream rng_a(777, static_cast<std::uint64_t>(t));
    RngStream rng_b(777, static_cast<std::uint64_t>(t));
    const TrajectoryOutcome a = simulate_trajectory(
        pulse, noise, loop, AdaptiveDyne{}, options, rng_a);
    const TrajectoryOutcome b = simulate_trajectory(
        reduced_pulse, reduced_noise, loop, AdaptiveDyne{}, options, rng_b);
    for (std::size_t i = 0; i < a.estimates.size(); ++i) {
      const double diff =
          wrap_phase(a.estimates[i].estimate.phi_hat.radians() -
                     b.estimates[i].estimate.phi_hat.radians())
              .radians();
      CHECK(std::abs(diff) < 1e-9);
    }
  }

  // Distributional version across disjoint seeds.
  std::vector<double> sample_a;
  std::vector<double> sample_b;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    RngStream rng_a(1001, static_cast<std::uint64_t>(t));
    RngStream rng_b(1002, static_cast<std::uint64_t>(t));
    sample_a.push_back(
        simulate_trajectory(pulse, noise, loop, AdaptiveDyne{}, options, rng_a)
            .estimates[1]
            .estimate.phi_hat.radians());
    sample_b.push_back(simulate_trajectory(reduced_pulse, reduced_noise, loop,
                                           AdaptiveDyne{}, options, rng_b)
                           .estimates[1]
                           .estimate.phi_hat.radians());
  }
  CHECK(ks_two_sample_pvalue(sample_a, sample_b) > 0.01);
}

TEST_CASE("wrapped variance degrades as the slew limit tightens") {
  PulseParams pulse;
  pulse.mean_photon_number = 50.0;
  NoiseModel noise;
  SimOptions options{1024, false, false};
  const double slews[] = {8.0, 40.0, kUnlimitedSlew};
  std::vector<double> variances;
  for (double slew : slews) {
    LoopModel loop;
    loop.slew_limit = slew;
    std::vector<double> estimates;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
      RngStream rng(555, static_cast<std::uint64_t>(t));  // paired seeds
      PulseParams p = pulse;
      p.true_phase = wrap_phase(0.25);
      const TrajectoryOutcome out =
          simulate_trajectory(p, noise, loop, AdaptiveDyne{}, options, rng);
      estimates.push_back(out.estimates[1].estimate.phi_hat.radians());
    }
    variances.push_back(wrapped_variance(estimates));
  }
  CHECK(variances[0] >= variances[1]);
  CHECK(variances[1] >= variances[2]);
}

TEST_CASE("simulate_trajectory validates inputs") {
  PulseParams pulse;
  pulse.mean_photon_number = -1.0;
  NoiseModel noise;
  LoopModel loop;
  SimOptions options;
  RngStream rng(0, 0);
  CHECK_THROWS_AS(simulate_trajectory(pulse, noise, loop, AdaptiveDyne{},
                                      options, rng),
                  std::domain_error);
  pulse.mean_photon_number = 1.0;
  noise.efficiency = 0.0;
  CHECK_THROWS_AS(simulate_trajectory(pulse, noise, loop, AdaptiveDyne{},
                                      options, rng),
                  std::domain_error);
  noise.efficiency = 1.0;
  options.n_steps = 1;
  CHECK_THROWS_AS(simulate_trajectory(pulse, noise, loop, AdaptiveDyne{},
                                      options, rng),
                  std::domain_error);
  options.n_steps = 64;
  CHECK_THROWS_AS(simulate_trajectory(pulse, noise, loop, Heterodyne{0.0},
                                      options, rng),
                  std::domain_error);
}
