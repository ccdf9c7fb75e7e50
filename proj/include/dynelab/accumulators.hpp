#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include "dynelab/phase.hpp"

namespace dynelab {

using ComplexAmplitude = std::complex<double>;

// Running summary of a dyne record over normalized time [0, 1]:
//   a = integral of I(s) * exp(i*Phi(s)) ds   (photocurrent-weighted LO phasor)
//   b = -integral of exp(2i*Phi(s)) ds        (LO phasor squared, negated)
// Together (a, b) carry everything the estimators below need; |b| <= elapsed
// always holds by the triangle inequality.
struct DyneAccumulators {
  ComplexAmplitude a{0.0, 0.0};
  ComplexAmplitude b{0.0, 0.0};
  double elapsed = 0.0;
};

enum class EstimatorKind { MarkI, MarkII, IQ };

std::string estimator_name(EstimatorKind kind);

struct EstimateResult {
  PhaseAngle phi_hat;
  double magnitude = 0.0;
  EstimatorKind kind = EstimatorKind::MarkI;
};

// Raised when a record carries no usable phase information (|a| = 0, or a
// single-quadrature-degenerate record for the Mark II combination).
class AmbiguousEstimate : public std::runtime_error {
 public:
  explicit AmbiguousEstimate(const std::string& what)
      : std::runtime_error(what) {}
};

// Slack on the elapsed <= 1 check, absorbing the rounding of n equal steps.
inline constexpr double kElapsedTolerance = 1e-9;

// One integration step: a += exp(i*lo)*charge, b -= exp(2i*lo)*dt.
DyneAccumulators accumulate_step(const DyneAccumulators& acc, double charge,
                                 PhaseAngle lo_phase, double dt);

// Feedback rule arg(a) + pi/2; the fallback covers the |a| = 0 start of a
// record where no preliminary estimate exists yet.
PhaseAngle feedback_phase(const DyneAccumulators& acc, PhaseAngle fallback);

// Running estimator arg(a).
EstimateResult estimate_mark1(const DyneAccumulators& acc);

// History-corrected final estimator arg(a + b*conj(a)). Throws
// AmbiguousEstimate when the combination magnitude falls below
// 1e-12 * max(1, |a|), which flags a single-quadrature record (|b| ~ elapsed).
EstimateResult estimate_mark2(const DyneAccumulators& acc);

// arg(a) under a heterodyne LO ramp; same arithmetic as Mark I, tagged as
// the I/Q demodulation estimate.
EstimateResult estimate_iq(const DyneAccumulators& acc);

}  // namespace dynelab
