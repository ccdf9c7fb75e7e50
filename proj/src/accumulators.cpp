#include "dynelab/accumulators.hpp"

#include <cmath>

namespace dynelab {

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::MarkI:
      return "mark1";
    case EstimatorKind::MarkII:
      return "mark2";
    case EstimatorKind::IQ:
      return "iq";
  }
  return "unknown";
}

DyneAccumulators accumulate_step(const DyneAccumulators& acc, double charge,
                                 PhaseAngle lo_phase, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::domain_error("accumulate_step: dt must be positive and finite");
  }
  if (!std::isfinite(charge)) {
    throw std::domain_error("accumulate_step: non-finite charge");
  }
  if (acc.elapsed + dt > 1.0 + kElapsedTolerance) {
    throw std::domain_error("accumulate_step: elapsed time would exceed 1");
  }
  const ComplexAmplitude lo = std::polar(1.0, lo_phase.radians());
  DyneAccumulators next;
  next.a = acc.a + lo * charge;
  next.b = acc.b - lo * lo * dt;
  next.elapsed = acc.elapsed + dt;
  return next;
}

PhaseAngle feedback_phase(const DyneAccumulators& acc, PhaseAngle fallback) {
  if (acc.a.real() == 0.0 && acc.a.imag() == 0.0) {
    return fallback;
  }
  return wrap_phase(std::arg(acc.a) + kPi / 2.0);
}

EstimateResult estimate_mark1(const DyneAccumulators& acc) {
  if (acc.a.real() == 0.0 && acc.a.imag() == 0.0) {
    throw AmbiguousEstimate("mark1: record carries no phase information");
  }
  return EstimateResult{wrap_phase(std::arg(acc.a)), std::abs(acc.a),
                        EstimatorKind::MarkI};
}

EstimateResult estimate_mark2(const DyneAccumulators& acc) {
  const ComplexAmplitude combined = acc.a + acc.b * std::conj(acc.a);
  const double magnitude = std::abs(combined);
  const double tolerance = 1e-12 * std::max(1.0, std::abs(acc.a));
  if (magnitude <= tolerance) {
    throw AmbiguousEstimate("mark2: single-quadrature-degenerate record");
  }
  return EstimateResult{wrap_phase(std::arg(combined)), magnitude,
                        EstimatorKind::MarkII};
}

EstimateResult estimate_iq(const DyneAccumulators& acc) {
  EstimateResult result = estimate_mark1(acc);
  result.kind = EstimatorKind::IQ;
  return result;
}

}  // namespace dynelab
