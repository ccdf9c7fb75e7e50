#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dynelab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class PhaseAngle;
PhaseAngle wrap_phase(double radians);

// An angle kept in the canonical interval (-pi, pi]. Construction goes
// through wrap_phase so the invariant cannot be broken from outside.
class PhaseAngle {
 public:
  PhaseAngle() = default;
  double radians() const { return value_; }

  friend bool operator==(PhaseAngle lhs, PhaseAngle rhs) {
    return lhs.value_ == rhs.value_;
  }

 private:
  friend PhaseAngle wrap_phase(double);
  explicit PhaseAngle(double canonical) : value_(canonical) {}
  double value_ = 0.0;
};

// Shifts x by a multiple of 2*pi into (-pi, pi]; -pi maps to +pi.
inline PhaseAngle wrap_phase(double radians) {
  if (!std::isfinite(radians)) {
    throw std::domain_error("wrap_phase: non-finite angle");
  }
  double w = std::remainder(radians, kTwoPi);  // [-pi, pi]
  if (w <= -kPi) {
    w = kPi;
  }
  return PhaseAngle(w);
}

// Signed circular distance wrap(a - b), in (-pi, pi].
inline double phase_difference(PhaseAngle a, PhaseAngle b) {
  return wrap_phase(a.radians() - b.radians()).radians();
}

}  // namespace dynelab
