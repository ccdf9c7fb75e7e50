#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "dynelab/phase.hpp"

namespace dynelab {

// Seeded noise stream for one trajectory. A (master_seed, stream_index) pair
// fully determines the draw sequence, and distinct indices give independent
// streams, so trajectories can be scheduled on any worker in any order and
// still reproduce bit-identical results.
//
// The Gaussian transform is done here (Box-Muller on explicit 53-bit
// uniforms) instead of std::normal_distribution, whose output sequence is
// not pinned by the standard and varies between library implementations.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(master_seed),
        static_cast<std::uint32_t>(master_seed >> 32),
        static_cast<std::uint32_t>(stream_index),
        static_cast<std::uint32_t>(stream_index >> 32),
    };
    gen_.seed(seq);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform over the canonical interval (-pi, pi].
  PhaseAngle uniform_phase() { return wrap_phase(kPi - kTwoPi * uniform01()); }

  // Standard normal draw.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = kTwoPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dynelab
