#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynelab/phase.hpp"

namespace dynelab {

// Raised when a sample's resultant vector is too short to define a circular
// mean (near-uniform or exactly balanced phases).
class DegenerateMean : public std::runtime_error {
 public:
  explicit DegenerateMean(const std::string& what)
      : std::runtime_error(what) {}
};

inline constexpr double kResultantTolerance = 1e-9;

struct EnsembleStats {
  std::size_t n = 0;
  PhaseAngle circular_mean{};
  double holevo_variance = 0.0;
  double wrapped_variance = 0.0;
  double resultant_length = 0.0;
  std::size_t ambiguous_count = 0;
};

struct Histogram {
  std::vector<double> bin_edges;  // n_bins + 1 edges over (-pi, pi]
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
};

// arg of the summed unit phasors. Throws DegenerateMean when the resultant
// length drops to kResultantTolerance or below.
PhaseAngle circular_mean(std::span<const double> phases);

// Mean resultant length |sum exp(i*phi)| / n.
double resultant_length(std::span<const double> phases);

// resultant^-2 - 1.
double holevo_variance(std::span<const double> phases);

// Mean of wrap(phi - circular_mean)^2, in radians^2.
double wrapped_variance(std::span<const double> phases);

// Deviations wrap(phi - center), one per sample.
std::vector<double> wrapped_deviations(std::span<const double> phases,
                                       PhaseAngle center);

// Equal-width bins of wrap(phi - center) over (-pi, pi]; a deviation of
// exactly +pi lands in the top bin.
Histogram build_histogram(std::span<const double> phases, PhaseAngle center,
                          int n_bins);

// Fraction of samples with |wrap(phi - center)| > threshold.
double tail_fraction(std::span<const double> phases, PhaseAngle center,
                     double threshold);

// Linear-interpolated quantile (q in [0, 1]) of an unsorted sample.
double quantile(std::vector<double> values, double q);

// Standard error of the mean of per-batch values.
double batch_standard_error(std::span<const double> batch_values);

struct ReferenceCurves {
  double heterodyne_limit = 0.0;
  double fundamental_limit = 0.0;
};

// Large-N asymptotes at effective photon number N_eff = eta*N/(1 + r):
// fundamental = 1/(4*N_eff), heterodyne = 1/(2*N_eff).
ReferenceCurves reference_curves(double mean_photon_number, double efficiency,
                                 double electronic_noise_ratio);

// One trial's headline sample inside an ensemble.
struct EstimateSample {
  std::uint64_t trial = 0;
  double phase = 0.0;  // canonical radians
  bool ambiguous = false;
};

// An indexed sample set whose merge is associative and commutative: samples
// are keyed by trial index and every reduction re-sorts before summarizing,
// so any grouping of partial sets yields bit-identical statistics.
class EstimateSet {
 public:
  void add(EstimateSample sample);
  void merge(const EstimateSet& other);
  std::size_t size() const { return samples_.size(); }
  // Trial-ordered views.
  std::vector<double> phases() const;
  const std::vector<EstimateSample>& samples() const;

 private:
  void ensure_sorted() const;
  mutable std::vector<EstimateSample> samples_;
  mutable bool sorted_ = true;
};

// Full-sample summary; ambiguous trials enter at their recorded (fallback)
// phase and are counted separately.
EnsembleStats summarize(const EstimateSet& set);

}  // namespace dynelab
