#include "dynelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace dynelab {

namespace {

std::complex<double> phasor_sum(std::span<const double> phases) {
  std::complex<double> sum{0.0, 0.0};
  for (double phi : phases) {
    sum += std::polar(1.0, phi);
  }
  return sum;
}

}  // namespace

PhaseAngle circular_mean(std::span<const double> phases) {
  if (phases.empty()) {
    throw std::domain_error("circular_mean: empty sample");
  }
  const std::complex<double> sum = phasor_sum(phases);
  const double resultant = std::abs(sum) / static_cast<double>(phases.size());
  if (resultant <= kResultantTolerance) {
    throw DegenerateMean("circular_mean: resultant length ~ 0");
  }
  return wrap_phase(std::arg(sum));
}

double resultant_length(std::span<const double> phases) {
  if (phases.empty()) {
    throw std::domain_error("resultant_length: empty sample");
  }
  return std::abs(phasor_sum(phases)) / static_cast<double>(phases.size());
}

double holevo_variance(std::span<const double> phases) {
  const double r = resultant_length(phases);
  if (r <= kResultantTolerance) {
    throw DegenerateMean("holevo_variance: resultant length ~ 0");
  }
  return 1.0 / (r * r) - 1.0;
}

double wrapped_variance(std::span<const double> phases) {
  const PhaseAngle mean = circular_mean(phases);
  double sum_sq = 0.0;
  for (double phi : phases) {
    const double dev = wrap_phase(phi - mean.radians()).radians();
    sum_sq += dev * dev;
  }
  return sum_sq / static_cast<double>(phases.size());
}

std::vector<double> wrapped_deviations(std::span<const double> phases,
                                       PhaseAngle center) {
  std::vector<double> deviations;
  deviations.reserve(phases.size());
  for (double phi : phases) {
    deviations.push_back(wrap_phase(phi - center.radians()).radians());
  }
  return deviations;
}

Histogram build_histogram(std::span<const double> phases, PhaseAngle center,
                          int n_bins) {
  if (n_bins < 2) {
    throw std::domain_error("build_histogram: n_bins must be >= 2");
  }
  Histogram hist;
  hist.bin_edges.resize(static_cast<std::size_t>(n_bins) + 1);
  for (int i = 0; i <= n_bins; ++i) {
    hist.bin_edges[static_cast<std::size_t>(i)] =
        -kPi + kTwoPi * static_cast<double>(i) / static_cast<double>(n_bins);
  }
  hist.counts.assign(static_cast<std::size_t>(n_bins), 0);
  for (double phi : phases) {
    const double dev = wrap_phase(phi - center.radians()).radians();
    int idx = static_cast<int>(std::floor((dev + kPi) / kTwoPi *
                                          static_cast<double>(n_bins)));
    idx = std::clamp(idx, 0, n_bins - 1);  // dev = +pi goes to the top bin
    ++hist.counts[static_cast<std::size_t>(idx)];
  }
  hist.total = phases.size();
  return hist;
}

double tail_fraction(std::span<const double> phases, PhaseAngle center,
                     double threshold) {
  if (!(threshold > 0.0) || !(threshold < kPi)) {
    throw std::domain_error("tail_fraction: threshold must lie in (0, pi)");
  }
  if (phases.empty()) {
    throw std::domain_error("tail_fraction: empty sample");
  }
  std::size_t outside = 0;
  for (double phi : phases) {
    if (std::abs(wrap_phase(phi - center.radians()).radians()) > threshold) {
      ++outside;
    }
  }
  return static_cast<double>(outside) / static_cast<double>(phases.size());
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw std::domain_error("quantile: empty sample");
  }
  if (!(q >= 0.0) || !(q <= 1.0)) {
    throw std::domain_error("quantile: q must lie in [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double batch_standard_error(std::span<const double> batch_values) {
  const std::size_t n = batch_values.size();
  if (n < 2) {
    throw std::domain_error("batch_standard_error: need >= 2 batches");
  }
  double mean = 0.0;
  for (double v : batch_values) {
    mean += v;
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : batch_values) {
    ss += (v - mean) * (v - mean);
  }
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

ReferenceCurves reference_curves(double mean_photon_number, double efficiency,
                                 double electronic_noise_ratio) {
  if (!(mean_photon_number > 0.0)) {
    throw std::domain_error("reference_curves: mean_photon_number must be > 0");
  }
  if (!(efficiency > 0.0) || efficiency > 1.0) {
    throw std::domain_error("reference_curves: efficiency must lie in (0, 1]");
  }
  if (!(electronic_noise_ratio >= 0.0)) {
    throw std::domain_error("reference_curves: electronic_noise_ratio < 0");
  }
  const double n_eff =
      efficiency * mean_photon_number / (1.0 + electronic_noise_ratio);
  return ReferenceCurves{1.0 / (2.0 * n_eff), 1.0 / (4.0 * n_eff)};
}

void EstimateSet::add(EstimateSample sample) {
  if (!samples_.empty() && sample.trial < samples_.back().trial) {
    sorted_ = false;
  }
  samples_.push_back(sample);
}

void EstimateSet::merge(const EstimateSet& other) {
  for (const auto& s : other.samples_) {
    add(s);
  }
}

void EstimateSet::ensure_sorted() const {
  if (!sorted_) {
    std::sort(samples_.begin(), samples_.end(),
              [](const EstimateSample& a, const EstimateSample& b) {
                return a.trial < b.trial;
              });
    sorted_ = true;
  }
}

std::vector<double> EstimateSet::phases() const {
  ensure_sorted();
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) {
    out.push_back(s.phase);
  }
  return out;
}

const std::vector<EstimateSample>& EstimateSet::samples() const {
  ensure_sorted();
  return samples_;
}

EnsembleStats summarize(const EstimateSet& set) {
  const std::vector<double> phases = set.phases();
  EnsembleStats stats;
  stats.n = phases.size();
  stats.resultant_length = resultant_length(phases);
  stats.circular_mean = circular_mean(phases);
  stats.holevo_variance = holevo_variance(phases);
  stats.wrapped_variance = wrapped_variance(phases);
  for (const auto& s : set.samples()) {
    if (s.ambiguous) {
      ++stats.ambiguous_count;
    }
  }
  return stats;
}

}  // namespace dynelab
