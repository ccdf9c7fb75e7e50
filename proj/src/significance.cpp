#include "dynelab/significance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dynelab {

namespace {

// Kolmogorov distribution tail Q(lambda) = 2 * sum (-1)^(k-1) exp(-2k^2 l^2).
double kolmogorov_tail(double lambda) {
  if (lambda < 1e-8) {
    return 1.0;
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) {
      break;
    }
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Regularized lower incomplete gamma P(a, x), series and continued-fraction
// branches (Numerical Recipes style).
double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) {
    throw std::domain_error("gamma_p: invalid arguments");
  }
  if (x == 0.0) {
    return 0.0;
  }
  const double lng = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) {
        break;
      }
    }
    return sum * std::exp(-x + a * std::log(x) - lng);
  }
  // Lentz continued fraction for Q(a, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) {
      d = tiny;
    }
    c = b + an / c;
    if (std::abs(c) < tiny) {
      c = tiny;
    }
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) {
      break;
    }
  }
  const double q = std::exp(-x + a * std::log(x) - lng) * h;
  return 1.0 - q;
}

}  // namespace

double ks_two_sample_pvalue(std::vector<double> x, std::vector<double> y) {
  if (x.size() < 2 || y.size() < 2) {
    throw std::domain_error("ks_two_sample_pvalue: need >= 2 samples each");
  }
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double xi = x[i];
    const double yj = y[j];
    if (xi <= yj) {
      ++i;
    }
    if (yj <= xi) {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / nx -
                             static_cast<double>(j) / ny));
  }
  const double ne = std::sqrt(nx * ny / (nx + ny));
  return kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d);
}

double chi_square_upper_tail(double stat, int dof) {
  if (dof < 1) {
    throw std::domain_error("chi_square_upper_tail: dof must be >= 1");
  }
  if (stat <= 0.0) {
    return 1.0;
  }
  return 1.0 - gamma_p(0.5 * static_cast<double>(dof), 0.5 * stat);
}

double chi_square_uniformity_pvalue(std::span<const double> phases,
                                    int n_bins) {
  if (n_bins < 2) {
    throw std::domain_error("chi_square_uniformity_pvalue: n_bins >= 2");
  }
  if (phases.size() < static_cast<std::size_t>(5 * n_bins)) {
    throw std::domain_error(
        "chi_square_uniformity_pvalue: too few samples for the bin count");
  }
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n_bins), 0);
  for (double phi : phases) {
    const double w = wrap_phase(phi).radians();
    int idx = static_cast<int>(
        std::floor((w + kPi) / kTwoPi * static_cast<double>(n_bins)));
    idx = std::clamp(idx, 0, n_bins - 1);
    ++counts[static_cast<std::size_t>(idx)];
  }
  const double expected =
      static_cast<double>(phases.size()) / static_cast<double>(n_bins);
  double stat = 0.0;
  for (std::uint64_t c : counts) {
    const double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  return chi_square_upper_tail(stat, n_bins - 1);
}

SlopeFit least_squares_slope(std::span<const double> x,
                             std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 3 || y.size() != n) {
    throw std::domain_error("least_squares_slope: need matched n >= 3");
  }
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mean_x) * (x[i] - mean_x);
    sxy += (x[i] - mean_x) * (y[i] - mean_y);
  }
  if (sxx == 0.0) {
    throw std::domain_error("least_squares_slope: degenerate x values");
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double ss_resid = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_resid += r * r;
  }
  fit.slope_se = std::sqrt(ss_resid / static_cast<double>(n - 2) / sxx);
  return fit;
}

}  // namespace dynelab
