#pragma once

#include <span>
#include <vector>

#include "dynelab/phase.hpp"

namespace dynelab {

// Two-sample Kolmogorov-Smirnov p-value (asymptotic, with the small-sample
// correction on the effective count).
double ks_two_sample_pvalue(std::vector<double> x, std::vector<double> y);

// Upper-tail probability Q(stat | dof) of the chi-square distribution.
double chi_square_upper_tail(double stat, int dof);

// Pearson chi-square test of uniformity over equal-width bins on (-pi, pi];
// returns the p-value.
double chi_square_uniformity_pvalue(std::span<const double> phases,
                                    int n_bins);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

// Ordinary least squares y = intercept + slope*x with the residual-based
// standard error of the slope.
SlopeFit least_squares_slope(std::span<const double> x,
                             std::span<const double> y);

}  // namespace dynelab
