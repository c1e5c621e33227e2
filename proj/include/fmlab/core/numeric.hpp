// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fmlab {

using Vec = std::vector<double>;

/// Pairwise (tree) summation. The reduction order depends only on the length
/// of the input, never on how the terms were produced.
double pairwise_sum(std::span<const double> values);

/// Mean and standard error of the mean (sample std / sqrt(n)).
struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};
MeanEstimate mean_and_se(std::span<const double> values);

/// sqrt(a^2 + b^2) for combining independent standard errors.
double combined_se(double a, double b);

double normal_pdf(double z);
/// Upper tail 1 - Phi(z), computed through erfc so it stays accurate far out.
double normal_sf(double z);
double normal_cdf(double z);

double squared_norm(std::span<const double> v);
double max_abs(std::span<const double> v);
bool all_finite(std::span<const double> v);

/// Ordinary least squares line through (x, y).
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace fmlab
