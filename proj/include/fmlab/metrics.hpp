// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

/// Wasserstein-2 estimators between point clouds, and the Gaussian tail
/// formulas used by the truncation argument together with Monte-Carlo
/// counterparts.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fmlab/core/numeric.hpp"
#include "fmlab/core/rng.hpp"
#include "fmlab/path.hpp"
#include "fmlab/point_cloud.hpp"

namespace fmlab {

inline constexpr std::size_t kMaxExactW2Points = 2048;

struct Assignment {
  std::vector<std::size_t> column_of_row;
  double cost = 0.0;
};

/// Minimum-cost perfect matching on a dense n x n row-major cost matrix
/// (shortest augmenting paths with potentials, O(n^3)).
Assignment solve_assignment(std::span<const double> cost, std::size_t n);

/// sqrt(min_sigma (1/n) sum_i ||a_i - b_sigma(i)||^2). Equal sizes up to
/// kMaxExactW2Points; throws InputError otherwise.
double w2_exact(const PointCloud& a, const PointCloud& b);

/// W2 between two 1-D empirical measures with uniform weights (any sizes).
double w2_1d(std::span<const double> a, std::span<const double> b);

/// sqrt of the average over random unit directions w of W2^2(<a, w>, <b, w>).
/// For a translation by v its square is ||v||^2 / d in expectation.
double w2_sliced(const PointCloud& a, const PointCloud& b, std::size_t n_projections, std::uint64_t seed);
/// sqrt(d) * w2_sliced: on the scale of W2 and never above it in expectation.
double w2_sliced_normalized(const PointCloud& a, const PointCloud& b, std::size_t n_projections,
                            std::uint64_t seed);

/// W2 between N(m1, s1^2 I) and N(m2, s2^2 I): sqrt(||m1 - m2||^2 + d (s1 - s2)^2).
double gaussian_w2_oracle(std::span<const double> m1, double s1, std::span<const double> m2, double s2);

// Gaussian tails --------------------------------------------------------------

/// phi(r) / (1 - Phi(r)), accurate for large r.
double inverse_mills_ratio(double r);

/// E[X^2 | |X - mu| > a] for X ~ N(mu, sigma^2):
///   mu^2 + sigma^2 + sigma a phi(a/sigma) / (1 - Phi(a/sigma)).
double truncated_normal_second_moment(double mu, double sigma, double a);

/// Y ~ N(0, 1) conditioned on |Y| > c, via exponential-proposal rejection
/// for the one-sided tail and a random sign.
double sample_abs_normal_tail(Rng& rng, double c);

/// Monte-Carlo mean of X^2 over n draws of X | |X - mu| > a.
MeanEstimate truncated_second_moment_mc(double mu, double sigma, double a, std::size_t n, std::uint64_t seed);

struct MillsCheck {
  double ratio = 0.0;  // phi(kappa) / (1 - Phi(kappa))
  double upper = 0.0;  // kappa + 1 / kappa
  bool holds = false;
};
MillsCheck mills_ratio_bound_check(double kappa);

/// Sampler for a scalar distribution.
using ScalarSampler = std::function<double(Rng&)>;

struct TailIdentity {
  double lhs = 0.0, lhs_se = 0.0;  // E[X 1{X > k}]
  double rhs = 0.0, rhs_se = 0.0;  // P(X > k) E[X | X > k]
  double prob = 0.0;
  double cond_mean = 0.0;
  bool agree = false;              // within 4 combined standard errors
};

/// The three factors are estimated from independent streams: the product
/// moment, the exceedance probability, and the conditional mean (by
/// rejection). Requires n_mc >= 1e5.
TailIdentity tail_indicator_identity_check(const ScalarSampler& sampler, double k, std::size_t n_mc,
                                           std::uint64_t seed);

/// Fraction of n standard-normal draws with |Y| >= kappa.
MeanEstimate exceedance_rate(double kappa, std::size_t n, std::uint64_t seed);

/// Fraction of coordinates, over all samples, whose standardized residual
/// exceeds kappa in magnitude (the truncation gate is closed).
MeanEstimate gated_coordinate_fraction(std::span<const PathSample> data, double kappa, double t_min = kDefaultTMin);

}  // namespace fmlab
