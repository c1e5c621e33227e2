// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

/// Flow-matching regression losses over path samples. Population quantities
/// are Monte-Carlo means over fresh samples, always reported with their
/// standard error.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fmlab/net.hpp"
#include "fmlab/path.hpp"

namespace fmlab {

struct LossEstimate {
  double value = 0.0;
  std::size_t n_samples = 0;
  double std_error = 0.0;
};

LossEstimate to_loss_estimate(const MeanEstimate& m);

/// Per-sample squared residuals ||u^theta(x_i, t_i, z_i) - u_t(x_i, z_i)||^2.
Vec squared_residuals(const NetworkParams& params, std::span<const PathSample> data,
                      double t_min = kDefaultTMin);

/// Mean squared residual over `data`. Throws InputError on empty data.
LossEstimate empirical_loss(const NetworkParams& params, std::span<const PathSample> data,
                            double t_min = kDefaultTMin);

/// Empirical loss on n_mc fresh samples drawn with `seed`. Requires n_mc >= 100.
LossEstimate population_loss_mc(const NetworkParams& params, const TargetDistribution& dist,
                                std::size_t n_mc, std::uint64_t seed, double t_min = kDefaultTMin);

/// Mean of ||u^a - u^b||^2 over the inputs of `data`; the two parameter sets
/// must share one spec.
LossEstimate field_distance(const NetworkParams& a, const NetworkParams& b,
                            std::span<const PathSample> data);

struct TruncatedLosses {
  LossEstimate emp_trunc;
  double gap = 0.0;  // empirical loss minus emp_trunc
};

/// The residual is zeroed on every coordinate whose standardized residual
/// (x - t z) / (1 - t) exceeds kappa in magnitude, for field and target alike.
TruncatedLosses truncated_losses(const NetworkParams& params, std::span<const PathSample> data,
                                 double kappa, double t_min = kDefaultTMin);

struct LossGapRecord {
  LossEstimate pop_a, pop_b;
  LossEstimate emp_a, emp_b;
  double pop_gap = 0.0;    // |L(b) - L(a)|
  double emp_gap = 0.0;    // |L^(b) - L^(a)|
  double gen_gap_a = 0.0;  // |L(a) - L^(a)|
  double gen_gap_b = 0.0;  // |L(b) - L^(b)|
  /// Allowance for Monte-Carlo noise in the triangle check (4 combined SEs).
  double slack = 0.0;
  bool triangle_holds = false;
};

/// Population terms use one common set of n_mc fresh samples for both
/// parameter vectors.
LossGapRecord loss_gap_diag(const NetworkParams& a, const NetworkParams& b, const TargetDistribution& dist,
                            std::span<const PathSample> data, std::size_t n_mc, std::uint64_t seed,
                            double t_min = kDefaultTMin);

}  // namespace fmlab
