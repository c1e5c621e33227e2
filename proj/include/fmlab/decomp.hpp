// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

/// Measured approximation / statistical / optimization split of the field
/// error of one-pass SGD, with ERM stand-ins for the population and
/// empirical minimizers:
///   theta    one-pass SGD over the n-sample dataset
///   theta_b  full-batch descent on the same dataset
///   theta_a  full-batch descent on a fresh dataset big_factor times larger
/// All three start from one initialization, and every term is a mean over
/// one common set of fresh evaluation samples, so
///   total <= 2 approx + 4 stat + 4 opt
/// holds sample by sample.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fmlab/core/numeric.hpp"
#include "fmlab/loss.hpp"
#include "fmlab/net.hpp"
#include "fmlab/path.hpp"
#include "fmlab/train.hpp"

namespace fmlab {

struct DecompConfig {
  std::size_t n = 256;
  /// SGD schedule; n_steps is replaced by n.
  TrainConfig train;
  GdConfig erm_same;
  GdConfig erm_big;
  std::size_t big_factor = 50;
  std::size_t n_mc = 4096;
  /// Use theta_b in place of the SGD iterate.
  bool theta_is_erm = false;
  double delta = 0.05;
  std::uint64_t seed = 0;
};

struct DecompositionReport {
  std::size_t n = 0;
  std::size_t n_big = 0;
  LossEstimate approx;  // E||u^{theta_a} - u_t||^2
  LossEstimate stat;    // E||u^{theta_a} - u^{theta_b}||^2
  LossEstimate opt;     // E||u^{theta} - u^{theta_b}||^2
  LossEstimate total;   // E||u^{theta} - u_t||^2
  double rhs = 0.0;         // 2 approx + 4 stat + 4 opt
  double tolerance = 0.0;   // 6 combined standard errors
  bool inequality_holds = false;
  bool erm_same_converged = false;
  bool erm_big_converged = false;
  bool sgd_aborted = false;
  double delta = 0.05;
  /// Independent dataset draws pooled into this report.
  std::size_t replicates = 1;
};

DecompositionReport measure_decomposition(const TargetDistribution& dist, const NetworkSpec& spec,
                                          const DecompConfig& cfg);
/// Mean of `replicates` independent measurements (seeds derived from
/// cfg.seed). Standard errors come from the spread across replicates, so they
/// include dataset variability and not only Monte Carlo error. One replicate
/// is exactly measure_decomposition(cfg).
DecompositionReport measure_decomposition_replicated(const TargetDistribution& dist, const NetworkSpec& spec,
                                                     const DecompConfig& cfg, std::size_t replicates);
/// Pools reports for one n. The inequality must hold on the pooled means and
/// on every replicate.
DecompositionReport aggregate_replicates(std::span<const DecompositionReport> reps);
/// True when no step of the stat term rises by more than k_se combined SEs.
bool stat_trend_nonincreasing(std::span<const DecompositionReport> reports, double k_se = 2.0);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
  std::size_t excluded = 0;  // nonpositive values dropped before the fit
};

/// Least-squares fit of log(y) against log(x), dropping nonpositive y.
RateFit log_log_fit(std::span<const double> x, std::span<const double> y);
/// Fit of log(stat) against log(n). Needs >= 4 points spanning a decade.
RateFit stat_rate_fit(std::span<const DecompositionReport> reports);
/// Fit over the final decade of steps (x in [x_max / 10, x_max]).
RateFit opt_rate_fit(std::span<const double> steps, std::span<const double> suboptimality);
/// Suboptimality proxy loss_mc - loss_floor over the measured records.
RateFit opt_rate_fit(const TrainTrace& trace, double loss_floor);

std::string decomposition_csv_header();
std::string decomposition_csv_row(const DecompositionReport& r);

}  // namespace fmlab
