// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

/// Sample-complexity sweep: W2 between generated samples and a held-out data
/// cloud as a function of the number n of one-sample SGD steps.
///
/// For each replicate seed a single SGD run of n_max steps consumes fresh
/// path samples 0, 1, 2, ...; the iterate after exactly n steps is the model
/// for grid point n. Since eta_i depends only on i, this equals separate runs
/// on nested sample prefixes.

#pragma once

#include <string>
#include <vector>

#include "fmlab/decomp.hpp"
#include "fmlab/harness/config.hpp"

namespace fmlab::harness {

struct SweepPoint {
  std::size_t n = 0;  // 0 marks the untrained baseline
  std::uint64_t seed = 0;
  double w2 = 0.0;
  double loss_mc = 0.0;
  bool aborted = false;
};

struct SweepRow {
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double envelope = 0.0;  // C n^{-1/4}
};

struct SweepReport {
  std::vector<SweepPoint> points;
  std::vector<SweepRow> rows;
  double baseline_mean = 0.0;
  double baseline_se = 0.0;
  RateFit fit;
  double envelope_c = 0.0;
  std::string estimator;  // "exact" or "sliced_normalized"
  std::size_t heldout = 0;
  bool any_aborted = false;

  // Acceptance checks.
  bool below_baseline = false;  // mean W2 at the largest n below the baseline
  bool nonincreasing = false;   // each step up by at most 2 combined SEs
  bool slope_ok = false;        // fitted slope <= -0.1
  bool under_envelope = false;  // every mean within 1 combined SE of C n^{-1/4}
};

/// Requires cfg.sweep and cfg.has_train.
SweepReport run_sweep(const ExperimentConfig& cfg);

std::string sweep_points_csv(const SweepReport& r);
std::string sweep_summary_csv(const SweepReport& r);
nlohmann::json sweep_report_json(const SweepReport& r);

}  // namespace fmlab::harness
