// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "fmlab/harness/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "fmlab/core/error.hpp"
#include "fmlab/metrics.hpp"

namespace fmlab::harness {
namespace {

constexpr std::uint64_t kHeldoutTag = 0x4e1d;
constexpr std::uint64_t kGenerateTag = 0x9e4e;
constexpr std::uint64_t kTrainTag = 0x7a11;
constexpr std::uint64_t kInitTag = 0x1417;
constexpr std::uint64_t kLossTag = 0x1055;
constexpr std::size_t kLossSamples = 2048;

PointCloud draw_cloud(const TargetDistribution& dist, std::size_t n, std::uint64_t seed) {
  PointCloud c = PointCloud::with_size(dist.dim(), n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = make_stream(seed, i);
    dist.draw_into(rng, c.point(i));
  }
  return c;
}

}  // namespace

SweepReport run_sweep(const ExperimentConfig& cfg) {
  if (!cfg.sweep) throw ConfigError("sweep", "required section is missing");
  if (!cfg.has_train) throw ConfigError("train", "required section is missing");
  const SweepSettings& ss = *cfg.sweep;
  SweepReport rep;
  rep.heldout = ss.heldout;
  const bool exact = ss.heldout == ss.generated && ss.heldout <= kMaxExactW2Points;
  rep.estimator = exact ? "exact" : "sliced_normalized";
  const std::uint64_t slice_seed = derive_seed(cfg.seed, 0x511c);
  auto distance = [&](const PointCloud& a, const PointCloud& b) {
    return exact ? w2_exact(a, b) : w2_sliced_normalized(a, b, ss.sliced_projections, slice_seed);
  };
  const PointCloud heldout = draw_cloud(cfg.dist, ss.heldout, derive_seed(cfg.seed, kHeldoutTag));
  const std::size_t n_max = ss.n_grid.back();

  std::map<std::size_t, Vec> by_n;
  Vec baseline;
  for (std::uint64_t seed : ss.seeds) {
    const NetworkParams init = init_params(cfg.network, derive_seed(seed, kInitTag));
    const std::uint64_t gen_seed = derive_seed(seed, kGenerateTag);
    if (ss.include_baseline) {
      const double w = distance(generate(init, ss.generated, cfg.integrator, gen_seed), heldout);
      baseline.push_back(w);
      rep.points.push_back({0, seed, w, population_loss_mc(init, cfg.dist, kLossSamples,
                                                           derive_seed(cfg.seed, kLossTag), cfg.train.t_min)
                                            .value,
                            false});
    }
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(seed, kTrainTag);
    tc.n_steps = n_max;
    tc.snapshot_every = 0;
    tc.snapshot_at = ss.n_grid;
    const TrainResult run = sgd_train(init, cfg.dist, tc);
    rep.any_aborted = rep.any_aborted || run.aborted;
    for (std::size_t n : ss.n_grid) {
      SweepPoint pt;
      pt.n = n;
      pt.seed = seed;
      const ThetaSnapshot* snap = nullptr;
      for (const ThetaSnapshot& s : run.trace.snapshots)
        if (s.step == n) snap = &s;
      if (!snap) {
        pt.aborted = true;
        pt.w2 = pt.loss_mc = kNotMeasured;
        rep.points.push_back(pt);
        continue;
      }
      const NetworkParams p{cfg.network, snap->theta};
      pt.w2 = distance(generate(p, ss.generated, cfg.integrator, gen_seed), heldout);
      pt.loss_mc =
          population_loss_mc(p, cfg.dist, kLossSamples, derive_seed(cfg.seed, kLossTag), cfg.train.t_min).value;
      by_n[n].push_back(pt.w2);
      rep.points.push_back(pt);
    }
  }

  if (!baseline.empty()) {
    const MeanEstimate b = mean_and_se(baseline);
    rep.baseline_mean = b.mean;
    rep.baseline_se = baseline.size() > 1 ? b.std_error : 0.0;
  }
  Vec ns, means;
  for (std::size_t n : ss.n_grid) {
    const Vec& v = by_n[n];
    if (v.empty()) continue;
    SweepRow row;
    row.n = n;
    const MeanEstimate m = mean_and_se(v);
    row.mean = m.mean;
    row.std_error = v.size() > 1 ? m.std_error : 0.0;
    rep.rows.push_back(row);
    ns.push_back(static_cast<double>(n));
    means.push_back(m.mean);
  }
  if (rep.rows.size() < 2) return rep;

  rep.fit = log_log_fit(ns, means);
  const SweepRow& anchor = rep.rows.back();
  rep.envelope_c = anchor.mean * std::pow(static_cast<double>(anchor.n), 0.25);
  rep.below_baseline = !baseline.empty() && anchor.n == n_max && anchor.mean < rep.baseline_mean;
  rep.nonincreasing = true;
  rep.under_envelope = true;
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    SweepRow& row = rep.rows[k];
    const double scale = std::pow(static_cast<double>(anchor.n) / static_cast<double>(row.n), 0.25);
    row.envelope = rep.envelope_c * std::pow(static_cast<double>(row.n), -0.25);
    const double env_se = anchor.std_error * scale;
    if (row.mean > row.envelope + combined_se(row.std_error, env_se)) rep.under_envelope = false;
    if (k > 0) {
      const SweepRow& prev = rep.rows[k - 1];
      if (row.mean > prev.mean + 2.0 * combined_se(row.std_error, prev.std_error)) rep.nonincreasing = false;
    }
  }
  rep.slope_ok = rep.fit.slope <= -0.1;
  return rep;
}

std::string sweep_points_csv(const SweepReport& r) {
  std::ostringstream out;
  out << "n,seed,w2,loss_mc,aborted\n";
  char buf[160];
  for (const SweepPoint& p : r.points) {
    std::snprintf(buf, sizeof buf, "%zu,%llu,%.17g,%.17g,%d\n", p.n, static_cast<unsigned long long>(p.seed), p.w2,
                  p.loss_mc, p.aborted ? 1 : 0);
    out << buf;
  }
  return out.str();
}

std::string sweep_summary_csv(const SweepReport& r) {
  std::ostringstream out;
  out << "n,w2_mean,w2_se,envelope\n";
  char buf[128];
  for (const SweepRow& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", row.n, row.mean, row.std_error, row.envelope);
    out << buf;
  }
  return out.str();
}

nlohmann::json sweep_report_json(const SweepReport& r) {
  return nlohmann::json{{"estimator", r.estimator},
                        {"heldout", r.heldout},
                        {"baseline_mean", r.baseline_mean},
                        {"baseline_se", r.baseline_se},
                        {"slope", r.fit.slope},
                        {"r_squared", r.fit.r_squared},
                        {"envelope_c", r.envelope_c},
                        {"any_aborted", r.any_aborted},
                        {"below_baseline", r.below_baseline},
                        {"nonincreasing", r.nonincreasing},
                        {"slope_ok", r.slope_ok},
                        {"under_envelope", r.under_envelope}};
}

}  // namespace fmlab::harness
