// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "fmlab/decomp.hpp"

#include <cmath>
#include <cstdio>

#include "fmlab/core/error.hpp"

namespace fmlab {

namespace {

// Sets rhs = 2 approx + 4 stat + 4 opt and a six-standard-error tolerance.
void check_inequality(DecompositionReport& r) {
  r.rhs = 2.0 * r.approx.value + 4.0 * r.stat.value + 4.0 * r.opt.value;
  const double se = std::sqrt(r.total.std_error * r.total.std_error +
                              4.0 * r.approx.std_error * r.approx.std_error +
                              16.0 * r.stat.std_error * r.stat.std_error + 16.0 * r.opt.std_error * r.opt.std_error);
  r.tolerance = 6.0 * se;
}

}  // namespace

DecompositionReport measure_decomposition(const TargetDistribution& dist, const NetworkSpec& spec,
                                          const DecompConfig& cfg) {
  if (cfg.n < 10) throw InputError("measure_decomposition: n must be at least 10");
  if (cfg.big_factor < 1 || cfg.n_mc < 100) throw InputError("measure_decomposition: invalid sizes");
  if (cfg.erm_same.budget == 0 || cfg.erm_big.budget == 0)
    throw InputError("measure_decomposition: budgets must be positive");
  spec.validate();
  const double t_min = cfg.train.t_min;

  const NetworkParams init = init_params(spec, derive_seed(cfg.seed, 1));
  const auto data = sample_path(dist, derive_seed(cfg.seed, 2), cfg.n, t_min);
  const auto big = sample_path(dist, derive_seed(cfg.seed, 3), cfg.n * cfg.big_factor, t_min);
  const auto eval = sample_path(dist, derive_seed(cfg.seed, 4), cfg.n_mc, t_min);

  DecompositionReport r;
  r.n = cfg.n;
  r.n_big = big.size();
  r.delta = cfg.delta;

  const ErmResult theta_b = erm_proxy_train(init, data, cfg.erm_same, t_min);
  const ErmResult theta_a = erm_proxy_train(init, big, cfg.erm_big, t_min);
  r.erm_same_converged = theta_b.converged;
  r.erm_big_converged = theta_a.converged;

  NetworkParams theta = theta_b.params;
  if (!cfg.theta_is_erm) {
    TrainConfig tc = cfg.train;
    tc.n_steps = cfg.n;
    tc.log_every = cfg.n;
    const TrainResult sgd = sgd_train_on_dataset(init, data, tc);
    r.sgd_aborted = sgd.aborted;
    theta = sgd.params;
  }

  r.approx = empirical_loss(theta_a.params, eval, t_min);
  r.stat = field_distance(theta_a.params, theta_b.params, eval);
  r.opt = field_distance(theta, theta_b.params, eval);
  r.total = empirical_loss(theta, eval, t_min);
  check_inequality(r);
  r.inequality_holds = r.total.value <= r.rhs + r.tolerance;
  return r;
}

DecompositionReport measure_decomposition_replicated(const TargetDistribution& dist, const NetworkSpec& spec,
                                                     const DecompConfig& cfg, std::size_t replicates) {
  if (replicates == 0) throw InputError("measure_decomposition_replicated: replicates must be positive");
  if (replicates == 1) return measure_decomposition(dist, spec, cfg);
  std::vector<DecompositionReport> reps;
  for (std::size_t k = 0; k < replicates; ++k) {
    DecompConfig c = cfg;
    c.seed = derive_seed(cfg.seed, 0xdec0 + k);
    reps.push_back(measure_decomposition(dist, spec, c));
  }
  return aggregate_replicates(reps);
}

DecompositionReport aggregate_replicates(std::span<const DecompositionReport> reps) {
  if (reps.empty()) throw InputError("aggregate_replicates: no reports");
  if (reps.size() == 1) return reps.front();
  DecompositionReport out;
  out.n = reps.front().n;
  out.n_big = reps.front().n_big;
  out.delta = reps.front().delta;
  out.replicates = reps.size();
  out.erm_same_converged = out.erm_big_converged = true;
  bool each_holds = true;
  auto pool = [&](LossEstimate DecompositionReport::*term) {
    Vec v;
    std::size_t samples = 0;
    for (const auto& r : reps) {
      if (r.n != out.n) throw InputError("aggregate_replicates: reports disagree on n");
      v.push_back((r.*term).value);
      samples += (r.*term).n_samples;
    }
    const MeanEstimate m = mean_and_se(v);
    return LossEstimate{m.mean, samples, m.std_error};
  };
  for (const auto& r : reps) {
    out.erm_same_converged = out.erm_same_converged && r.erm_same_converged;
    out.erm_big_converged = out.erm_big_converged && r.erm_big_converged;
    out.sgd_aborted = out.sgd_aborted || r.sgd_aborted;
    each_holds = each_holds && r.inequality_holds;
  }
  out.approx = pool(&DecompositionReport::approx);
  out.stat = pool(&DecompositionReport::stat);
  out.opt = pool(&DecompositionReport::opt);
  out.total = pool(&DecompositionReport::total);
  check_inequality(out);
  out.inequality_holds = each_holds && out.total.value <= out.rhs + out.tolerance;
  return out;
}

bool stat_trend_nonincreasing(std::span<const DecompositionReport> reports, double k_se) {
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const LossEstimate& a = reports[i - 1].stat;
    const LossEstimate& b = reports[i].stat;
    if (b.value > a.value + k_se * combined_se(a.std_error, b.std_error)) return false;
  }
  return true;
}

RateFit log_log_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("log_log_fit: length mismatch");
  Vec lx, ly;
  RateFit out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) {
      ++out.excluded;
      continue;
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  if (lx.size() < 2) throw InputError("log_log_fit: fewer than two usable points");
  const LineFit f = fit_line(lx, ly);
  out.slope = f.slope;
  out.intercept = f.intercept;
  out.r_squared = f.r_squared;
  out.points = f.points;
  return out;
}

RateFit stat_rate_fit(std::span<const DecompositionReport> reports) {
  if (reports.size() < 4) throw InputError("stat_rate_fit: need at least 4 grid points");
  Vec n, s;
  double lo = INFINITY, hi = 0.0;
  for (const auto& r : reports) {
    n.push_back(static_cast<double>(r.n));
    s.push_back(r.stat.value);
    lo = std::min(lo, n.back());
    hi = std::max(hi, n.back());
  }
  if (hi < 10.0 * lo) throw InputError("stat_rate_fit: grid must span at least one decade");
  return log_log_fit(n, s);
}

RateFit opt_rate_fit(std::span<const double> steps, std::span<const double> suboptimality) {
  if (steps.size() != suboptimality.size() || steps.empty()) throw InputError("opt_rate_fit: bad input");
  double hi = 0.0;
  for (double s : steps) hi = std::max(hi, s);
  Vec x, y;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i] >= hi / 10.0 && steps[i] > 0.0) {
      x.push_back(steps[i]);
      y.push_back(suboptimality[i]);
    }
  }
  return log_log_fit(x, y);
}

RateFit opt_rate_fit(const TrainTrace& trace, double loss_floor) {
  Vec x, y;
  for (const TrainRecord& r : trace.records) {
    if (!std::isfinite(r.loss_mc) || r.step == 0) continue;
    x.push_back(static_cast<double>(r.step));
    y.push_back(r.loss_mc - loss_floor);
  }
  if (std::isfinite(trace.final_loss_mc)) {
    x.push_back(static_cast<double>(trace.records.size()));
    y.push_back(trace.final_loss_mc - loss_floor);
  }
  return opt_rate_fit(x, y);
}

std::string decomposition_csv_header() {
  return "n,n_big,approx,approx_se,stat,stat_se,opt,opt_se,total,total_se,rhs,tolerance,inequality_holds,"
         "erm_same_converged,erm_big_converged,sgd_aborted,delta";
}

std::string decomposition_csv_row(const DecompositionReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%d,%d,%.17g",
                r.n, r.n_big, r.approx.value, r.approx.std_error, r.stat.value, r.stat.std_error, r.opt.value,
                r.opt.std_error, r.total.value, r.total.std_error, r.rhs, r.tolerance, r.inequality_holds ? 1 : 0,
                r.erm_same_converged ? 1 : 0, r.erm_big_converged ? 1 : 0, r.sgd_aborted ? 1 : 0, r.delta);
  return buf;
}

}  // namespace fmlab
