// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>

#include "fmlab/core/error.hpp"
#include "fmlab/train.hpp"

namespace fmlab {

VarianceEstimate estimate_grad_variance(const StochasticGradient& gradient, std::span<const double> theta,
                                        std::size_t n_probes) {
  if (n_probes < 30) throw InputError("estimate_grad_variance: need at least 30 probes");
  const std::size_t p = theta.size();
  std::vector<Vec> grads(n_probes, Vec(p, 0.0));
  for (std::size_t i = 0; i < n_probes; ++i) gradient(i, theta, grads[i]);
  Vec mean(p, 0.0), column(n_probes);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n_probes; ++i) column[i] = grads[i][j];
    mean[j] = pairwise_sum(column) / static_cast<double>(n_probes);
  }
  Vec q(n_probes);
  for (std::size_t i = 0; i < n_probes; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < p; ++j) acc += (grads[i][j] - mean[j]) * (grads[i][j] - mean[j]);
    q[i] = acc;
  }
  const double correction = static_cast<double>(n_probes) / static_cast<double>(n_probes - 1);
  const MeanEstimate m = mean_and_se(q);
  return VarianceEstimate{m.mean * correction, m.std_error * correction, n_probes};
}

VarianceEstimate estimate_grad_variance(const NetworkParams& params, const TargetDistribution& dist,
                                        std::size_t n_probes, std::uint64_t seed, double t_min) {
  MlpEvaluator eval(params.spec);
  const StochasticGradient g = [&](std::size_t i, std::span<const double> theta, std::span<double> grad) {
    const PathSample s = draw_path_sample(dist, seed, i, t_min);
    return eval.accumulate_loss_gradient(theta, s, 1.0, grad, t_min);
  };
  return estimate_grad_variance(g, params.theta, n_probes);
}

PlProxy estimate_pl_proxy(const TrainTrace& trace, double loss_floor) {
  struct Point {
    double loss, gns;
  };
  std::vector<Point> pts;
  for (const TrainRecord& r : trace.records) {
    if (!std::isfinite(r.loss_mc)) continue;
    pts.push_back({r.loss_mc, std::isfinite(r.pop_grad_norm_sq) ? r.pop_grad_norm_sq : r.grad_norm_sq});
  }
  if (std::isfinite(trace.final_loss_mc) && std::isfinite(trace.final_pop_grad_norm_sq))
    pts.push_back({trace.final_loss_mc, trace.final_pop_grad_norm_sq});
  if (pts.size() < 10) throw InputError("estimate_pl_proxy: need at least 10 measured records");
  PlProxy out;
  if (std::isnan(loss_floor)) {
    loss_floor = std::numeric_limits<double>::infinity();
    for (const Point& p : pts) loss_floor = std::min(loss_floor, p.loss);
  }
  out.loss_floor = loss_floor;
  double mu = std::numeric_limits<double>::infinity();
  for (const Point& p : pts) {
    if (!(p.loss > loss_floor)) continue;
    const double ratio = p.gns / (2.0 * (p.loss - loss_floor));
    if (p.gns == 0.0) out.degenerate = true;
    mu = std::min(mu, ratio);
    ++out.records_used;
  }
  out.mu_hat = out.records_used ? mu : 0.0;
  return out;
}

double estimate_smoothness_proxy(const NetworkParams& params, std::span<const PathSample> data, std::size_t pairs,
                                 double radius, std::uint64_t seed, double t_min) {
  Rng rng = make_stream(seed, 0x5300);
  Vec g1(params.theta.size()), g2(params.theta.size());
  double best = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    NetworkParams a = params, b = params;
    for (std::size_t j = 0; j < a.theta.size(); ++j) {
      a.theta[j] += radius * standard_normal(rng);
      b.theta[j] += radius * standard_normal(rng);
    }
    empirical_loss_gradient(a, data, g1, t_min);
    empirical_loss_gradient(b, data, g2, t_min);
    double dg = 0.0, dt = 0.0;
    for (std::size_t j = 0; j < g1.size(); ++j) {
      dg += (g1[j] - g2[j]) * (g1[j] - g2[j]);
      dt += (a.theta[j] - b.theta[j]) * (a.theta[j] - b.theta[j]);
    }
    if (dt > 0.0) best = std::max(best, std::sqrt(dg / dt));
  }
  return best;
}

std::vector<SuboptimalityPoint> run_surrogate_sgd(const QuadraticSurrogate& problem, double alpha, double gamma,
                                                  double e0, std::size_t n_steps, std::size_t runs,
                                                  std::span<const std::size_t> report_steps, std::uint64_t seed) {
  if (runs < 2) throw InputError("run_surrogate_sgd: need at least two runs");
  if (!(e0 >= 0.0)) throw InputError("run_surrogate_sgd: e0 must be nonnegative");
  std::vector<std::size_t> steps(report_steps.begin(), report_steps.end());
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  while (!steps.empty() && steps.back() > n_steps) steps.pop_back();

  std::vector<Vec> values(steps.size(), Vec(runs));
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng = make_stream(seed, r);
    Vec theta{problem.mean + std::sqrt(2.0 * e0)};
    std::size_t slot = 0;
    if (slot < steps.size() && steps[slot] == 0) values[slot++][r] = problem.suboptimality(theta[0]);
    const StochasticGradient g = [&](std::size_t, std::span<const double> th, std::span<double> grad) {
      const double z = problem.mean + problem.stddev * standard_normal(rng);
      grad[0] = th[0] - z;
      return 0.5 * (z - th[0]) * (z - th[0]);
    };
    const StepObserver obs = [&](std::size_t step, double, double, double, std::span<const double> th) {
      if (slot < steps.size() && steps[slot] == step + 1) values[slot++][r] = problem.suboptimality(th[0]);
      return true;
    };
    sgd_minimize(theta, g, alpha, gamma, steps.empty() ? 0 : steps.back(), std::numeric_limits<double>::infinity(),
                 obs);
  }
  std::vector<SuboptimalityPoint> out;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const MeanEstimate m = mean_and_se(values[s]);
    out.push_back({steps[s], m.mean, m.std_error});
  }
  return out;
}

std::vector<std::size_t> log_spaced_steps(std::size_t n, std::size_t per_decade) {
  std::vector<std::size_t> out{0};
  if (n == 0 || per_decade == 0) return out;
  const double decades = std::log10(static_cast<double>(n));
  const std::size_t count = static_cast<std::size_t>(std::ceil(decades * static_cast<double>(per_decade)));
  for (std::size_t k = 0; k <= count; ++k) {
    const double v = std::pow(10.0, std::min(decades, static_cast<double>(k) / static_cast<double>(per_decade)));
    const auto s = static_cast<std::size_t>(std::llround(v));
    if (s > out.back() && s <= n) out.push_back(s);
  }
  if (out.back() != n) out.push_back(n);
  return out;
}

}  // namespace fmlab
