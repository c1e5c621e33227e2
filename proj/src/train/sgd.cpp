// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fmlab/core/error.hpp"
#include "fmlab/core/file_io.hpp"
#include "fmlab/simd/kernels.hpp"
#include "fmlab/train.hpp"

namespace fmlab {

void TrainConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha", "must be a positive number");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma", "must be a positive number");
  if (clamp_bound && !(*clamp_bound > 0.0)) throw ConfigError("clamp_bound", "must be positive");
  if (log_every == 0) throw ConfigError("log_every", "must be at least 1");
  if (eval_samples == 0) throw ConfigError("eval_samples", "must be at least 1");
  if (!(divergence_factor > 1.0)) throw ConfigError("divergence_factor", "must exceed 1");
  if (!(t_min > 0.0 && t_min < 1.0)) throw ConfigError("t_min", "must lie in (0, 1)");
  if (L_hat) {
    if (!(*L_hat > 0.0)) throw ConfigError("L_hat", "must be positive");
    // The largest step is eta_0 = alpha / gamma.
    if (alpha / gamma > 1.0 / *L_hat)
      throw ConfigError("gamma", "step alpha/gamma exceeds 1/L_hat; choose gamma >= alpha * L_hat");
  }
  if (mu_hat) {
    if (!(*mu_hat > 0.0)) throw ConfigError("mu_hat", "must be positive");
    if (!(alpha * *mu_hat > 1.0)) throw ConfigError("alpha", "alpha * mu_hat must exceed 1");
  }
}

std::size_t sgd_minimize(std::span<double> theta, const StochasticGradient& gradient, double alpha, double gamma,
                         std::size_t n_steps, double clamp_bound, const StepObserver& observer) {
  Vec grad(theta.size());
  const auto& k = simd::active();
  for (std::size_t i = 0; i < n_steps; ++i) {
    std::fill(grad.begin(), grad.end(), 0.0);
    const double loss = gradient(i, theta, grad);
    if (!std::isfinite(loss)) throw RunAborted(i, "non-finite sample loss");
    if (!all_finite(grad)) throw RunAborted(i, "non-finite gradient");
    const double eta = alpha / (static_cast<double>(i) + gamma);
    const double gns = k.dot(grad.data(), grad.data(), grad.size());
    k.axpy(-eta, grad.data(), theta.data(), theta.size());
    clamp_to_bound(theta, clamp_bound);
    if (observer && !observer(i, eta, loss, gns, theta)) return i + 1;
  }
  return n_steps;
}

namespace {

using SampleSource = std::function<const PathSample&(std::size_t)>;

TrainResult train_impl(const NetworkParams& init, const SampleSource& source, std::span<const PathSample> eval_set,
                       const TrainConfig& cfg) {
  cfg.validate();
  init.spec.validate();
  if (init.theta.size() != init.spec.param_count()) throw InputError("sgd_train: theta length does not match spec");
  const double bound = cfg.clamp_bound.value_or(init.spec.param_bound);

  TrainResult result;
  result.params = init;
  TrainTrace& trace = result.trace;
  trace.records.reserve(cfg.n_steps);
  MlpEvaluator eval(init.spec);
  Vec full_grad(init.theta.size());

  auto measure = [&](std::span<const double> theta, double& loss, double& gns) {
    NetworkParams p{init.spec, Vec(theta.begin(), theta.end())};
    loss = empirical_loss_gradient(p, eval_set, full_grad, cfg.t_min);
    gns = squared_norm(full_grad);
  };

  double pending_loss = kNotMeasured, pending_gns = kNotMeasured;
  measure(result.params.theta, pending_loss, pending_gns);
  const double initial_loss = pending_loss;
  auto wants_snapshot = [&](std::size_t step) {
    if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) return true;
    return std::find(cfg.snapshot_at.begin(), cfg.snapshot_at.end(), step) != cfg.snapshot_at.end();
  };
  if (wants_snapshot(0)) trace.snapshots.push_back({0, result.params.theta});

  const StochasticGradient gradient = [&](std::size_t step, std::span<const double> theta, std::span<double> grad) {
    return eval.accumulate_loss_gradient(theta, source(step), 1.0, grad, cfg.t_min);
  };
  const StepObserver observer = [&](std::size_t step, double eta, double, double gns, std::span<const double> theta) {
    TrainRecord rec;
    rec.step = step;
    rec.eta = eta;
    rec.grad_norm_sq = gns;
    rec.loss_mc = pending_loss;
    rec.pop_grad_norm_sq = pending_gns;
    trace.records.push_back(rec);
    pending_loss = pending_gns = kNotMeasured;
    const std::size_t next = step + 1;
    if (wants_snapshot(next)) trace.snapshots.push_back({next, Vec(theta.begin(), theta.end())});
    if (next % cfg.log_every == 0 && next < cfg.n_steps) {
      measure(theta, pending_loss, pending_gns);
      if (!std::isfinite(pending_loss) || pending_loss > cfg.divergence_factor * initial_loss) {
        result.aborted = true;
        result.abort_step = next;
        result.abort_reason = "loss exceeded divergence threshold";
        return false;
      }
    }
    return true;
  };

  try {
    sgd_minimize(result.params.theta, gradient, cfg.alpha, cfg.gamma, cfg.n_steps, bound, observer);
  } catch (const RunAborted& e) {
    result.aborted = true;
    result.abort_step = e.step();
    result.abort_reason = e.what();
  }
  measure(result.params.theta, trace.final_loss_mc, trace.final_pop_grad_norm_sq);
  if (cfg.snapshot_every > 0 && (trace.snapshots.empty() || trace.snapshots.back().step != trace.records.size()))
    trace.snapshots.push_back({trace.records.size(), result.params.theta});
  return result;
}

}  // namespace

TrainResult sgd_train(const NetworkParams& init, const TargetDistribution& dist, const TrainConfig& cfg) {
  if (dist.dim() != init.spec.data_dim) throw InputError("sgd_train: distribution dimension mismatch");
  const auto eval_set = sample_path(dist, derive_seed(cfg.seed, 0xe7a1), cfg.eval_samples, cfg.t_min);
  PathSample current;
  const SampleSource source = [&](std::size_t step) -> const PathSample& {
    current = draw_path_sample(dist, cfg.seed, step, cfg.t_min);
    return current;
  };
  return train_impl(init, source, eval_set, cfg);
}

TrainResult sgd_train_on_dataset(const NetworkParams& init, std::span<const PathSample> data,
                                 const TrainConfig& cfg) {
  if (data.empty()) throw InputError("sgd_train_on_dataset: dataset is empty");
  const SampleSource source = [&](std::size_t step) -> const PathSample& { return data[step % data.size()]; };
  return train_impl(init, source, data, cfg);
}

std::string trace_csv(const TrainTrace& trace) {
  std::ostringstream out;
  out << "step,eta,loss_mc,grad_norm_sq\n";
  char buf[128];
  for (const TrainRecord& r : trace.records) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", r.step, r.eta, r.loss_mc, r.grad_norm_sq);
    out << buf;
  }
  return out.str();
}

void write_trace_csv(const std::filesystem::path& file, const TrainTrace& trace) {
  write_file_text(file, trace_csv(trace));
}

}  // namespace fmlab
