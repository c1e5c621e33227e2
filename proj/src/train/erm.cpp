// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include "fmlab/core/error.hpp"
#include "fmlab/simd/kernels.hpp"
#include "fmlab/train.hpp"

namespace fmlab {

double empirical_loss_gradient(const NetworkParams& params, std::span<const PathSample> data,
                               std::span<double> grad, double t_min) {
  if (data.empty()) throw InputError("empirical_loss_gradient: dataset is empty");
  if (grad.size() != params.theta.size()) throw InputError("empirical_loss_gradient: gradient length mismatch");
  std::fill(grad.begin(), grad.end(), 0.0);
  MlpEvaluator eval(params.spec);
  const double scale = 1.0 / static_cast<double>(data.size());
  Vec losses(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    losses[i] = eval.accumulate_loss_gradient(params.theta, data[i], scale, grad, t_min);
  return pairwise_sum(losses) * scale;
}

GdResult gd_minimize(Vec theta, const Objective& objective, const GdConfig& cfg) {
  if (!(cfg.step > 0.0)) throw InputError("gd_minimize: step must be positive");
  const auto& k = simd::active();
  Vec grad(theta.size());
  GdResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0;; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    const double value = objective(theta, grad);
    if (!std::isfinite(value) || !all_finite(grad)) break;
    const double gn = std::sqrt(k.dot(grad.data(), grad.data(), grad.size()));
    if (value < best.value || best.theta.empty()) {
      best.theta = theta;
      best.value = value;
      best.grad_norm = gn;
      best.iterations = it;
    }
    if (it >= cfg.budget) break;
    if (gn < cfg.tol) {
      return GdResult{theta, value, gn, it, true};
    }
    k.axpy(-cfg.step, grad.data(), theta.data(), theta.size());
    clamp_to_bound(theta, cfg.clamp_bound);
  }
  if (best.theta.empty()) best.theta = std::move(theta);
  best.converged = false;
  return best;
}

ErmResult erm_proxy_train(const NetworkParams& init, std::span<const PathSample> data, GdConfig cfg, double t_min) {
  if (data.empty()) throw InputError("erm_proxy_train: dataset is empty");
  if (!std::isfinite(cfg.clamp_bound)) cfg.clamp_bound = init.spec.param_bound;
  const Objective objective = [&](std::span<const double> theta, std::span<double> grad) {
    NetworkParams p{init.spec, Vec(theta.begin(), theta.end())};
    return empirical_loss_gradient(p, data, grad, t_min);
  };
  GdResult r = gd_minimize(init.theta, objective, cfg);
  ErmResult out;
  out.params = NetworkParams{init.spec, std::move(r.theta)};
  out.loss = r.value;
  out.grad_norm = r.grad_norm;
  out.iterations = r.iterations;
  out.converged = r.converged;
  return out;
}

}  // namespace fmlab
