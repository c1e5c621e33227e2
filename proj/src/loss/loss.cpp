// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "fmlab/loss.hpp"

#include <cmath>

#include "fmlab/core/error.hpp"

namespace fmlab {

LossEstimate to_loss_estimate(const MeanEstimate& m) { return LossEstimate{m.mean, m.count, m.std_error}; }

Vec squared_residuals(const NetworkParams& params, std::span<const PathSample> data, double t_min) {
  if (data.empty()) throw InputError("loss: dataset is empty");
  const std::size_t d = params.spec.data_dim;
  MlpEvaluator eval(params.spec);
  Vec target(d);
  Vec out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const PathSample& s = data[i];
    if (s.x.size() != d || s.z.size() != d) throw InputError("loss: sample dimension mismatch");
    target_velocity_into(s.x, s.t, s.z, target, t_min);
    const auto u = eval.forward(params.theta, s.x, s.t, s.z);
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) acc += (u[k] - target[k]) * (u[k] - target[k]);
    out[i] = acc;
  }
  return out;
}

LossEstimate empirical_loss(const NetworkParams& params, std::span<const PathSample> data, double t_min) {
  const Vec r = squared_residuals(params, data, t_min);
  return to_loss_estimate(mean_and_se(r));
}

LossEstimate population_loss_mc(const NetworkParams& params, const TargetDistribution& dist,
                                std::size_t n_mc, std::uint64_t seed, double t_min) {
  if (n_mc < 100) throw InputError("population_loss_mc: n_mc must be at least 100");
  const auto fresh = sample_path(dist, seed, n_mc, t_min);
  return empirical_loss(params, fresh, t_min);
}

LossEstimate field_distance(const NetworkParams& a, const NetworkParams& b, std::span<const PathSample> data) {
  if (!(a.spec == b.spec)) throw InputError("field_distance: parameter specs differ");
  if (data.empty()) throw InputError("field_distance: dataset is empty");
  const std::size_t d = a.spec.data_dim;
  MlpEvaluator ea(a.spec), eb(b.spec);
  Vec terms(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const PathSample& s = data[i];
    const auto ua = ea.forward(a.theta, s.x, s.t, s.z);
    const auto ub = eb.forward(b.theta, s.x, s.t, s.z);
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) acc += (ua[k] - ub[k]) * (ua[k] - ub[k]);
    terms[i] = acc;
  }
  return to_loss_estimate(mean_and_se(terms));
}

TruncatedLosses truncated_losses(const NetworkParams& params, std::span<const PathSample> data, double kappa,
                                 double t_min) {
  if (data.empty()) throw InputError("truncated_losses: dataset is empty");
  if (!(kappa >= 0.0)) throw InputError("truncated_losses: kappa must be nonnegative");
  const std::size_t d = params.spec.data_dim;
  MlpEvaluator eval(params.spec);
  Vec full(data.size()), gated(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const PathSample& s = data[i];
    const TruncatedVelocity tv = truncated_velocities(s.x, s.t, s.z, kappa, t_min);
    const Vec target = target_velocity(s.x, s.t, s.z, t_min);
    const auto u = eval.forward(params.theta, s.x, s.t, s.z);
    double f = 0.0, g = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double r = u[k] - target[k];
      f += r * r;
      if (tv.gate[k]) {
        const double rg = u[k] - tv.target[k];
        g += rg * rg;
      }
    }
    full[i] = f;
    gated[i] = g;
  }
  TruncatedLosses out;
  out.emp_trunc = to_loss_estimate(mean_and_se(gated));
  out.gap = mean_and_se(full).mean - out.emp_trunc.value;
  return out;
}

LossGapRecord loss_gap_diag(const NetworkParams& a, const NetworkParams& b, const TargetDistribution& dist,
                            std::span<const PathSample> data, std::size_t n_mc, std::uint64_t seed, double t_min) {
  if (!(a.spec == b.spec)) throw InputError("loss_gap_diag: parameter specs differ");
  LossGapRecord r;
  const auto fresh = sample_path(dist, seed, n_mc, t_min);
  r.pop_a = empirical_loss(a, fresh, t_min);
  r.pop_b = empirical_loss(b, fresh, t_min);
  r.emp_a = empirical_loss(a, data, t_min);
  r.emp_b = empirical_loss(b, data, t_min);
  r.pop_gap = std::abs(r.pop_b.value - r.pop_a.value);
  r.emp_gap = std::abs(r.emp_b.value - r.emp_a.value);
  r.gen_gap_a = std::abs(r.pop_a.value - r.emp_a.value);
  r.gen_gap_b = std::abs(r.pop_b.value - r.emp_b.value);
  r.slack = 4.0 * std::sqrt(r.pop_a.std_error * r.pop_a.std_error + r.pop_b.std_error * r.pop_b.std_error);
  r.triangle_holds = r.pop_gap <= r.gen_gap_a + r.gen_gap_b + r.emp_gap + r.slack;
  return r;
}

}  // namespace fmlab
