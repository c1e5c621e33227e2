// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "fmlab/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "fmlab/core/error.hpp"

namespace fmlab {

double kappa_of(double C, std::size_t d, double n, double delta) {
  if (!(C > 0.0)) throw InputError("kappa_of: C must be positive");
  if (d < 1 || !(n >= 1.0)) throw InputError("kappa_of: d and n must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("kappa_of: delta must lie in (0, 1)");
  const double ratio = static_cast<double>(d) * n / delta;
  if (!(ratio > 1.0)) throw InputError("kappa_of: d n / delta must exceed 1");
  return std::sqrt(2.0 * C * std::log(ratio));
}

double n_for_kappa(double C, std::size_t d, double kappa, double delta) {
  if (!(C > 0.0) || d < 1 || !(kappa > 0.0) || !(delta > 0.0 && delta < 1.0))
    throw InputError("n_for_kappa: invalid arguments");
  return delta * std::exp(kappa * kappa / (2.0 * C)) / static_cast<double>(d);
}

double sample_complexity_real(std::size_t W, std::size_t D, std::size_t d, double epsilon, double delta,
                              double c_scale) {
  if (W < 1 || D < 1 || d < 1) throw InputError("sample_complexity: W, D, d must be at least 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("sample_complexity: epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("sample_complexity: delta must lie in (0, 1)");
  if (!(c_scale > 0.0)) throw InputError("sample_complexity: c_scale must be positive");
  const double dd = static_cast<double>(d);
  return c_scale * std::pow(static_cast<double>(W), 2.0 * static_cast<double>(D) - 2.0) * dd * dd /
         std::pow(epsilon, 4.0) * std::log(2.0 / delta);
}

std::uint64_t sample_complexity(std::size_t W, std::size_t D, std::size_t d, double epsilon, double delta,
                                double c_scale) {
  return static_cast<std::uint64_t>(std::ceil(sample_complexity_real(W, D, d, epsilon, delta, c_scale)));
}

double sgd_bound_constant(double p, double gamma) { return 1.0 + p / gamma + p * (p - 1.0) / (2.0 * gamma * gamma); }

double sgd_suboptimality_bound(double e0, double p, double gamma, double b, double i) {
  if (!(p > 1.0)) throw DomainError("sgd_suboptimality_bound: requires p > 1");
  if (!(gamma >= 1.0)) throw InputError("sgd_suboptimality_bound: requires gamma >= 1");
  if (!(i >= 0.0) || !(e0 >= 0.0) || !(b >= 0.0)) throw InputError("sgd_suboptimality_bound: negative argument");
  const double s = i + gamma;
  return std::pow(gamma / s, p) * e0 + sgd_bound_constant(p, gamma) * b / ((p - 1.0) * s);
}

SgdConstants sgd_constants(double alpha, double mu, double L, double sigma_sq) {
  return SgdConstants{alpha * mu, alpha * alpha * L * sigma_sq / 2.0};
}

Vec simulate_sgd_recursion(double e0, double p, double gamma, double b, std::size_t n) {
  Vec e(n + 1);
  e[0] = e0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) + gamma;
    e[i + 1] = std::max(0.0, (1.0 - p / s) * e[i] + b / (s * s));
  }
  return e;
}

LipschitzProfile LipschitzProfile::constant(double L, double t_end) {
  LipschitzProfile p;
  p.edges = {0.0, t_end};
  p.values = {L};
  return p;
}

void LipschitzProfile::validate() const {
  if (edges.size() < 2 || values.size() + 1 != edges.size())
    throw InputError("LipschitzProfile: need one value per interval");
  if (edges.front() != 0.0) throw InputError("LipschitzProfile: first edge must be 0");
  for (std::size_t k = 0; k + 1 < edges.size(); ++k)
    if (!(edges[k + 1] > edges[k])) throw InputError("LipschitzProfile: edges must increase");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("LipschitzProfile: values must be finite and >= 0");
}

double LipschitzProfile::integral(double t_end) const {
  validate();
  double acc = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double lo = edges[k];
    const double hi = std::min(edges[k + 1], t_end);
    if (hi <= lo) break;
    acc += values[k] * (hi - lo);
  }
  return acc;
}

double wasserstein_envelope(double eps_vel, const LipschitzProfile& profile, double t_min) {
  if (!(eps_vel >= 0.0)) throw InputError("wasserstein_envelope: eps_vel must be nonnegative");
  return eps_vel * std::exp(profile.integral(1.0 - t_min));
}

EnvelopeConventions end_to_end_envelopes(double epsilon, double eps_approx, const LipschitzProfile& profile,
                                         double t_min) {
  if (!(epsilon >= 0.0) || !(eps_approx >= 0.0)) throw InputError("end_to_end_envelopes: negative argument");
  const double K = std::exp(profile.integral(1.0 - t_min));
  EnvelopeConventions e;
  e.error_inside = K * std::sqrt(epsilon * epsilon + eps_approx);
  e.error_outside = K * epsilon + eps_approx;
  e.conservative = std::max(e.error_inside, e.error_outside);
  return e;
}

}  // namespace fmlab
