// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include "fmlab/core/error.hpp"
#include "fmlab/metrics.hpp"

namespace fmlab {

double inverse_mills_ratio(double r) {
  if (r > 30.0) {
    const double r2 = r * r;
    return r + 1.0 / r - 2.0 / (r * r2) + 10.0 / (r * r2 * r2);
  }
  return normal_pdf(r) / normal_sf(r);
}

double truncated_normal_second_moment(double mu, double sigma, double a) {
  if (!(sigma > 0.0)) throw InputError("truncated_normal_second_moment: sigma must be positive");
  if (!(a >= 0.0)) throw InputError("truncated_normal_second_moment: a must be nonnegative");
  const double r = a / sigma;
  const double tail = r == 0.0 ? 0.0 : sigma * a * inverse_mills_ratio(r);
  return mu * mu + sigma * sigma + tail;
}

double sample_abs_normal_tail(Rng& rng, double c) {
  if (!(c >= 0.0)) throw InputError("sample_abs_normal_tail: threshold must be nonnegative");
  const double sign = uniform01(rng) < 0.5 ? -1.0 : 1.0;
  if (c == 0.0) return std::abs(standard_normal(rng)) * sign;
  const double lambda = 0.5 * (c + std::sqrt(c * c + 4.0));
  for (;;) {
    double u = uniform01(rng);
    while (u <= 0.0) u = uniform01(rng);
    const double x = c - std::log(u) / lambda;
    const double accept = std::exp(-0.5 * (x - lambda) * (x - lambda));
    if (uniform01(rng) <= accept) return sign * x;
  }
}

MeanEstimate truncated_second_moment_mc(double mu, double sigma, double a, std::size_t n, std::uint64_t seed) {
  if (!(sigma > 0.0) || !(a >= 0.0) || n < 2) throw InputError("truncated_second_moment_mc: invalid arguments");
  Rng rng = make_stream(seed, 0x75);
  Vec values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = mu + sigma * sample_abs_normal_tail(rng, a / sigma);
    values[i] = x * x;
  }
  return mean_and_se(values);
}

MillsCheck mills_ratio_bound_check(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InputError("mills_ratio_bound_check: kappa must be positive");
  MillsCheck m;
  m.ratio = inverse_mills_ratio(kappa);
  m.upper = kappa + 1.0 / kappa;
  m.holds = m.ratio <= m.upper;
  return m;
}

TailIdentity tail_indicator_identity_check(const ScalarSampler& sampler, double k, std::size_t n_mc,
                                           std::uint64_t seed) {
  if (n_mc < 100000) throw InputError("tail_indicator_identity_check: n_mc must be at least 1e5");
  TailIdentity out;
  Vec v(n_mc);
  {
    Rng rng = make_stream(seed, 1);
    for (double& x : v) {
      const double s = sampler(rng);
      x = s > k ? s : 0.0;
    }
    const MeanEstimate m = mean_and_se(v);
    out.lhs = m.mean;
    out.lhs_se = m.std_error;
  }
  MeanEstimate p;
  {
    Rng rng = make_stream(seed, 2);
    for (double& x : v) x = sampler(rng) > k ? 1.0 : 0.0;
    p = mean_and_se(v);
  }
  MeanEstimate cond;
  {
    Rng rng = make_stream(seed, 3);
    Vec accepted;
    accepted.reserve(n_mc);
    const std::size_t max_attempts = 100 * n_mc;
    for (std::size_t a = 0; a < max_attempts && accepted.size() < n_mc; ++a) {
      const double s = sampler(rng);
      if (s > k) accepted.push_back(s);
    }
    if (accepted.size() >= 2) cond = mean_and_se(accepted);
  }
  out.prob = p.mean;
  out.cond_mean = cond.mean;
  out.rhs = p.mean * cond.mean;
  out.rhs_se = std::sqrt(cond.mean * cond.mean * p.std_error * p.std_error +
                         p.mean * p.mean * cond.std_error * cond.std_error);
  const double tol = 4.0 * std::sqrt(out.lhs_se * out.lhs_se + out.rhs_se * out.rhs_se);
  out.agree = std::abs(out.lhs - out.rhs) <= tol + 1e-15;
  return out;
}

MeanEstimate exceedance_rate(double kappa, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InputError("exceedance_rate: need at least two draws");
  Rng rng = make_stream(seed, 0xe8);
  Vec v(n);
  for (double& x : v) x = std::abs(standard_normal(rng)) >= kappa ? 1.0 : 0.0;
  return mean_and_se(v);
}

MeanEstimate gated_coordinate_fraction(std::span<const PathSample> data, double kappa, double t_min) {
  if (data.empty()) throw InputError("gated_coordinate_fraction: dataset is empty");
  Vec v;
  v.reserve(data.size() * data.front().x.size());
  for (const PathSample& s : data) {
    const Truncation tr = truncate_residual(s.x, s.t, s.z, kappa, t_min);
    for (bool in : tr.inside) v.push_back(in ? 0.0 : 1.0);
  }
  return mean_and_se(v);
}

}  // namespace fmlab
