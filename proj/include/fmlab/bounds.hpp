// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

/// Closed-form bounds: truncation level, sample complexity, the SGD
/// suboptimality envelope, and the Wasserstein envelope of a Lipschitz
/// velocity error. Asymptotic constants are explicit inputs.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fmlab/core/numeric.hpp"
#include "fmlab/net.hpp"
#include "fmlab/path.hpp"

namespace fmlab {

/// kappa = sqrt(2 C log(d n / delta)). Throws InputError unless C > 0,
/// delta in (0, 1) and d n / delta > 1.
double kappa_of(double C, std::size_t d, double n, double delta);
/// The (real) n at which kappa_of(C, d, n, delta) == kappa.
double n_for_kappa(double C, std::size_t d, double kappa, double delta);

/// c_scale W^(2D-2) d^2 eps^-4 log(2 / delta), before rounding.
double sample_complexity_real(std::size_t W, std::size_t D, std::size_t d, double epsilon, double delta,
                              double c_scale);
/// Ceiling of sample_complexity_real. Requires epsilon in (0, 1).
std::uint64_t sample_complexity(std::size_t W, std::size_t D, std::size_t d, double epsilon, double delta,
                                double c_scale);

/// c_{p,gamma} = 1 + p/gamma + p(p-1)/(2 gamma^2).
double sgd_bound_constant(double p, double gamma);
/// gamma^p e0 / (i + gamma)^p + c_{p,gamma} b / ((p - 1)(i + gamma)).
/// Throws DomainError for p <= 1 and InputError for gamma < 1 or i < 0.
double sgd_suboptimality_bound(double e0, double p, double gamma, double b, double i);

struct SgdConstants {
  double p = 0.0;  // alpha mu
  double b = 0.0;  // alpha^2 L sigma^2 / 2
};
SgdConstants sgd_constants(double alpha, double mu, double L, double sigma_sq);

/// e_{i+1} = max(0, (1 - p/(i + gamma)) e_i + b/(i + gamma)^2), i = 0..n-1.
/// Suboptimality is nonnegative, hence the projection at 0.
Vec simulate_sgd_recursion(double e0, double p, double gamma, double b, std::size_t n);

/// Piecewise-constant t -> L_t on [edges[0], edges.back()].
struct LipschitzProfile {
  Vec edges;   // strictly increasing, edges[0] = 0
  Vec values;  // values[k] on [edges[k], edges[k+1])
  bool lower_estimate = false;

  static LipschitzProfile constant(double L, double t_end = 1.0);
  void validate() const;
  /// Exact integral of L_t over [0, t_end], clipped to the profile's range.
  double integral(double t_end) const;
};

/// eps_vel exp(int_0^{1 - t_min} L_t dt).
double wasserstein_envelope(double eps_vel, const LipschitzProfile& profile, double t_min = kDefaultTMin);

/// W2 envelopes of the end-to-end statement under its two readings with
/// K = exp(int L_t dt):
///   error_inside: velocity error eps^2 + eps_approx, W2 <= K sqrt(eps^2 + eps_approx)
///   error_outside: W2 <= K eps + eps_approx
struct EnvelopeConventions {
  double error_inside = 0.0;
  double error_outside = 0.0;
  double conservative = 0.0;  // the larger of the two
};
EnvelopeConventions end_to_end_envelopes(double epsilon, double eps_approx, const LipschitzProfile& profile,
                                         double t_min = kDefaultTMin);

/// Per time bin, the largest ||u(x1, t, z) - u(x2, t, z)|| / ||x1 - x2|| over
/// `n_probes` random nearby pairs around path samples. A lower estimate of
/// L_t; probe i of bin k always uses the same stream, so estimates with more
/// probes dominate those with fewer.
LipschitzProfile estimate_field_lipschitz(const NetworkParams& params, const TargetDistribution& dist,
                                          std::size_t n_probes, std::size_t n_bins, std::uint64_t seed,
                                          double t_min = kDefaultTMin);

}  // namespace fmlab
