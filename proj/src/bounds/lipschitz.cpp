// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "fmlab/bounds.hpp"
#include "fmlab/core/error.hpp"

namespace fmlab {

LipschitzProfile estimate_field_lipschitz(const NetworkParams& params, const TargetDistribution& dist,
                                          std::size_t n_probes, std::size_t n_bins, std::uint64_t seed,
                                          double t_min) {
  if (n_bins < 1) throw InputError("estimate_field_lipschitz: need at least one bin");
  if (n_probes < 1) throw InputError("estimate_field_lipschitz: need at least one probe");
  if (dist.dim() != params.spec.data_dim) throw InputError("estimate_field_lipschitz: dimension mismatch");
  const std::size_t d = params.spec.data_dim;
  const double t_end = 1.0 - t_min;
  LipschitzProfile profile;
  profile.lower_estimate = true;
  profile.edges.resize(n_bins + 1);
  for (std::size_t k = 0; k <= n_bins; ++k)
    profile.edges[k] = t_end * static_cast<double>(k) / static_cast<double>(n_bins);
  profile.values.assign(n_bins, 0.0);

  MlpEvaluator eval(params.spec);
  Vec z(d), g(d), x1(d), x2(d), u1(d);
  for (std::size_t bin = 0; bin < n_bins; ++bin) {
    for (std::size_t i = 0; i < n_probes; ++i) {
      Rng rng = make_stream(derive_seed(seed, bin), i);
      const double t = profile.edges[bin] + (profile.edges[bin + 1] - profile.edges[bin]) * uniform01(rng);
      dist.draw_into(rng, z);
      fill_standard_normal(rng, g);
      const double radius = 0.1 * std::exp(-2.0 * uniform01(rng));
      for (std::size_t k = 0; k < d; ++k) {
        x1[k] = t * z[k] + (1.0 - t) * g[k];
        x2[k] = x1[k] + radius * standard_normal(rng);
      }
      double dx = 0.0;
      for (std::size_t k = 0; k < d; ++k) dx += (x1[k] - x2[k]) * (x1[k] - x2[k]);
      if (dx == 0.0) continue;
      const auto o1 = eval.forward(params.theta, x1, t, z);
      std::copy(o1.begin(), o1.end(), u1.begin());
      const auto o2 = eval.forward(params.theta, x2, t, z);
      double du = 0.0;
      for (std::size_t k = 0; k < d; ++k) du += (u1[k] - o2[k]) * (u1[k] - o2[k]);
      profile.values[bin] = std::max(profile.values[bin], std::sqrt(du / dx));
    }
  }
  return profile;
}

}  // namespace fmlab
