// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "fmlab/core/error.hpp"
#include "fmlab/metrics.hpp"
#include "fmlab/simd/kernels.hpp"

namespace fmlab {

double w2_exact(const PointCloud& a, const PointCloud& b) {
  a.validate();
  b.validate();
  if (a.dim() != b.dim()) throw InputError("w2_exact: dimension mismatch");
  if (a.size() != b.size()) throw InputError("w2_exact: clouds must have equal size");
  const std::size_t n = a.size();
  if (n > kMaxExactW2Points) throw InputError("w2_exact: cloud larger than the exact solver cap");
  const auto& k = simd::active();
  Vec cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost[i * n + j] = k.squared_distance(a.point(i).data(), b.point(j).data(), a.dim());
  const Assignment asg = solve_assignment(cost, n);
  return std::sqrt(std::max(0.0, asg.cost / static_cast<double>(n)));
}

double w2_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InputError("w2_1d: empty sample");
  Vec sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  Vec terms;
  if (sa.size() == sb.size()) {
    terms.resize(sa.size());
    for (std::size_t i = 0; i < sa.size(); ++i) terms[i] = (sa[i] - sb[i]) * (sa[i] - sb[i]);
    return std::sqrt(pairwise_sum(terms) / static_cast<double>(sa.size()));
  }
  // Integrate the squared gap of the two quantile step functions over the
  // merged breakpoints i/n and j/m, with exact rational positions.
  const std::size_t n = sa.size(), m = sb.size();
  std::size_t i = 0, j = 0;
  std::size_t pos = 0;  // current position in units of 1/(n m)
  const double unit = 1.0 / (static_cast<double>(n) * static_cast<double>(m));
  while (i < n && j < m) {
    const std::size_t next_a = (i + 1) * m, next_b = (j + 1) * n;
    const std::size_t next = std::min(next_a, next_b);
    const double gap = sa[i] - sb[j];
    terms.push_back(gap * gap * static_cast<double>(next - pos) * unit);
    pos = next;
    if (next_a == next) ++i;
    if (next_b == next) ++j;
  }
  return std::sqrt(pairwise_sum(terms));
}

double w2_sliced(const PointCloud& a, const PointCloud& b, std::size_t n_projections, std::uint64_t seed) {
  a.validate();
  b.validate();
  if (a.dim() != b.dim()) throw InputError("w2_sliced: dimension mismatch");
  if (n_projections == 0) throw InputError("w2_sliced: need at least one projection");
  const std::size_t d = a.dim();
  const auto& k = simd::active();
  Vec dir(d), pa(a.size()), pb(b.size()), per(n_projections);
  for (std::size_t p = 0; p < n_projections; ++p) {
    Rng rng = make_stream(seed, p);
    double norm = 0.0;
    while (norm == 0.0) {
      fill_standard_normal(rng, dir);
      norm = std::sqrt(squared_norm(dir));
    }
    for (double& v : dir) v /= norm;
    for (std::size_t i = 0; i < a.size(); ++i) pa[i] = k.dot(a.point(i).data(), dir.data(), d);
    for (std::size_t i = 0; i < b.size(); ++i) pb[i] = k.dot(b.point(i).data(), dir.data(), d);
    const double w = w2_1d(pa, pb);
    per[p] = w * w;
  }
  return std::sqrt(pairwise_sum(per) / static_cast<double>(n_projections));
}

double w2_sliced_normalized(const PointCloud& a, const PointCloud& b, std::size_t n_projections,
                            std::uint64_t seed) {
  return std::sqrt(static_cast<double>(a.dim())) * w2_sliced(a, b, n_projections, seed);
}

double gaussian_w2_oracle(std::span<const double> m1, double s1, std::span<const double> m2, double s2) {
  if (m1.size() != m2.size() || m1.empty()) throw InputError("gaussian_w2_oracle: dimension mismatch");
  if (!(s1 >= 0.0) || !(s2 >= 0.0)) throw InputError("gaussian_w2_oracle: scales must be nonnegative");
  double acc = 0.0;
  for (std::size_t k = 0; k < m1.size(); ++k) acc += (m1[k] - m2[k]) * (m1[k] - m2[k]);
  return std::sqrt(acc + static_cast<double>(m1.size()) * (s1 - s2) * (s1 - s2));
}

}  // namespace fmlab
