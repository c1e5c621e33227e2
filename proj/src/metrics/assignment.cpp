// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <limits>

#include "fmlab/core/error.hpp"
#include "fmlab/metrics.hpp"
#include "fmlab/simd/kernels.hpp"

namespace fmlab {

Assignment solve_assignment(std::span<const double> cost, std::size_t n) {
  if (n == 0) throw InputError("solve_assignment: empty problem");
  if (cost.size() != n * n) throw InputError("solve_assignment: cost matrix must be n x n");
  const auto& k = simd::active();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Index 0 of the column arrays is a virtual column; rows are 1-based.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::int64_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<std::uint8_t> used(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = static_cast<std::int64_t>(i);
    std::int64_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), std::uint8_t{0});
    do {
      used[j0] = 1;
      const std::int64_t i0 = p[j0];
      const double* row = cost.data() + static_cast<std::size_t>(i0 - 1) * n;
      const simd::RelaxResult r =
          k.relax_row(row, u[i0], v.data() + 1, minv.data() + 1, way.data() + 1, used.data() + 1, j0, n);
      if (r.column < 0) throw DomainError("solve_assignment: no augmenting column (non-finite costs?)");
      const double delta = r.delta;
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = r.column + 1;
    } while (p[j0] != 0);
    do {
      const std::int64_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.column_of_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.column_of_row[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  Vec terms(n);
  for (std::size_t i = 0; i < n; ++i) terms[i] = cost[i * n + out.column_of_row[i]];
  out.cost = pairwise_sum(terms);
  return out;
}

}  // namespace fmlab
