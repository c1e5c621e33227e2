// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <limits>

#include "fmlab/simd/kernels.hpp"

namespace fmlab::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void affine_scalar(const double* w, const double* bias, const double* x, double* y,
                   std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = bias[r] + dot_scalar(w + r * cols, x, cols);
}

void affine_transpose_accumulate_scalar(const double* w, const double* g, double* y,
                                        std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(g[r], w + r * cols, y, cols);
}

void outer_accumulate_scalar(const double* g, const double* x, double* out, std::size_t rows,
                             std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(g[r], x, out + r * cols, cols);
}

RelaxResult relax_row_scalar(const double* cost, double row_potential, const double* col_potential,
                             double* minv, std::int64_t* way, const std::uint8_t* used,
                             std::int64_t from, std::size_t n) {
  RelaxResult best{std::numeric_limits<double>::infinity(), -1};
  for (std::size_t j = 0; j < n; ++j) {
    if (used[j]) continue;
    const double cur = (cost[j] - row_potential) - col_potential[j];
    if (cur < minv[j]) {
      minv[j] = cur;
      way[j] = from;
    }
    if (minv[j] < best.delta) {
      best.delta = minv[j];
      best.column = static_cast<std::int64_t>(j);
    }
  }
  return best;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      Isa::kScalar,
      dot_scalar,
      axpy_scalar,
      squared_distance_scalar,
      affine_scalar,
      affine_transpose_accumulate_scalar,
      outer_accumulate_scalar,
      relax_row_scalar,
  };
  return table;
}

}  // namespace fmlab::simd
