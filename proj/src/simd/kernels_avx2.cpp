// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2 -mfma. Nothing here may be called unless the
// dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <cstring>
#include <limits>

#include "fmlab/simd/kernels.hpp"

namespace fmlab::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void affine_avx2(const double* w, const double* bias, const double* x, double* y,
                 std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = bias[r] + dot_avx2(w + r * cols, x, cols);
}

void affine_transpose_accumulate_avx2(const double* w, const double* g, double* y,
                                      std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(g[r], w + r * cols, y, cols);
}

void outer_accumulate_avx2(const double* g, const double* x, double* out, std::size_t rows,
                           std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(g[r], x, out + r * cols, cols);
}

RelaxResult relax_row_avx2(const double* cost, double row_potential, const double* col_potential,
                           double* minv, std::int64_t* way, const std::uint8_t* used,
                           std::int64_t from, std::size_t n) {
  const __m256d vu = _mm256_set1_pd(row_potential);
  const __m256d vfrom = _mm256_castsi256_pd(_mm256_set1_epi64x(from));
  const __m256i zero = _mm256_setzero_si256();
  __m256d best_val = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256i best_idx = _mm256_set1_epi64x(-1);
  __m256i idx = _mm256_set_epi64x(3, 2, 1, 0);
  const __m256i step = _mm256_set1_epi64x(4);

  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    std::uint32_t used_bits;
    std::memcpy(&used_bits, used + j, sizeof(used_bits));
    const __m256i used64 = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(static_cast<int>(used_bits)));
    const __m256d free_mask = _mm256_castsi256_pd(_mm256_cmpeq_epi64(used64, zero));

    const __m256d cur =
        _mm256_sub_pd(_mm256_sub_pd(_mm256_loadu_pd(cost + j), vu), _mm256_loadu_pd(col_potential + j));
    __m256d mv = _mm256_loadu_pd(minv + j);
    const __m256d lt = _mm256_and_pd(_mm256_cmp_pd(cur, mv, _CMP_LT_OQ), free_mask);
    mv = _mm256_blendv_pd(mv, cur, lt);
    _mm256_storeu_pd(minv + j, mv);
    double* way_d = reinterpret_cast<double*>(way + j);
    _mm256_storeu_pd(way_d, _mm256_blendv_pd(_mm256_loadu_pd(way_d), vfrom, lt));

    const __m256d better = _mm256_and_pd(_mm256_cmp_pd(mv, best_val, _CMP_LT_OQ), free_mask);
    best_val = _mm256_blendv_pd(best_val, mv, better);
    best_idx = _mm256_castpd_si256(
        _mm256_blendv_pd(_mm256_castsi256_pd(best_idx), _mm256_castsi256_pd(idx), better));
    idx = _mm256_add_epi64(idx, step);
  }

  alignas(32) double vals[4];
  alignas(32) std::int64_t cols[4];
  _mm256_store_pd(vals, best_val);
  _mm256_store_si256(reinterpret_cast<__m256i*>(cols), best_idx);
  RelaxResult best{std::numeric_limits<double>::infinity(), -1};
  for (int lane = 0; lane < 4; ++lane) {
    if (cols[lane] < 0) continue;
    if (vals[lane] < best.delta || (vals[lane] == best.delta && cols[lane] < best.column)) {
      best.delta = vals[lane];
      best.column = cols[lane];
    }
  }

  for (; j < n; ++j) {
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

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{
      Isa::kAvx2,
      dot_avx2,
      axpy_avx2,
      squared_distance_avx2,
      affine_avx2,
      affine_transpose_accumulate_avx2,
      outer_accumulate_avx2,
      relax_row_avx2,
  };
  return table;
}

}  // namespace fmlab::simd
