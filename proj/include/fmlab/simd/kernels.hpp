// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace fmlab::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

/// Result of one row relaxation in the shortest-augmenting-path assignment
/// solver: smallest reduced distance among free columns and its column.
struct RelaxResult {
  double delta;
  std::int64_t column;
};

/// Inner loops shared by the network, the assignment solver, and the
/// projection estimators. Every entry has a scalar reference implementation;
/// vector variants must agree with it (bit-exactly for `relax_row`, to
/// rounding for the reductions).
struct KernelTable {
  Isa isa;

  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  /// y = W x + bias, W row-major with `rows` rows and `cols` columns.
  void (*affine)(const double* w, const double* bias, const double* x, double* y,
                 std::size_t rows, std::size_t cols);
  /// y += W^T g, W row-major rows x cols, g has `rows` entries.
  void (*affine_transpose_accumulate)(const double* w, const double* g, double* y,
                                      std::size_t rows, std::size_t cols);
  /// G += g x^T (rank-one update of a row-major rows x cols matrix).
  void (*outer_accumulate)(const double* g, const double* x, double* out, std::size_t rows,
                           std::size_t cols);
  /// For free columns j (used[j] == 0): cur = cost[j] - row_potential - col_potential[j];
  /// if cur < minv[j] then minv[j] = cur, way[j] = from. Returns the first
  /// free column with the smallest minv.
  RelaxResult (*relax_row)(const double* cost, double row_potential, const double* col_potential,
                           double* minv, std::int64_t* way, const std::uint8_t* used,
                           std::int64_t from, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_kernels();

/// Table selected at first use: the widest variant the CPU supports, unless
/// FMLAB_SIMD=scalar|avx2 overrides it.
const KernelTable& active();
Isa active_isa();

/// Pin the active table (tests and benchmarks). Throws if unavailable.
void set_active(Isa isa);

}  // namespace fmlab::simd
