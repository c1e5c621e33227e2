// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "fmlab/simd/kernels.hpp"

namespace fmlab::simd {

#if defined(FMLAB_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(FMLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* select_default() {
  const KernelTable* widest = avx2_kernels();
  if (const char* env = std::getenv("FMLAB_SIMD")) {
    const auto isa = parse_isa(env);
    if (isa == Isa::kScalar) return &scalar_kernels();
    if (isa == Isa::kAvx2 && widest) return widest;
  }
  return widest ? widest : &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{select_default()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  return std::nullopt;
}

const KernelTable* avx2_kernels() {
#if defined(FMLAB_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

Isa active_isa() { return active().isa; }

void set_active(Isa isa) {
  const KernelTable* table = isa == Isa::kScalar ? &scalar_kernels() : avx2_kernels();
  if (!table) throw std::runtime_error("SIMD variant unavailable: " + std::string(isa_name(isa)));
  slot().store(table, std::memory_order_release);
}

}  // namespace fmlab::simd
