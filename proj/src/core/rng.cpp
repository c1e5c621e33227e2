// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "fmlab/core/rng.hpp"

#include <cmath>

namespace fmlab {

std::uint64_t mix_seed(std::uint64_t value) noexcept {
  value += 0x9e3779b97f4a7c15ULL;
  value = (value ^ (value >> 30)) * 0xbf58476d1ce4e5b9ULL;
  value = (value ^ (value >> 27)) * 0x94d049bb133111ebULL;
  return value ^ (value >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix_seed(seed ^ mix_seed(tag + 0x632be59bd9b4e019ULL));
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t s = mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

double standard_normal(Rng& rng) {
  // Box-Muller on two fresh uniforms keeps each draw a pure function of the
  // generator state (no cached second variate inside a distribution object).
  constexpr double kTwoPi = 6.283185307179586476925287;
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double uniform01(Rng& rng) {
  // 53 random bits -> [0, 1).
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void fill_standard_normal(Rng& rng, std::span<double> out) {
  for (double& v : out) v = standard_normal(rng);
}

}  // namespace fmlab
