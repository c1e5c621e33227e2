// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace fmlab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t value) noexcept;
/// Seed for a named sub-experiment of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

/// Independent generator for (seed, stream). Streams with different indices
/// never share state, so per-sample or per-worker draws stay reproducible
/// regardless of evaluation order.
Rng make_stream(std::uint64_t seed, std::uint64_t stream = 0);

double standard_normal(Rng& rng);
double uniform01(Rng& rng);
void fill_standard_normal(Rng& rng, std::span<double> out);

}  // namespace fmlab
