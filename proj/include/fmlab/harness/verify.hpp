// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

/// Fast property suite over all modules, runnable from the command line.
/// Fault modes deliberately break one computation so the corresponding
/// property can be seen to fail.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fmlab::harness {

enum class Fault {
  kNone,
  kFlipGradientSign,  // analytic gradients are negated before comparison
  kEulerForRk4,       // the RK4 order test integrates with Euler
};

std::optional<Fault> parse_fault(const std::string& name);
std::string to_string(Fault f);

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<PropertyResult> run_verify_suite(std::uint64_t seed, Fault fault = Fault::kNone);

}  // namespace fmlab::harness
