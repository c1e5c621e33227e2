// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

/// Command-line subcommands. Each returns a process exit status:
/// 0 success, 1 run or property failure, 2 configuration error.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace fmlab::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::string fault;            // verify only
  std::string format = "text";  // bounds only: "text" or "json"
};

int cmd_train(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sample(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_decompose(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_bounds(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Dispatches on the subcommand name; unknown names are configuration errors.
int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace fmlab::harness
