// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace fmlab {

/// Malformed arguments: dimension mismatch, non-finite values, empty inputs.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Time argument too close to t = 1, where the conditional velocity blows up.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A closed-form bound evaluated outside the region where it is derived.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Configuration document rejected. `field()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A numerical run that could not continue (NaN state, divergence).
class RunAborted : public std::runtime_error {
 public:
  RunAborted(std::size_t step, const std::string& message)
      : std::runtime_error(message), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace fmlab
