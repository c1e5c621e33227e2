// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

/// Fixed-step integration of dx/dt = u(x, t) on [0, t_end] and sample
/// generation by pushing N(0, I) draws through a learned field.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fmlab/net.hpp"
#include "fmlab/path.hpp"
#include "fmlab/point_cloud.hpp"

namespace fmlab {

enum class Method { kEuler, kRk4 };

std::string to_string(Method m);
Method parse_method(const std::string& name);

struct IntegratorConfig {
  Method method = Method::kRk4;
  std::size_t n_steps = 64;
  double t_end = 1.0 - kDefaultTMin;

  double h() const noexcept { return t_end / static_cast<double>(n_steps); }
  /// Time of grid node i, computed as i * h (no accumulation).
  double time(std::size_t i) const noexcept { return static_cast<double>(i) * h(); }
  void validate() const;
};

/// Writes u(x, t) into `out`.
using VelocityField = std::function<void(std::span<const double> x, double t, std::span<double> out)>;

struct TrajectoryPoint {
  double t = 0.0;
  Vec x;
};
using Trajectory = std::vector<TrajectoryPoint>;

/// n_steps + 1 states, the first being (0, x0). Throws RunAborted carrying
/// the step index if the state becomes non-finite.
Trajectory integrate(const VelocityField& field, std::span<const double> x0, const IntegratorConfig& cfg);
/// Terminal state only.
Vec integrate_terminal(const VelocityField& field, std::span<const double> x0, const IntegratorConfig& cfg);

/// Field of a network at generation time: the z slot receives the starting
/// noise x0 under data conditioning and is zeroed under marginal conditioning.
VelocityField network_field(const NetworkParams& params, std::span<const double> x0);

/// Draws x0 ~ N(0, I) (point i from RNG stream i) and integrates the network
/// field from each.
PointCloud generate(const NetworkParams& params, std::size_t n_samples, const IntegratorConfig& cfg,
                    std::uint64_t seed);
/// Starting points used by generate for the same seed.
PointCloud generation_noise(std::size_t dim, std::size_t n_samples, std::uint64_t seed);

}  // namespace fmlab
