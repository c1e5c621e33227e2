// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "fmlab/ode.hpp"

#include <cmath>
#include <memory>

#include "fmlab/core/error.hpp"

namespace fmlab {

std::string to_string(Method m) { return m == Method::kEuler ? "euler" : "rk4"; }

Method parse_method(const std::string& name) {
  if (name == "euler") return Method::kEuler;
  if (name == "rk4") return Method::kRk4;
  throw InputError("unknown integration method '" + name + "'");
}

void IntegratorConfig::validate() const {
  if (n_steps < 1) throw ConfigError("n_steps", "must be at least 1");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end", "must be positive");
}

namespace {

// Advances x from node i to node i + 1 in place.
class Stepper {
 public:
  Stepper(const VelocityField& field, const IntegratorConfig& cfg, std::size_t dim)
      : field_(field), cfg_(cfg), k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

  void step(std::size_t i, Vec& x) {
    const double h = cfg_.h();
    const double t0 = cfg_.time(i);
    const std::size_t d = x.size();
    field_(x, t0, k1_);
    if (cfg_.method == Method::kEuler) {
      for (std::size_t k = 0; k < d; ++k) x[k] += h * k1_[k];
      return;
    }
    const double tm = t0 + 0.5 * h;
    for (std::size_t k = 0; k < d; ++k) tmp_[k] = x[k] + 0.5 * h * k1_[k];
    field_(tmp_, tm, k2_);
    for (std::size_t k = 0; k < d; ++k) tmp_[k] = x[k] + 0.5 * h * k2_[k];
    field_(tmp_, tm, k3_);
    for (std::size_t k = 0; k < d; ++k) tmp_[k] = x[k] + h * k3_[k];
    field_(tmp_, cfg_.time(i + 1), k4_);
    for (std::size_t k = 0; k < d; ++k) x[k] += h / 6.0 * (k1_[k] + 2.0 * k2_[k] + 2.0 * k3_[k] + k4_[k]);
  }

 private:
  const VelocityField& field_;
  const IntegratorConfig& cfg_;
  Vec k1_, k2_, k3_, k4_, tmp_;
};

void check_state(const Vec& x, std::size_t step) {
  if (!all_finite(x)) throw RunAborted(step, "integrator state became non-finite");
}

}  // namespace

Trajectory integrate(const VelocityField& field, std::span<const double> x0, const IntegratorConfig& cfg) {
  cfg.validate();
  if (x0.empty()) throw InputError("integrate: empty initial state");
  Trajectory traj;
  traj.reserve(cfg.n_steps + 1);
  Vec x(x0.begin(), x0.end());
  traj.push_back({0.0, x});
  Stepper stepper(field, cfg, x.size());
  for (std::size_t i = 0; i < cfg.n_steps; ++i) {
    stepper.step(i, x);
    check_state(x, i + 1);
    traj.push_back({cfg.time(i + 1), x});
  }
  return traj;
}

Vec integrate_terminal(const VelocityField& field, std::span<const double> x0, const IntegratorConfig& cfg) {
  cfg.validate();
  if (x0.empty()) throw InputError("integrate: empty initial state");
  Vec x(x0.begin(), x0.end());
  Stepper stepper(field, cfg, x.size());
  for (std::size_t i = 0; i < cfg.n_steps; ++i) {
    stepper.step(i, x);
    check_state(x, i + 1);
  }
  return x;
}

VelocityField network_field(const NetworkParams& params, std::span<const double> x0) {
  auto eval = std::make_shared<MlpEvaluator>(params.spec);
  auto z = std::make_shared<Vec>(x0.begin(), x0.end());
  const NetworkParams* p = &params;
  return [eval, z, p](std::span<const double> x, double t, std::span<double> out) {
    const auto u = eval->forward(p->theta, x, t, *z);
    std::copy(u.begin(), u.end(), out.begin());
  };
}

PointCloud generation_noise(std::size_t dim, std::size_t n_samples, std::uint64_t seed) {
  PointCloud cloud = PointCloud::with_size(dim, n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng = make_stream(seed, i);
    fill_standard_normal(rng, cloud.point(i));
  }
  return cloud;
}

PointCloud generate(const NetworkParams& params, std::size_t n_samples, const IntegratorConfig& cfg,
                    std::uint64_t seed) {
  if (n_samples == 0) throw InputError("generate: n_samples must be positive");
  cfg.validate();
  const std::size_t d = params.spec.data_dim;
  const PointCloud noise = generation_noise(d, n_samples, seed);
  PointCloud out = PointCloud::with_size(d, n_samples);
  MlpEvaluator eval(params.spec);
  Vec z(d);
  const VelocityField field = [&](std::span<const double> x, double t, std::span<double> o) {
    const auto u = eval.forward(params.theta, x, t, z);
    std::copy(u.begin(), u.end(), o.begin());
  };
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto x0 = noise.point(i);
    std::copy(x0.begin(), x0.end(), z.begin());
    const Vec xt = integrate_terminal(field, x0, cfg);
    std::copy(xt.begin(), xt.end(), out.point(i).begin());
  }
  return out;
}

}  // namespace fmlab
