// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "fmlab/core/error.hpp"
#include "fmlab/ode.hpp"

using namespace fmlab;

namespace {

double exp_error(Method m, std::size_t steps) {
  const VelocityField f = [](std::span<const double> x, double, std::span<double> out) { out[0] = x[0]; };
  IntegratorConfig c;
  c.method = m;
  c.n_steps = steps;
  c.t_end = 1.0;
  const Vec x = integrate_terminal(f, Vec{1.0}, c);
  return std::abs(x[0] - std::exp(1.0));
}

}  // namespace

TEST_CASE("integrator orders on exponential growth") {
  CHECK(std::log2(exp_error(Method::kEuler, 100) / exp_error(Method::kEuler, 200)) ==
        doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::log2(exp_error(Method::kRk4, 10) / exp_error(Method::kRk4, 20)) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("time-dependent field") {
  // dx/dt = 3 t^2 has x(1) = x0 + 1; RK4 integrates cubics exactly.
  const VelocityField f = [](std::span<const double>, double t, std::span<double> out) { out[0] = 3.0 * t * t; };
  IntegratorConfig c;
  c.n_steps = 3;
  c.t_end = 1.0;
  CHECK(integrate_terminal(f, Vec{2.0}, c)[0] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("trajectory records every grid time") {
  const VelocityField f = [](std::span<const double>, double, std::span<double> out) { out[0] = 1.0; };
  IntegratorConfig c;
  c.n_steps = 8;
  const Trajectory tr = integrate(f, Vec{0.0}, c);
  REQUIRE(tr.size() == 9);
  CHECK(tr.front().t == 0.0);
  CHECK(tr.back().t == doctest::Approx(c.t_end));
  CHECK(tr.back().x[0] == doctest::Approx(c.t_end));
}

TEST_CASE("conditional exact flow follows the straight line") {
  const Vec z{0.2, 0.9}, x0{-1.0, 0.5};
  const VelocityField f = [&](std::span<const double> x, double t, std::span<double> out) {
    for (std::size_t k = 0; k < 2; ++k) out[k] = (z[k] - x[k]) / (1.0 - t);
  };
  IntegratorConfig c;
  c.n_steps = 64;
  for (Method m : {Method::kEuler, Method::kRk4}) {
    c.method = m;
    const Trajectory tr = integrate(f, x0, c);
    for (const auto& p : tr)
      for (std::size_t k = 0; k < 2; ++k) CHECK(p.x[k] == doctest::Approx((1 - p.t) * x0[k] + p.t * z[k]).epsilon(1e-12));
  }
}

TEST_CASE("non-finite states abort") {
  const VelocityField f = [](std::span<const double> x, double, std::span<double> out) { out[0] = x[0] * x[0] * 1e200; };
  IntegratorConfig c;
  c.n_steps = 10;
  CHECK_THROWS_AS(integrate_terminal(f, Vec{1.0}, c), RunAborted);
}

TEST_CASE("config validation and method names") {
  IntegratorConfig c;
  c.n_steps = 0;
  CHECK_THROWS(c.validate());
  CHECK(parse_method("euler") == Method::kEuler);
  CHECK(parse_method(to_string(Method::kRk4)) == Method::kRk4);
  CHECK_THROWS(parse_method("midpoint"));
}

TEST_CASE("generation is reproducible and starts from the noise") {
  NetworkSpec s;
  s.width = 6;
  const NetworkParams p = init_params(s, 1);
  IntegratorConfig c;
  c.n_steps = 8;
  const PointCloud a = generate(p, 30, c, 5), b = generate(p, 30, c, 5), other = generate(p, 30, c, 6);
  CHECK(a.data() == b.data());
  CHECK(a.data() != other.data());
  NetworkParams zero = zero_params(s);
  CHECK(generate(zero, 30, c, 5).data() == generation_noise(2, 30, 5).data());
}
