// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "fmlab/core/error.hpp"
#include "fmlab/loss.hpp"
#include "fmlab/train.hpp"

using namespace fmlab;

namespace {

NetworkSpec tiny_spec() {
  NetworkSpec s;
  s.width = 8;
  s.activation = Activation::kGelu;
  return s;
}

}  // namespace

TEST_CASE("step sizes decay from alpha / gamma") {
  TrainConfig c;
  c.alpha = 2.0;
  c.gamma = 4.0;
  CHECK(c.eta(0) == 0.5);
  for (std::size_t i = 0; i < 50; ++i) CHECK(c.eta(i + 1) < c.eta(i));
}

TEST_CASE("config validation names the offending field") {
  TrainConfig c;
  c.alpha = 1.0;
  c.gamma = 1.0;
  c.L_hat = 2.0;
  try {
    c.validate();
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "gamma");
  }
  c.L_hat.reset();
  c.mu_hat = 0.5;
  try {
    c.validate();
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "alpha");
  }
  c.alpha = 4.0;
  c.gamma = 4.0;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("sgd on a deterministic quadratic follows the closed-form product") {
  // f(theta) = theta^2 / 2, so theta_{i+1} = (1 - eta_i) theta_i.
  Vec theta{1.0};
  const StochasticGradient g = [](std::size_t, std::span<const double> th, std::span<double> out) {
    out[0] = th[0];
    return 0.5 * th[0] * th[0];
  };
  const std::size_t done = sgd_minimize(theta, g, 0.5, 2.0, 20, INFINITY);
  CHECK(done == 20);
  double want = 1.0;
  for (std::size_t i = 0; i < 20; ++i) want *= 1.0 - 0.5 / (static_cast<double>(i) + 2.0);
  CHECK(theta[0] == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("sgd clamps and aborts on non-finite gradients") {
  Vec theta{0.0};
  const StochasticGradient push = [](std::size_t, std::span<const double>, std::span<double> out) {
    out[0] = -100.0;
    return 1.0;
  };
  sgd_minimize(theta, push, 1.0, 1.0, 5, 0.5);
  CHECK(theta[0] == 0.5);
  const StochasticGradient bad = [](std::size_t step, std::span<const double>, std::span<double> out) {
    out[0] = step == 3 ? NAN : 1.0;
    return 1.0;
  };
  Vec t2{0.0};
  try {
    sgd_minimize(t2, bad, 0.1, 1.0, 10, INFINITY);
    FAIL("expected abort");
  } catch (const RunAborted& e) {
    CHECK(e.step() == 3);
  }
}

TEST_CASE("flow-matching training reduces the loss and is deterministic") {
  const auto dist = TargetDistribution::reference_mixture();
  const NetworkParams init = init_params(tiny_spec(), 3);
  TrainConfig c;
  c.alpha = 0.5;
  c.gamma = 50.0;
  c.n_steps = 3000;
  c.seed = 4;
  c.log_every = 500;
  c.snapshot_at = {10, 1000};
  const TrainResult a = sgd_train(init, dist, c), b = sgd_train(init, dist, c);
  CHECK_FALSE(a.aborted);
  CHECK(a.params.theta == b.params.theta);
  CHECK(trace_csv(a.trace) == trace_csv(b.trace));
  CHECK(a.trace.records.size() == 3000);
  CHECK(a.trace.snapshots.size() >= 2);
  const double before = population_loss_mc(init, dist, 4000, 1).value;
  const double after = population_loss_mc(a.params, dist, 4000, 1).value;
  CHECK(after < 0.5 * before);
  for (double v : a.params.theta) CHECK(std::abs(v) <= init.spec.param_bound);
  const std::string csv = trace_csv(a.trace);
  CHECK(csv.rfind("step,eta,loss_mc,grad_norm_sq\n", 0) == 0);
  CHECK(csv.find("nan") != std::string::npos);
}

TEST_CASE("training on a dataset cycles through it") {
  const auto data = sample_path(TargetDistribution::reference_mixture(), 2, 64);
  TrainConfig c;
  c.alpha = 0.5;
  c.gamma = 50.0;
  c.n_steps = 640;
  c.log_every = 64;
  const TrainResult r = sgd_train_on_dataset(init_params(tiny_spec(), 1), data, c);
  CHECK_FALSE(r.aborted);
  CHECK(empirical_loss(r.params, data).value < empirical_loss(init_params(tiny_spec(), 1), data).value);
}

TEST_CASE("gradient descent on a quadratic") {
  const Objective f = [](std::span<const double> th, std::span<double> g) {
    g[0] = 2.0 * (th[0] - 3.0);
    g[1] = 4.0 * (th[1] + 1.0);
    return (th[0] - 3.0) * (th[0] - 3.0) + 2.0 * (th[1] + 1.0) * (th[1] + 1.0);
  };
  GdConfig c;
  c.step = 0.1;
  c.budget = 2000;
  c.tol = 1e-10;
  const GdResult r = gd_minimize(Vec{0.0, 0.0}, f, c);
  CHECK(r.converged);
  CHECK(r.theta[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(r.theta[1] == doctest::Approx(-1.0).epsilon(1e-9));
  c.budget = 3;
  CHECK_FALSE(gd_minimize(Vec{0.0, 0.0}, f, c).converged);
}

TEST_CASE("empirical minimizer proxy lowers the empirical loss") {
  const auto data = sample_path(TargetDistribution::reference_mixture(), 3, 128);
  const NetworkParams init = init_params(tiny_spec(), 2);
  GdConfig c;
  c.step = 0.05;
  c.budget = 200;
  const ErmResult r = erm_proxy_train(init, data, c);
  CHECK(r.loss < empirical_loss(init, data).value);
  Vec g(init.theta.size());
  CHECK(empirical_loss_gradient(init, data, g) == doctest::Approx(empirical_loss(init, data).value));
}

TEST_CASE("gradient variance of a known noise model") {
  // g = theta - z with z ~ N(0, 1) per coordinate: variance 1 per coordinate.
  const StochasticGradient g = [](std::size_t step, std::span<const double> th, std::span<double> out) {
    Rng rng = make_stream(42, step);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = th[k] - standard_normal(rng);
    return 0.0;
  };
  const Vec theta{0.3, -0.2, 1.0};
  const VarianceEstimate v = estimate_grad_variance(g, theta, 20000);
  CHECK(std::abs(v.sigma_sq - 3.0) < 4.0 * v.std_error);
  CHECK_THROWS(estimate_grad_variance(g, theta, 5));
}

TEST_CASE("PL proxy on a synthetic trace") {
  TrainTrace t;
  for (std::size_t i = 0; i < 20; ++i) {
    TrainRecord r;
    r.step = i;
    r.loss_mc = 1.0 + 1.0 / static_cast<double>(i + 1);
    r.pop_grad_norm_sq = 2.0 * 0.3 * (r.loss_mc - 1.0);
    t.records.push_back(r);
  }
  const PlProxy p = estimate_pl_proxy(t, 1.0);
  CHECK(p.mu_hat == doctest::Approx(0.3));
  TrainTrace short_trace;
  short_trace.records.resize(3);
  CHECK_THROWS_AS(estimate_pl_proxy(short_trace), InputError);
}

TEST_CASE("smoothness proxy is positive") {
  const auto data = sample_path(TargetDistribution::reference_mixture(), 3, 64);
  CHECK(estimate_smoothness_proxy(init_params(tiny_spec(), 2), data, 5, 1e-3, 1) > 0.0);
}

TEST_CASE("surrogate SGD matches the exact mean recursion") {
  // E e_{i+1} = (1 - eta_i)^2 E e_i + eta_i^2 s^2 / 2 for f = E (z - theta)^2 / 2.
  const QuadraticSurrogate q{0.5, 0.8};
  const double alpha = 2.0, gamma = 3.0, e0 = 1.0;
  const auto steps = log_spaced_steps(500, 5);
  const auto pts = run_surrogate_sgd(q, alpha, gamma, e0, 500, 4000, steps, 13);
  std::vector<double> exact(501);
  exact[0] = e0;
  for (std::size_t i = 0; i < 500; ++i) {
    const double eta = alpha / (static_cast<double>(i) + gamma);
    exact[i + 1] = (1 - eta) * (1 - eta) * exact[i] + eta * eta * q.sigma_sq() / 2.0;
  }
  REQUIRE(pts.size() == steps.size());
  for (const auto& p : pts) {
    CAPTURE(p.step);
    if (p.step == 0) {
      CHECK(p.mean == doctest::Approx(e0));
      continue;
    }
    CHECK(std::abs(p.mean - exact[p.step]) <= 4.0 * p.std_error);
  }
}

TEST_CASE("log spaced steps") {
  const auto s = log_spaced_steps(1000, 4);
  CHECK(s.front() == 0);
  CHECK(s.back() == 1000);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
}
