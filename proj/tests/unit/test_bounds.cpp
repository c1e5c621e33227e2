// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "fmlab/bounds.hpp"
#include "fmlab/core/error.hpp"

using namespace fmlab;

TEST_CASE("kappa and its inverse") {
  CHECK(kappa_of(1.0, 2, 1e4, 0.05) == doctest::Approx(std::sqrt(2.0 * std::log(2e4 / 0.05))));
  for (double n : {10.0, 1e3, 1e6}) CHECK(n_for_kappa(1.0, 3, kappa_of(1.0, 3, n, 0.1), 0.1) == doctest::Approx(n));
  CHECK_THROWS_AS(kappa_of(1.0, 2, 100, 1.5), InputError);
  CHECK_THROWS_AS(kappa_of(0.0, 2, 100, 0.5), InputError);
}

TEST_CASE("sample complexity value and monotonicity") {
  // W^{2D-2} d^2 / eps^4 log(2 / delta) with W = 4, D = 2, d = 2, eps = 0.5, delta = 0.1.
  const double want = 16.0 * 4.0 / 0.0625 * std::log(20.0);
  CHECK(sample_complexity_real(4, 2, 2, 0.5, 0.1, 1.0) == doctest::Approx(want));
  CHECK(sample_complexity(4, 2, 2, 0.5, 0.1, 1.0) == static_cast<std::uint64_t>(std::ceil(want)));
  CHECK(sample_complexity_real(4, 2, 2, 0.5, 0.1, 3.0) == doctest::Approx(3.0 * want));
  double prev_eps = INFINITY;
  for (double eps : {0.1, 0.2, 0.4, 0.8}) {
    const double v = sample_complexity_real(8, 3, 2, eps, 0.05, 1.0);
    CHECK(v <= prev_eps);
    prev_eps = v;
  }
  CHECK(sample_complexity_real(9, 3, 2, 0.5, 0.05, 1.0) >= sample_complexity_real(8, 3, 2, 0.5, 0.05, 1.0));
  CHECK(sample_complexity_real(8, 4, 2, 0.5, 0.05, 1.0) >= sample_complexity_real(8, 3, 2, 0.5, 0.05, 1.0));
  CHECK(sample_complexity_real(8, 3, 3, 0.5, 0.05, 1.0) >= sample_complexity_real(8, 3, 2, 0.5, 0.05, 1.0));
  CHECK_THROWS_AS(sample_complexity_real(4, 2, 2, 1.5, 0.1, 1.0), InputError);
}

TEST_CASE("SGD bound constants") {
  CHECK(sgd_bound_constant(2.0, 2.0) == doctest::Approx(1.0 + 1.0 + 2.0 / 8.0));
  const SgdConstants c = sgd_constants(2.0, 1.5, 3.0, 0.5);
  CHECK(c.p == 3.0);
  CHECK(c.b == doctest::Approx(3.0));
  CHECK(sgd_suboptimality_bound(1.0, 2.0, 2.0, 0.0, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(sgd_suboptimality_bound(1.0, 1.0, 2.0, 1.0, 5.0), DomainError);
  CHECK_THROWS_AS(sgd_suboptimality_bound(1.0, 2.0, 0.5, 1.0, 5.0), InputError);
}

TEST_CASE("simulated recursion stays under the closed form") {
  for (double p : {1.5, 2.0, 4.0})
    for (double gamma : {1.0, 10.0, 100.0})
      for (double b : {0.0, 0.1, 10.0}) {
        const Vec e = simulate_sgd_recursion(1.0, p, gamma, b, 5000);
        for (std::size_t i = 0; i < e.size(); ++i) {
          CHECK(e[i] >= 0.0);
          REQUIRE(e[i] <= sgd_suboptimality_bound(1.0, p, gamma, b, static_cast<double>(i)) * (1 + 1e-12));
        }
      }
}

TEST_CASE("Lipschitz profiles and envelopes") {
  LipschitzProfile p;
  p.edges = {0.0, 0.5, 1.0};
  p.values = {2.0, 4.0};
  CHECK(p.integral(1.0) == doctest::Approx(3.0));
  CHECK(p.integral(0.75) == doctest::Approx(2.0));
  CHECK(wasserstein_envelope(0.1, p, 0.0) == doctest::Approx(0.1 * std::exp(3.0)));
  const EnvelopeConventions e = end_to_end_envelopes(0.2, 0.05, LipschitzProfile::constant(0.0), 0.0);
  CHECK(e.error_inside == doctest::Approx(std::sqrt(0.04 + 0.05)));
  CHECK(e.error_outside == doctest::Approx(0.25));
  CHECK(e.conservative == doctest::Approx(std::max(e.error_inside, e.error_outside)));
  LipschitzProfile bad;
  bad.edges = {0.1, 0.5};
  bad.values = {1.0};
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("empirical field Lipschitz profile") {
  NetworkSpec s;
  s.width = 8;
  const NetworkParams p = init_params(s, 2);
  const auto dist = TargetDistribution::reference_mixture();
  const LipschitzProfile a = estimate_field_lipschitz(p, dist, 50, 4, 3);
  const LipschitzProfile b = estimate_field_lipschitz(p, dist, 200, 4, 3);
  CHECK(a.lower_estimate);
  REQUIRE(a.values.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(a.values[k] > 0.0);
    CHECK(b.values[k] >= a.values[k]);
  }
}
