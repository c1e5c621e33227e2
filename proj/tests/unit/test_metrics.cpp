// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fmlab/core/error.hpp"
#include "fmlab/metrics.hpp"

using namespace fmlab;

namespace {

double brute_force_assignment(const Vec& cost, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += cost[i * n + perm[i]];
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Composite Simpson rule for E[X^2 1{|X - mu| > a}] / P(|X - mu| > a).
double truncated_second_moment_quadrature(double mu, double sigma, double a) {
  auto integrate_tail = [&](bool upper, auto&& weight) {
    const double lo = a, hi = a + 14.0 * sigma;
    const int n = 20000;
    const double h = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double y = lo + i * h;
      const double x = upper ? mu + y : mu - y;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * weight(x) * normal_pdf(y / sigma) / sigma;
    }
    return acc * h / 3.0;
  };
  auto sq = [](double x) { return x * x; };
  auto one = [](double) { return 1.0; };
  const double num = integrate_tail(true, sq) + integrate_tail(false, sq);
  const double den = integrate_tail(true, one) + integrate_tail(false, one);
  return num / den;
}

// W2^2 between uniform empirical measures via the quantile integral on a fine grid.
double quantile_w2(Vec a, Vec b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t grid = a.size() * b.size();
  double acc = 0.0;
  for (std::size_t k = 0; k < grid; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(grid);
    const double qa = a[static_cast<std::size_t>(u * a.size())], qb = b[static_cast<std::size_t>(u * b.size())];
    acc += (qa - qb) * (qa - qb);
  }
  return std::sqrt(acc / static_cast<double>(grid));
}

PointCloud gaussian_cloud(Rng& rng, std::size_t n, std::size_t d, double mean, double scale) {
  PointCloud c = PointCloud::with_size(d, n);
  for (std::size_t i = 0; i < n; ++i)
    for (double& v : c.point(i)) v = mean + scale * standard_normal(rng);
  return c;
}

}  // namespace

TEST_CASE("assignment solver matches brute force") {
  Rng rng = make_stream(1);
  for (std::size_t n = 1; n <= 7; ++n)
    for (int trial = 0; trial < 20; ++trial) {
      Vec cost(n * n);
      for (double& c : cost) c = trial % 2 ? std::floor(4.0 * uniform01(rng)) : uniform01(rng);
      const Assignment a = solve_assignment(cost, n);
      REQUIRE(a.cost == doctest::Approx(brute_force_assignment(cost, n)));
      std::vector<std::size_t> cols = a.column_of_row;
      std::sort(cols.begin(), cols.end());
      for (std::size_t i = 0; i < n; ++i) REQUIRE(cols[i] == i);
    }
}

TEST_CASE("exact W2 equals the sorted coupling in one dimension") {
  Rng rng = make_stream(2);
  for (std::size_t n : {1, 2, 17, 128, 512}) {
    Vec a(n), b(n);
    for (double& v : a) v = standard_normal(rng);
    for (double& v : b) v = 3.0 * uniform01(rng);
    Vec sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (sa[i] - sb[i]) * (sa[i] - sb[i]);
    CHECK(std::abs(w2_exact(PointCloud(1, a), PointCloud(1, b)) - std::sqrt(acc / n)) <= 1e-10);
    CHECK(std::abs(w2_1d(a, b) - std::sqrt(acc / n)) <= 1e-10);
  }
}

TEST_CASE("one-dimensional W2 with unequal sizes") {
  Rng rng = make_stream(3);
  Vec a(12), b(8);
  for (double& v : a) v = standard_normal(rng);
  for (double& v : b) v = 1.0 + standard_normal(rng);
  CHECK(w2_1d(a, b) == doctest::Approx(quantile_w2(a, b)).epsilon(1e-9));
}

TEST_CASE("exact W2 input validation") {
  CHECK_THROWS_AS(w2_exact(PointCloud(1, {0.0, 1.0}), PointCloud(1, {0.0})), InputError);
  CHECK_THROWS_AS(w2_exact(PointCloud(1, {0.0}), PointCloud(2, {0.0, 1.0})), InputError);
  const PointCloud big = PointCloud::with_size(1, kMaxExactW2Points + 1);
  CHECK_THROWS_AS(w2_exact(big, big), InputError);
}

TEST_CASE("Gaussian closed form") {
  const Vec m1{0.0, 0.0}, m2{3.0, 4.0};
  CHECK(gaussian_w2_oracle(m1, 1.0, m2, 1.0) == doctest::Approx(5.0));
  CHECK(gaussian_w2_oracle(m1, 1.0, m1, 3.0) == doctest::Approx(std::sqrt(8.0)));
  Rng rng = make_stream(4);
  const PointCloud a = gaussian_cloud(rng, 1024, 2, 0.0, 1.0), b = gaussian_cloud(rng, 1024, 2, 2.0, 1.0);
  const double ref = gaussian_w2_oracle(m1, 1.0, Vec{2.0, 2.0}, 1.0);
  CHECK(std::abs(w2_exact(a, b) - ref) / ref < 0.1);
}

TEST_CASE("sliced W2 under a translation") {
  Rng rng = make_stream(5);
  PointCloud a = gaussian_cloud(rng, 256, 2, 0.0, 1.0), b = a;
  for (std::size_t i = 0; i < b.size(); ++i) {
    b.point(i)[0] += 1.0;
    b.point(i)[1] += 1.0;
  }
  // Each projection of a pure translation by v is a shift by <v, w>.
  const double s = w2_sliced(a, b, 2000, 1);
  CHECK(s * s == doctest::Approx(1.0).epsilon(0.1));
  CHECK(w2_sliced_normalized(a, b, 2000, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
  CHECK(w2_sliced(a, a, 50, 1) == 0.0);
  CHECK(w2_sliced_normalized(a, b, 64, 1) <= w2_exact(a, b) * 1.15);
}

TEST_CASE("truncated second moment formula against quadrature") {
  for (double mu : {0.0, 0.7, -1.5})
    for (double sigma : {0.5, 1.0, 2.5})
      for (double a : {0.1, 1.0, 3.0}) {
        CAPTURE(mu);
        CAPTURE(sigma);
        CAPTURE(a);
        CHECK(truncated_normal_second_moment(mu, sigma, a) ==
              doctest::Approx(truncated_second_moment_quadrature(mu, sigma, a)).epsilon(1e-8));
      }
}

TEST_CASE("inverse Mills ratio stays accurate in the far tail") {
  for (double r : {0.0, 1.0, 5.0, 20.0})
    CHECK(inverse_mills_ratio(r) == doctest::Approx(normal_pdf(r) / normal_sf(r)).epsilon(1e-10));
  const double r = 40.0;
  CHECK(inverse_mills_ratio(r) > r);
  CHECK(inverse_mills_ratio(r) < r + 1.0 / r);
}

TEST_CASE("tail sampler draws only beyond the threshold") {
  Rng rng = make_stream(6);
  double acc = 0.0;
  const std::size_t n = 100000;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = sample_abs_normal_tail(rng, 2.0);
    REQUIRE(std::abs(y) > 2.0);
    acc += std::abs(y);
  }
  // E[|Y| | |Y| > c] is the inverse Mills ratio at c.
  CHECK(acc / n == doctest::Approx(inverse_mills_ratio(2.0)).epsilon(0.01));
}

TEST_CASE("Monte-Carlo second moment agrees with the formula") {
  const MeanEstimate m = truncated_second_moment_mc(0.5, 1.5, 1.0, 200000, 3);
  CHECK(std::abs(m.mean - truncated_normal_second_moment(0.5, 1.5, 1.0)) < 4.0 * m.std_error);
}

TEST_CASE("Mills ratio bound") {
  for (double k : {0.5, 1.0, 2.0, 3.0, 8.0}) {
    const MillsCheck m = mills_ratio_bound_check(k);
    CHECK(m.holds);
    CHECK(m.ratio < m.upper);
    CHECK(m.ratio > k);
  }
}

TEST_CASE("tail indicator identity") {
  const TailIdentity t = tail_indicator_identity_check([](Rng& r) { return standard_normal(r); }, 1.0, 200000, 4);
  CHECK(t.agree);
  CHECK(t.prob == doctest::Approx(normal_sf(1.0)).epsilon(0.02));
  CHECK_THROWS(tail_indicator_identity_check([](Rng& r) { return standard_normal(r); }, 1.0, 1000, 4));
}

TEST_CASE("exceedance and gated fractions") {
  const MeanEstimate e = exceedance_rate(1.0, 400000, 1);
  CHECK(std::abs(e.mean - 2.0 * normal_sf(1.0)) < 4.0 * e.std_error);
  std::vector<PathSample> data;
  data.push_back(make_path_sample(Vec{0.5, 0.5}, 0.5, Vec{0.1, 5.0}));
  data.push_back(make_path_sample(Vec{0.5, 0.5}, 0.5, Vec{-4.0, 0.0}));
  CHECK(gated_coordinate_fraction(data, 3.0).mean == doctest::Approx(0.5));
}
