// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fmlab/core/file_io.hpp"
#include "fmlab/core/numeric.hpp"
#include "fmlab/core/rng.hpp"
#include "fmlab/point_cloud.hpp"
#include "helpers.hpp"

using namespace fmlab;

TEST_CASE("streams are reproducible and distinct") {
  Rng a = make_stream(11, 3), b = make_stream(11, 3), c = make_stream(11, 4), d = make_stream(12, 3);
  const auto x = a(), y = b(), z = c(), w = d();
  CHECK(x == y);
  CHECK(x != z);
  CHECK(x != w);
  CHECK(derive_seed(5, 1) != derive_seed(5, 2));
  CHECK(derive_seed(5, 1) == derive_seed(5, 1));
  CHECK(derive_seed(5, 1) != derive_seed(6, 1));
}

TEST_CASE("normal and uniform draws have the right moments") {
  Rng rng = make_stream(2024);
  const std::size_t n = 200000;
  Vec g(n), u(n);
  fill_standard_normal(rng, g);
  for (double& v : u) v = uniform01(rng);
  const MeanEstimate mg = mean_and_se(g), mu = mean_and_se(u);
  CHECK(std::abs(mg.mean) < 4.0 * mg.std_error);
  CHECK(std::abs(mu.mean - 0.5) < 4.0 * mu.std_error);
  Vec g2(n);
  for (std::size_t i = 0; i < n; ++i) g2[i] = g[i] * g[i];
  const MeanEstimate m2 = mean_and_se(g2);
  CHECK(std::abs(m2.mean - 1.0) < 4.0 * m2.std_error);
  for (double v : u) REQUIRE((v >= 0.0 && v < 1.0));
}

TEST_CASE("pairwise sum is exact on integers and order independent of producers") {
  Vec v(1001);
  std::iota(v.begin(), v.end(), 0.0);
  CHECK(pairwise_sum(v) == 500500.0);
  CHECK(pairwise_sum(Vec{}) == 0.0);
  Vec tiny(1 << 16, 0.1);
  CHECK(std::abs(pairwise_sum(tiny) - 6553.6) < 1e-9);
}

TEST_CASE("mean and standard error") {
  const Vec v{1.0, 2.0, 3.0, 4.0};
  const MeanEstimate m = mean_and_se(v);
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(m.count == 4);
  CHECK(combined_se(3.0, 4.0) == doctest::Approx(5.0));
}

TEST_CASE("normal distribution functions match tabulated values") {
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
  CHECK(normal_cdf(-1.96) == doctest::Approx(0.024997895148220435).epsilon(1e-12));
  CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  CHECK(normal_sf(10.0) == doctest::Approx(7.619853024160527e-24).epsilon(1e-10));
}

TEST_CASE("line fit recovers an exact line") {
  const Vec x{0, 1, 2, 3, 4}, y{1, 3, 5, 7, 9};
  const LineFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
}

TEST_CASE("vector helpers") {
  const Vec v{3.0, -4.0};
  CHECK(squared_norm(v) == 25.0);
  CHECK(max_abs(v) == 4.0);
  CHECK(all_finite(v));
  CHECK_FALSE(all_finite(Vec{1.0, NAN}));
}

TEST_CASE("file helpers round trip bytes and hash stably") {
  const auto dir = testing::scratch_dir("core_io");
  const std::string payload("ab\0cd", 5);
  write_file_bytes(dir / "blob", payload);
  CHECK(read_file_bytes(dir / "blob") == payload);
  CHECK(fnv1a_hex(std::string("")) == "cbf29ce484222325");
  CHECK(fnv1a_hex(std::string("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("point cloud accessors and csv") {
  PointCloud c(2, {1.0, 2.0, 3.0, 4.0});
  CHECK(c.size() == 2);
  CHECK(c.point(1)[0] == 3.0);
  const Vec m = c.mean();
  CHECK(m[0] == 2.0);
  CHECK(m[1] == 3.0);
  const std::string csv = point_cloud_csv(c);
  CHECK(csv.rfind("x0,x1\n", 0) == 0);
  CHECK_THROWS(PointCloud(2, {1.0, NAN}).validate());
  CHECK_THROWS(PointCloud().validate());
}
