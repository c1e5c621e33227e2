// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "fmlab/bounds.hpp"
#include "fmlab/core/file_io.hpp"
#include "fmlab/decomp.hpp"
#include "fmlab/harness/commands.hpp"
#include "fmlab/harness/config.hpp"
#include "fmlab/harness/ledger.hpp"
#include "fmlab/harness/sweep.hpp"
#include "fmlab/metrics.hpp"
#include "fmlab/net.hpp"
#include "fmlab/ode.hpp"
#include "fmlab/train.hpp"

using namespace fmlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// Forward pass and loss written from the parameter layout alone, so the
// finite differences do not share code with the backward pass under test.
double oracle_loss(const NetworkParams& p, const PathSample& s) {
  const NetworkSpec& spec = p.spec;
  Vec h(s.x.begin(), s.x.end());
  h.push_back(s.t);
  for (double v : s.z) h.push_back(spec.conditioning == Conditioning::kMarginal ? 0.0 : v);
  std::size_t off = 0;
  for (std::size_t l = 0; l < spec.depth; ++l) {
    const bool last = l + 1 == spec.depth;
    const std::size_t in = h.size(), out = last ? spec.data_dim : spec.width;
    Vec next(out);
    for (std::size_t r = 0; r < out; ++r) {
      long double acc = p.theta[off + out * in + r];
      for (std::size_t c = 0; c < in; ++c) acc += static_cast<long double>(p.theta[off + r * in + c]) * h[c];
      const double a = static_cast<double>(acc);
      next[r] = last ? a : (spec.activation == Activation::kTanh ? std::tanh(a) : 0.5 * a * std::erfc(-a / std::sqrt(2.0)));
    }
    off += out * in + out;
    h = next;
  }
  double loss = 0.0;
  for (std::size_t k = 0; k < spec.data_dim; ++k) {
    const double u = (s.z[k] - s.x[k]) / (1.0 - s.t);
    loss += (h[k] - u) * (h[k] - u);
  }
  return loss;
}

Outcome criterion1() {
  Rng rng = make_stream(1001);
  std::size_t bad = 0, partials = 0;
  double worst = 0.0;
  for (std::size_t pair = 0; pair < 200; ++pair) {
    NetworkSpec spec;
    spec.data_dim = 1 + static_cast<std::size_t>(3 * uniform01(rng));
    spec.width = 2 + static_cast<std::size_t>(9 * uniform01(rng));
    spec.depth = 2 + static_cast<std::size_t>(3 * uniform01(rng));
    spec.param_bound = 0.5 + 3.0 * uniform01(rng);
    spec.activation = uniform01(rng) < 0.5 ? Activation::kTanh : Activation::kGelu;
    spec.conditioning = uniform01(rng) < 0.5 ? Conditioning::kData : Conditioning::kMarginal;
    NetworkParams p = zero_params(spec);
    for (double& v : p.theta) v = spec.param_bound * (2.0 * uniform01(rng) - 1.0) / std::sqrt(spec.width);
    Vec z(spec.data_dim), g(spec.data_dim);
    for (double& v : z) v = uniform01(rng);
    fill_standard_normal(rng, g);
    const PathSample s = make_path_sample(z, 0.99 * uniform01(rng), g);
    const LossGradient lg = loss_gradient(p, s);
    for (std::size_t j = 0; j < p.theta.size(); ++j) {
      const double h = 1e-5 * std::max(1.0, std::abs(p.theta[j]));
      NetworkParams hi = p, lo = p;
      hi.theta[j] += h;
      lo.theta[j] -= h;
      const double fd = (oracle_loss(hi, s) - oracle_loss(lo, s)) / (2.0 * h);
      const double err = std::abs(fd - lg.grad[j]);
      ++partials;
      if (err <= 1e-8) continue;
      const double rel = err / std::max(std::abs(fd), std::abs(lg.grad[j]));
      worst = std::max(worst, rel);
      if (rel > 1e-5) ++bad;
    }
  }
  return {bad == 0, fmt("%zu/%zu partials outside tolerance; worst relative error above the floor %.2e", bad, partials,
                        worst)};
}

Outcome criterion2() {
  const Vec z{0.3, 0.8}, x0{0.6, -1.2};
  const VelocityField cond = [&](std::span<const double> x, double t, std::span<double> out) {
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = (z[k] - x[k]) / (1.0 - t);
  };
  IntegratorConfig c;
  c.n_steps = 64;
  const Vec xe = integrate_terminal(cond, x0, c);
  double cond_err = 0.0;
  for (std::size_t k = 0; k < 2; ++k)
    cond_err = std::max(cond_err, std::abs(xe[k] - ((1.0 - c.t_end) * x0[k] + c.t_end * z[k])));

  // The conditional field is integrated exactly by both methods, so orders
  // are measured on the marginal flow of N(m, s^2 I) data, whose exact
  // solution is x(t) = t m + sigma_t x0 with sigma_t^2 = t^2 s^2 + (1 - t)^2.
  const double m = 0.5, s = 0.2;
  const VelocityField marg = [&](std::span<const double> x, double t, std::span<double> out) {
    const double st2 = t * t * s * s + (1.0 - t) * (1.0 - t);
    const double k = (t * s * s - (1.0 - t)) / st2;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = m + k * (x[i] - t * m);
  };
  auto err = [&](Method method, std::size_t n) {
    IntegratorConfig cfg;
    cfg.method = method;
    cfg.n_steps = n;
    const Vec x = integrate_terminal(marg, x0, cfg);
    const double sig = std::sqrt(cfg.t_end * cfg.t_end * s * s + (1.0 - cfg.t_end) * (1.0 - cfg.t_end));
    double e = 0.0;
    for (std::size_t k = 0; k < 2; ++k) e = std::max(e, std::abs(x[k] - (cfg.t_end * m + sig * x0[k])));
    return e;
  };
  const double euler = std::log2(err(Method::kEuler, 64) / err(Method::kEuler, 128));
  const double rk4 = std::log2(err(Method::kRk4, 32) / err(Method::kRk4, 64));
  return {cond_err <= 1e-8 && euler >= 0.9 && rk4 >= 3.5,
          fmt("RK4 terminal error %.2e at 64 steps; orders Euler %.3f, RK4 %.3f", cond_err, euler, rk4)};
}

Outcome criterion3() {
  std::size_t violations = 0, checks = 0;
  for (double p : {1.5, 2.0, 4.0})
    for (double gamma : {1.0, 10.0, 100.0})
      for (double b : {0.0, 0.1, 10.0}) {
        const Vec e = simulate_sgd_recursion(1.0, p, gamma, b, 100000);
        for (std::size_t i = 0; i < e.size(); ++i, ++checks)
          if (e[i] > sgd_suboptimality_bound(1.0, p, gamma, b, static_cast<double>(i))) ++violations;
      }
  return {violations == 0, fmt("%zu violations over %zu (p, gamma, b, i) points", violations, checks)};
}

Outcome criterion4() {
  const QuadraticSurrogate q{0.5, 1.0};
  const double alpha = 2.0, gamma = 2.0, e0 = 1.0;
  const std::size_t n = 10000;
  const SgdConstants c = sgd_constants(alpha, q.mu(), q.smoothness(), q.sigma_sq());
  const auto steps = log_spaced_steps(n, 10);
  const auto pts = run_surrogate_sgd(q, alpha, gamma, e0, n, 2000, steps, 4242);
  std::size_t above = 0;
  double worst = 0.0;
  Vec xs, ys;
  for (const auto& p : pts) {
    const double bound = sgd_suboptimality_bound(e0, c.p, gamma, c.b, static_cast<double>(p.step));
    worst = std::max(worst, p.mean / bound);
    if (p.mean > bound) ++above;
    xs.push_back(static_cast<double>(p.step));
    ys.push_back(p.mean);
  }
  const RateFit fit = opt_rate_fit(xs, ys);
  return {above == 0 && fit.slope <= -0.8,
          fmt("%zu logged steps above the bound (max mean/bound %.3f); final-decade slope %.3f", above, worst,
              fit.slope)};
}

Outcome criterion5() {
  std::size_t bad = 0, cell = 0;
  double worst = 0.0;
  for (double a : {0.5, 1.0, 2.0, 3.0})
    for (double sigma : {0.5, 1.0, 2.0})
      for (double mu : {0.0, 1.0}) {
        const double f = truncated_normal_second_moment(mu, sigma, a);
        const MeanEstimate m = truncated_second_moment_mc(mu, sigma, a, 10000000, derive_seed(5005, cell++));
        const double z = std::abs(m.mean - f) / m.std_error;
        worst = std::max(worst, z);
        if (z > 3.0) ++bad;
      }
  const double f0 = truncated_normal_second_moment(0.0, 1.0, 2.0);
  const MeanEstimate m0 = truncated_second_moment_mc(0.0, 1.0, 2.0, 10000000, 5006);
  const double z0 = std::abs(m0.mean - f0) / m0.std_error;
  return {bad == 0 && z0 <= 3.0,
          fmt("%zu of %zu cells beyond 3 SE (worst %.2f SE); (0,1,2) cell %.2f SE", bad, cell, worst, z0)};
}

Outcome criterion6() {
  bool mills = true;
  for (double k : {0.5, 1.0, 2.0, 3.0, 8.0}) mills = mills && mills_ratio_bound_check(k).holds;
  bool tails = true;
  std::string rates;
  for (double k : {1.0, 2.0, 3.0}) {
    const MeanEstimate r = exceedance_rate(k, 10000000, derive_seed(6006, static_cast<std::uint64_t>(k)));
    const double limit = 1.1 * std::exp(-k * k / 2.0);
    tails = tails && r.mean <= limit;
    rates += fmt(" k=%.0f: %.5f<=%.5f", k, r.mean, limit);
  }
  return {mills && tails, fmt("Mills bound %s;%s", mills ? "holds" : "fails", rates.c_str())};
}

Outcome criterion7() {
  const std::size_t n = 10000, d = 2;
  const double delta = 0.05;
  const double kappa = kappa_of(1.0, d, static_cast<double>(n), delta);
  const auto dist = TargetDistribution::reference_mixture();
  const auto data = sample_path(dist, 7007, n);
  const MeanEstimate f = gated_coordinate_fraction(data, kappa);
  const double limit = 10.0 * delta / static_cast<double>(d * n) + 3.0 * f.std_error;
  return {f.mean <= limit, fmt("kappa %.4f; gated fraction %.3g <= %.3g", kappa, f.mean, limit)};
}

PointCloud gaussian_cloud(std::uint64_t seed, std::size_t n, const Vec& mean, double scale) {
  PointCloud c = PointCloud::with_size(mean.size(), n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = make_stream(seed, i);
    auto p = c.point(i);
    for (std::size_t k = 0; k < mean.size(); ++k) p[k] = mean[k] + scale * standard_normal(rng);
  }
  return c;
}

Outcome criterion8() {
  double gap = 0.0;
  for (std::size_t n : {1, 2, 10, 64, 257, 512}) {
    Rng rng = make_stream(8008, n);
    Vec a(n), b(n);
    for (double& v : a) v = standard_normal(rng);
    for (double& v : b) v = 0.5 + 2.0 * uniform01(rng);
    Vec sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (sa[i] - sb[i]) * (sa[i] - sb[i]);
    gap = std::max(gap, std::abs(w2_exact(PointCloud(1, a), PointCloud(1, b)) - std::sqrt(acc / n)));
  }
  const Vec zero{0.0, 0.0}, shift{1.0, 1.0};
  const PointCloud g0 = gaussian_cloud(8101, 1024, zero, 1.0), g1 = gaussian_cloud(8102, 1024, shift, 1.0);
  const double oracle = gaussian_w2_oracle(zero, 1.0, shift, 1.0);
  const double rel_gauss = std::abs(w2_exact(g0, g1) - oracle) / oracle;

  double rel_sliced = 0.0;
  const Vec offsets[] = {{1.0, 1.0}, {2.0, 0.0}, {0.5, -1.5}};
  std::uint64_t s = 8200;
  for (const Vec& v : offsets) {
    const PointCloud a = gaussian_cloud(s++, 256, zero, 1.0), b = gaussian_cloud(s++, 256, v, 1.0);
    const double exact = w2_exact(a, b);
    rel_sliced = std::max(rel_sliced, std::abs(w2_sliced_normalized(a, b, 256, s++) - exact) / exact);
  }
  return {gap <= 1e-10 && rel_gauss <= 0.10 && rel_sliced <= 0.15,
          fmt("1-D gap %.2e; Gaussian relative error %.4f; sliced relative error %.4f", gap, rel_gauss, rel_sliced)};
}

Outcome criterion9() {
  Rng rng = make_stream(9009);
  std::size_t violations = 0;
  double worst = 0.0;
  for (std::size_t trial = 0; trial < 100000; ++trial) {
    NetworkSpec spec;
    spec.data_dim = 1 + trial % 3;
    spec.width = 1 + static_cast<std::size_t>(8 * uniform01(rng));
    spec.depth = 2 + static_cast<std::size_t>(3 * uniform01(rng));
    spec.param_bound = 0.1 + 2.0 * uniform01(rng);
    spec.activation = static_cast<Activation>(trial % 3);
    NetworkParams p = zero_params(spec);
    const bool extreme = trial % 2 == 0;
    for (double& v : p.theta)
      v = extreme ? (uniform01(rng) < 0.5 ? -spec.param_bound : spec.param_bound)
                  : spec.param_bound * (2.0 * uniform01(rng) - 1.0);
    const double kappa = 5.0 * uniform01(rng);
    Vec in(spec.input_dim());
    for (double& v : in) v = extreme ? (uniform01(rng) < 0.5 ? -kappa : kappa) : kappa * (2.0 * uniform01(rng) - 1.0);
    MlpEvaluator e(spec);
    const double ratio = max_abs(e.forward_encoded(p.theta, in)) / output_growth_bound(spec, kappa);
    worst = std::max(worst, ratio);
    if (ratio > 1.0) ++violations;
  }
  return {violations == 0, fmt("%zu violations; largest output/bound %.4f", violations, worst)};
}

Outcome criterion10() {
  const auto cfg = harness::load_experiment_config(std::filesystem::path(FMLAB_CONFIG_DIR) / "sweep.json",
                                                   {harness::Requirement::kSweep});
  const harness::SweepReport r = harness::run_sweep(cfg);
  std::string rows;
  for (const auto& row : r.rows) rows += fmt(" %zu:%.4f+-%.4f", row.n, row.mean, row.std_error);
  const bool ok = !r.any_aborted && r.below_baseline && r.nonincreasing && r.slope_ok && r.under_envelope;
  return {ok, fmt("baseline %.4f;%s; slope %.3f; (a)%d (b)%d (c)%d (d)%d", r.baseline_mean, rows.c_str(), r.fit.slope,
                  r.below_baseline, r.nonincreasing, r.slope_ok, r.under_envelope)};
}

Outcome criterion11() {
  const auto cfg = harness::load_experiment_config(std::filesystem::path(FMLAB_CONFIG_DIR) / "decompose.json",
                                                   {harness::Requirement::kDecompose});
  std::vector<DecompositionReport> reps;
  bool inequality = true, trend = true;
  std::string stats;
  for (std::size_t n : cfg.decompose->n_grid) {
    DecompConfig dc;
    dc.n = n;
    dc.train = cfg.train;
    dc.erm_same = cfg.decompose->erm_same;
    dc.erm_big = cfg.decompose->erm_big;
    dc.big_factor = cfg.decompose->big_factor;
    dc.n_mc = cfg.decompose->n_mc;
    dc.delta = cfg.delta;
    dc.seed = cfg.seed;
    reps.push_back(measure_decomposition_replicated(cfg.dist, cfg.network, dc, cfg.decompose->replicates));
    const auto& r = reps.back();
    inequality = inequality && r.inequality_holds;
    if (reps.size() >= 2) {
      const auto& prev = reps[reps.size() - 2];
      trend = trend && r.stat.value <= prev.stat.value + 2.0 * combined_se(r.stat.std_error, prev.stat.std_error);
    }
    stats += fmt(" %zu:%.3g", n, r.stat.value);
  }
  const RateFit fit = stat_rate_fit(reps);
  const bool slope = fit.slope >= -1.0 && fit.slope <= -0.2;
  return {inequality && trend && slope, fmt("inequality %s; stat%s; nonincreasing %d; slope %.3f",
                                           inequality ? "holds" : "violated", stats.c_str(), trend, fit.slope)};
}

Outcome criterion12() {
  const auto dir = std::filesystem::path(FMLAB_TEST_TMP) / "determinism";
  std::filesystem::remove_all(dir);
  harness::CommandOptions o;
  o.config = std::filesystem::path(FMLAB_CONFIG_DIR) / "train.json";
  o.out = dir;
  std::ostringstream out, err;
  const int a = harness::cmd_train(o, out, err), b = harness::cmd_train(o, out, err);
  if (a != 0 || b != 0) return {false, "train command failed: " + err.str()};
  harness::RunLedger ledger(dir);
  const auto recs = ledger.read_all();
  if (recs.size() != 2) return {false, "expected two ledger records"};
  bool same = true;
  for (const char* suffix : {"ckpt", "trace.csv"})
    same = same && read_file_bytes(ledger.artifact_path(recs[0].run_id, suffix)) ==
                       read_file_bytes(ledger.artifact_path(recs[1].run_id, suffix));
  return {same && harness::check_ledger(dir).ok,
          fmt("runs %s and %s: checkpoint and trace %s", recs[0].run_id.c_str(), recs[1].run_id.c_str(),
              same ? "bit-identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1},  {2, criterion2},  {3, criterion3},   {4, criterion4},   {5, criterion5},   {6, criterion6},
      {7, criterion7},  {8, criterion8},  {9, criterion9},   {10, criterion10}, {11, criterion11}, {12, criterion12},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", id, secs, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
