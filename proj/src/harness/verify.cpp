// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "fmlab/harness/verify.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <functional>

#include "fmlab/bounds.hpp"
#include "fmlab/loss.hpp"
#include "fmlab/metrics.hpp"
#include "fmlab/net.hpp"
#include "fmlab/ode.hpp"
#include "fmlab/simd/kernels.hpp"
#include "fmlab/train.hpp"

namespace fmlab::harness {

std::optional<Fault> parse_fault(const std::string& name) {
  if (name.empty() || name == "none") return Fault::kNone;
  if (name == "flip-gradient-sign") return Fault::kFlipGradientSign;
  if (name == "euler-for-rk4") return Fault::kEulerForRk4;
  return std::nullopt;
}

std::string to_string(Fault f) {
  switch (f) {
    case Fault::kNone:
      return "none";
    case Fault::kFlipGradientSign:
      return "flip-gradient-sign";
    case Fault::kEulerForRk4:
      return "euler-for-rk4";
  }
  return "none";
}

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

PropertyResult gradient_check(std::uint64_t seed, Fault fault) {
  Rng rng = make_stream(seed, 0x67ad);
  const Activation acts[] = {Activation::kTanh, Activation::kGelu};
  double worst = 0.0;
  std::size_t bad = 0, checked = 0;
  for (std::size_t pair = 0; pair < 20; ++pair) {
    NetworkSpec spec;
    spec.data_dim = 1 + pair % 2;
    spec.width = 3 + pair % 4;
    spec.depth = 2 + pair % 3;
    spec.activation = acts[pair % 2];
    spec.param_bound = 2.0;
    spec.conditioning = pair % 3 == 0 ? Conditioning::kMarginal : Conditioning::kData;
    NetworkParams p = init_params(spec, derive_seed(seed, pair));
    Vec z(spec.data_dim), g(spec.data_dim);
    for (double& v : z) v = uniform01(rng);
    fill_standard_normal(rng, g);
    const PathSample s = make_path_sample(z, 0.9 * uniform01(rng), g);
    LossGradient lg = loss_gradient(p, s);
    if (fault == Fault::kFlipGradientSign)
      for (double& v : lg.grad) v = -v;
    const double h = 1e-4;
    for (std::size_t j = 0; j < p.theta.size(); ++j) {
      NetworkParams plus = p, minus = p;
      plus.theta[j] += h;
      minus.theta[j] -= h;
      const double fd = (loss_gradient(plus, s).loss - loss_gradient(minus, s).loss) / (2.0 * h);
      const double err = std::abs(fd - lg.grad[j]);
      const double rel = err / std::max(std::abs(fd), std::abs(lg.grad[j]));
      ++checked;
      if (err > 1e-8) worst = std::max(worst, rel);
      if (err > 1e-8 && rel > 1e-5) ++bad;
    }
  }
  return {"gradient_exactness", bad == 0,
          fmt("%.0f of %.0f partials outside tolerance, worst relative error %.3g", static_cast<double>(bad),
              static_cast<double>(checked), worst)};
}

PropertyResult growth_bound(std::uint64_t seed) {
  Rng rng = make_stream(seed, 0x9b0d);
  std::size_t violations = 0;
  double worst = 0.0;
  for (std::size_t trial = 0; trial < 3000; ++trial) {
    NetworkSpec spec;
    spec.data_dim = 1 + trial % 3;
    spec.width = 1 + trial % 5;
    spec.depth = 2 + trial % 3;
    spec.param_bound = 0.25 + 2.0 * uniform01(rng);
    spec.activation = static_cast<Activation>(trial % 3);
    NetworkParams p = zero_params(spec);
    for (double& v : p.theta) v = spec.param_bound * (2.0 * uniform01(rng) - 1.0);
    const double kappa = 4.0 * uniform01(rng);
    Vec input(spec.input_dim());
    for (double& v : input) v = kappa * (2.0 * uniform01(rng) - 1.0);
    MlpEvaluator eval(spec);
    const auto out = eval.forward_encoded(p.theta, input);
    const double ratio = max_abs(out) / output_growth_bound(spec, kappa);
    worst = std::max(worst, ratio);
    if (ratio > 1.0 + 1e-12) ++violations;
  }
  return {"growth_bound", violations == 0, fmt("worst output/bound ratio %.4f", worst)};
}

// Data N(m, s^2 I): marginal path N(t m, sigma_t^2 I) with
// sigma_t^2 = t^2 s^2 + (1 - t)^2, flow x(t) = t m + sigma_t x0.
struct GaussianFlow {
  double m = 0.5, s = 0.2;
  double sigma(double t) const { return std::sqrt(t * t * s * s + (1.0 - t) * (1.0 - t)); }
  void field(std::span<const double> x, double t, std::span<double> out) const {
    const double st2 = t * t * s * s + (1.0 - t) * (1.0 - t);
    const double c = (t * s * s - (1.0 - t)) / st2;
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = m + c * (x[k] - t * m);
  }
};

PropertyResult ode_orders(Fault fault) {
  const GaussianFlow flow;
  const VelocityField field = [&](std::span<const double> x, double t, std::span<double> out) {
    flow.field(x, t, out);
  };
  const Vec x0{0.7, -1.3};
  auto error = [&](Method m, std::size_t steps) {
    IntegratorConfig cfg;
    cfg.method = m;
    cfg.n_steps = steps;
    const Vec x = integrate_terminal(field, x0, cfg);
    double e = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double exact = cfg.t_end * flow.m + flow.sigma(cfg.t_end) * x0[k];
      e = std::max(e, std::abs(x[k] - exact));
    }
    return e;
  };
  const Method rk = fault == Fault::kEulerForRk4 ? Method::kEuler : Method::kRk4;
  const double euler_order = std::log2(error(Method::kEuler, 64) / error(Method::kEuler, 128));
  const double rk4_order = std::log2(error(rk, 32) / error(rk, 64));

  // Conditional field with fixed z: straight-line solution (1 - t) x0 + t z.
  const Vec z{0.25, 0.8};
  const VelocityField cond = [&](std::span<const double> x, double t, std::span<double> out) {
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = (z[k] - x[k]) / (1.0 - t);
  };
  IntegratorConfig cfg;
  cfg.method = rk;
  cfg.n_steps = 64;
  const Vec xe = integrate_terminal(cond, x0, cfg);
  double cond_err = 0.0;
  for (std::size_t k = 0; k < 2; ++k)
    cond_err = std::max(cond_err, std::abs(xe[k] - ((1.0 - cfg.t_end) * x0[k] + cfg.t_end * z[k])));
  const bool ok = euler_order >= 0.9 && rk4_order >= 3.5 && cond_err <= 1e-8;
  return {"ode_orders", ok, fmt("euler order %.3f, rk4 order %.3f, conditional error %.2e", euler_order, rk4_order,
                                cond_err)};
}

PropertyResult w2_oracles(std::uint64_t seed) {
  Rng rng = make_stream(seed, 0x3202);
  double worst_1d = 0.0;
  for (std::size_t n : {1, 7, 64, 200}) {
    Vec a(n), b(n);
    for (double& v : a) v = standard_normal(rng);
    for (double& v : b) v = 2.0 * uniform01(rng);
    Vec sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (sa[i] - sb[i]) * (sa[i] - sb[i]);
    const double oracle = std::sqrt(acc / static_cast<double>(n));
    worst_1d = std::max(worst_1d, std::abs(w2_exact(PointCloud(1, a), PointCloud(1, b)) - oracle));
  }
  const std::size_t n = 48;
  auto cloud = [&] {
    PointCloud c = PointCloud::with_size(2, n);
    for (std::size_t i = 0; i < n; ++i) fill_standard_normal(rng, c.point(i));
    return c;
  };
  const PointCloud x = cloud(), y = cloud(), w = cloud();
  const double xy = w2_exact(x, y), yx = w2_exact(y, x), xw = w2_exact(x, w), wy = w2_exact(w, y);
  const bool metric = w2_exact(x, x) == 0.0 && std::abs(xy - yx) <= 1e-12 && xy <= xw + wy + 1e-12;
  const double square = w2_exact(PointCloud(2, {0, 0, 1, 0}), PointCloud(2, {0, 1, 1, 1}));
  const bool ok = worst_1d <= 1e-10 && metric && std::abs(square - 1.0) <= 1e-12;
  return {"w2_oracles", ok, fmt("1-D coupling gap %.2e, metric axioms %.0f, unit translation %.12f", worst_1d, metric ? 1.0 : 0.0, square)};
}

PropertyResult truncated_moment_property(std::uint64_t seed) {
  std::size_t bad = 0, cells = 0;
  double worst = 0.0;
  for (double a : {0.5, 1.0, 2.0, 3.0})
    for (double sigma : {0.5, 1.0, 2.0})
      for (double mu : {0.0, 1.0}) {
        const double formula = truncated_normal_second_moment(mu, sigma, a);
        const MeanEstimate mc = truncated_second_moment_mc(mu, sigma, a, 200000, derive_seed(seed, cells));
        const double z = std::abs(mc.mean - formula) / mc.std_error;
        worst = std::max(worst, z);
        if (z > 4.0) ++bad;
        ++cells;
      }
  return {"truncated_second_moment", bad == 0, fmt("worst deviation %.2f standard errors over %.0f cells", worst,
                                                static_cast<double>(cells))};
}

PropertyResult mills() {
  bool ok = true;
  double worst = 0.0;
  for (double k : {0.5, 1.0, 2.0, 3.0, 8.0}) {
    const MillsCheck m = mills_ratio_bound_check(k);
    ok = ok && m.holds;
    worst = std::max(worst, m.ratio / m.upper);
  }
  return {"mills_ratio", ok, fmt("largest ratio/upper %.6f", worst)};
}

PropertyResult recursion_dominance() {
  std::size_t violations = 0;
  for (double p : {1.5, 2.0, 4.0})
    for (double gamma : {1.0, 10.0, 100.0})
      for (double b : {0.0, 0.1, 10.0}) {
        const Vec e = simulate_sgd_recursion(1.0, p, gamma, b, 20000);
        for (std::size_t i = 0; i < e.size(); ++i)
          if (e[i] > sgd_suboptimality_bound(1.0, p, gamma, b, static_cast<double>(i)) * (1.0 + 1e-12)) ++violations;
      }
  return {"recursion_dominance", violations == 0, fmt("%.0f violations", static_cast<double>(violations))};
}

PropertyResult tail_identity(std::uint64_t seed) {
  const TailIdentity t =
      tail_indicator_identity_check([](Rng& r) { return standard_normal(r); }, 0.0, 200000, seed);
  const bool ok = t.agree && std::abs(t.lhs - normal_pdf(0.0)) <= 4.0 * t.lhs_se;
  return {"tail_identity", ok, fmt("lhs %.5f rhs %.5f phi(0) %.5f", t.lhs, t.rhs, normal_pdf(0.0))};
}

PropertyResult truncation(std::uint64_t seed) {
  const auto dist = TargetDistribution::reference_mixture();
  NetworkSpec spec;
  spec.width = 8;
  const NetworkParams p = init_params(spec, seed);
  const auto data = sample_path(dist, seed, 2000);
  const LossEstimate full = empirical_loss(p, data);
  bool monotone = true;
  for (double kappa : std::array<double, 6>{0.0, 0.5, 1.0, 2.0, 4.0, INFINITY}) {
    const TruncatedLosses tl = truncated_losses(p, data, kappa);
    monotone = monotone && tl.emp_trunc.value <= full.value && tl.gap >= 0.0;
    if (kappa == INFINITY) monotone = monotone && tl.gap == 0.0;
  }
  bool tails = true;
  double worst = 0.0;
  for (double kappa : {1.0, 2.0, 3.0}) {
    const MeanEstimate r = exceedance_rate(kappa, 1000000, derive_seed(seed, 0x7a));
    worst = std::max(worst, r.mean / std::exp(-kappa * kappa / 2.0));
    tails = tails && r.mean <= 1.1 * std::exp(-kappa * kappa / 2.0);
  }
  return {"truncation", monotone && tails, fmt("monotone %.0f, worst exceedance/exp(-k^2/2) %.4f",
                                               monotone ? 1.0 : 0.0, worst)};
}

PropertyResult surrogate(std::uint64_t seed) {
  const QuadraticSurrogate q{0.5, 1.0};
  const double alpha = 2.0, gamma = 2.0;
  const SgdConstants c = sgd_constants(alpha, q.mu(), q.smoothness(), q.sigma_sq());
  const auto steps = log_spaced_steps(2000, 10);
  const auto pts = run_surrogate_sgd(q, alpha, gamma, 1.0, 2000, 400, steps, seed);
  std::size_t violations = 0;
  for (const auto& pt : pts)
    if (pt.mean > sgd_suboptimality_bound(1.0, c.p, gamma, c.b, static_cast<double>(pt.step))) ++violations;
  return {"surrogate_sgd", violations == 0, fmt("%.0f logged steps above the bound", static_cast<double>(violations))};
}

PropertyResult checkpoint(std::uint64_t seed) {
  NetworkSpec spec;
  spec.width = 5;
  spec.activation = Activation::kGelu;
  spec.conditioning = Conditioning::kMarginal;
  const NetworkParams p = init_params(spec, seed);
  const NetworkParams q = deserialize_checkpoint([&] {
    const auto bytes = serialize_checkpoint(p);
    return std::string(bytes.begin(), bytes.end());
  }());
  bool same = q.spec == p.spec && q.theta.size() == p.theta.size();
  for (std::size_t i = 0; same && i < p.theta.size(); ++i)
    same = std::bit_cast<std::uint64_t>(p.theta[i]) == std::bit_cast<std::uint64_t>(q.theta[i]);
  return {"checkpoint_roundtrip", same, same ? "bit-exact" : "mismatch"};
}

PropertyResult simd_equivalence(std::uint64_t seed) {
  const simd::KernelTable* v = simd::avx2_kernels();
  if (!v) return {"simd_equivalence", true, "vector kernels unavailable; scalar only"};
  const simd::KernelTable& s = simd::scalar_kernels();
  Rng rng = make_stream(seed, 0x51d);
  bool ok = true;
  for (std::size_t n : {1, 3, 4, 7, 16, 33, 130}) {
    Vec a(n), b(n), cost(n), colp(n), m1(n), m2(n);
    std::vector<std::int64_t> w1(n, -1), w2(n, -1);
    std::vector<std::uint8_t> used(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = standard_normal(rng);
      b[i] = standard_normal(rng);
      cost[i] = std::floor(8.0 * uniform01(rng));
      colp[i] = std::floor(4.0 * uniform01(rng));
      m1[i] = m2[i] = uniform01(rng) < 0.5 ? INFINITY : std::floor(6.0 * uniform01(rng));
      used[i] = uniform01(rng) < 0.2;
    }
    const double ds = s.dot(a.data(), b.data(), n), dv = v->dot(a.data(), b.data(), n);
    ok = ok && std::abs(ds - dv) <= 1e-12 * (1.0 + std::abs(ds));
    const auto r1 = s.relax_row(cost.data(), 0.5, colp.data(), m1.data(), w1.data(), used.data(), 3, n);
    const auto r2 = v->relax_row(cost.data(), 0.5, colp.data(), m2.data(), w2.data(), used.data(), 3, n);
    ok = ok && r1.column == r2.column && (r1.delta == r2.delta || (std::isinf(r1.delta) && std::isinf(r2.delta)));
    ok = ok && w1 == w2;
    for (std::size_t i = 0; i < n; ++i) ok = ok && (m1[i] == m2[i]);
  }
  return {"simd_equivalence", ok, ok ? "scalar and vector kernels agree" : "kernel mismatch"};
}

}  // namespace

std::vector<PropertyResult> run_verify_suite(std::uint64_t seed, Fault fault) {
  std::vector<PropertyResult> out;
  out.push_back(gradient_check(seed, fault));
  out.push_back(growth_bound(seed));
  out.push_back(ode_orders(fault));
  out.push_back(w2_oracles(seed));
  out.push_back(truncated_moment_property(seed));
  out.push_back(mills());
  out.push_back(recursion_dominance());
  out.push_back(tail_identity(seed));
  out.push_back(truncation(seed));
  out.push_back(surrogate(seed));
  out.push_back(checkpoint(seed));
  out.push_back(simd_equivalence(seed));
  return out;
}

}  // namespace fmlab::harness
