// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>

#include "fmlab/core/error.hpp"
#include "fmlab/net.hpp"
#include "fmlab/simd/kernels.hpp"

namespace fmlab {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kTanh:
      return "tanh";
    case Activation::kGelu:
      return "gelu";
    case Activation::kRelu:
      return "relu";
  }
  return "unknown";
}

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "gelu") return Activation::kGelu;
  if (name == "relu") return Activation::kRelu;
  throw InputError("unknown activation '" + name + "'");
}

std::string to_string(Conditioning c) { return c == Conditioning::kData ? "data" : "marginal"; }

Conditioning parse_conditioning(const std::string& name) {
  if (name == "data") return Conditioning::kData;
  if (name == "marginal") return Conditioning::kMarginal;
  throw InputError("unknown conditioning '" + name + "'");
}

std::size_t NetworkSpec::layer_inputs(std::size_t layer) const noexcept {
  return layer == 0 ? input_dim() : width;
}

std::size_t NetworkSpec::layer_outputs(std::size_t layer) const noexcept {
  return layer + 1 == depth ? output_dim() : width;
}

std::size_t NetworkSpec::layer_offset(std::size_t layer) const noexcept {
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layer; ++l) offset += layer_outputs(l) * (layer_inputs(l) + 1);
  return offset;
}

std::size_t NetworkSpec::param_count() const noexcept { return layer_offset(depth); }

void NetworkSpec::validate() const {
  if (data_dim < 1) throw InputError("NetworkSpec: data_dim must be >= 1");
  if (width < 1) throw InputError("NetworkSpec: width must be >= 1");
  if (depth < 2) throw InputError("NetworkSpec: depth must be >= 2");
  if (!(param_bound > 0.0) || !std::isfinite(param_bound))
    throw InputError("NetworkSpec: param_bound must be a positive finite number");
}

NetworkParams zero_params(const NetworkSpec& spec) {
  spec.validate();
  return NetworkParams{spec, Vec(spec.param_count(), 0.0)};
}

NetworkParams init_params(const NetworkSpec& spec, std::uint64_t seed) {
  NetworkParams p = zero_params(spec);
  Rng rng = make_stream(seed, 0x1417);
  const double r = spec.param_bound / std::sqrt(static_cast<double>(spec.width));
  for (double& v : p.theta) v = r * (2.0 * uniform01(rng) - 1.0);
  return p;
}

void clamp_to_bound(std::span<double> theta, double bound) {
  for (double& v : theta) v = std::clamp(v, -bound, bound);
}

void clamp_params(NetworkParams& params) { clamp_to_bound(params.theta, params.spec.param_bound); }

double activate(Activation a, double v) {
  switch (a) {
    case Activation::kTanh:
      return std::tanh(v);
    case Activation::kGelu:
      return 0.5 * v * std::erfc(-v / std::numbers::sqrt2);
    case Activation::kRelu:
      return v > 0.0 ? v : 0.0;
  }
  return v;
}

double activate_derivative(Activation a, double v) {
  switch (a) {
    case Activation::kTanh: {
      const double th = std::tanh(v);
      return 1.0 - th * th;
    }
    case Activation::kGelu:
      return 0.5 * std::erfc(-v / std::numbers::sqrt2) + v * normal_pdf(v);
    case Activation::kRelu:
      return v > 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

MlpEvaluator::MlpEvaluator(const NetworkSpec& spec) : spec_(spec) {
  spec_.validate();
  input_.resize(spec_.input_dim());
  pre_.resize(spec_.depth);
  post_.resize(spec_.depth - 1);
  for (std::size_t l = 0; l < spec_.depth; ++l) pre_[l].resize(spec_.layer_outputs(l));
  for (std::size_t l = 0; l + 1 < spec_.depth; ++l) post_[l].resize(spec_.width);
  delta_.resize(std::max(spec_.width, spec_.output_dim()));
  delta_next_.resize(std::max(spec_.width, spec_.input_dim()));
  residual_.resize(spec_.output_dim());
  target_.resize(spec_.output_dim());
}

std::span<const double> MlpEvaluator::forward(std::span<const double> theta, std::span<const double> x,
                                              double t, std::span<const double> z) {
  const std::size_t d = spec_.data_dim;
  std::copy(x.begin(), x.end(), input_.begin());
  input_[d] = t;
  if (spec_.conditioning == Conditioning::kMarginal) {
    std::fill(input_.begin() + static_cast<std::ptrdiff_t>(d + 1), input_.end(), 0.0);
  } else {
    std::copy(z.begin(), z.end(), input_.begin() + static_cast<std::ptrdiff_t>(d + 1));
  }
  return forward_encoded(theta, input_);
}

std::span<const double> MlpEvaluator::forward_encoded(std::span<const double> theta,
                                                      std::span<const double> input) {
  const auto& k = simd::active();
  if (input.data() != input_.data()) std::copy(input.begin(), input.end(), input_.begin());
  const double* h = input_.data();
  for (std::size_t l = 0; l < spec_.depth; ++l) {
    const std::size_t in = spec_.layer_inputs(l);
    const std::size_t out = spec_.layer_outputs(l);
    const double* w = theta.data() + spec_.layer_offset(l);
    k.affine(w, w + out * in, h, pre_[l].data(), out, in);
    if (l + 1 < spec_.depth) {
      for (std::size_t r = 0; r < out; ++r) post_[l][r] = activate(spec_.activation, pre_[l][r]);
      h = post_[l].data();
    }
  }
  return pre_.back();
}

void MlpEvaluator::backward(std::span<const double> theta, std::span<const double> d_output, double scale,
                            std::span<double> grad) {
  const auto& k = simd::active();
  std::size_t rows = spec_.output_dim();
  for (std::size_t r = 0; r < rows; ++r) delta_[r] = scale * d_output[r];
  for (std::size_t l = spec_.depth; l-- > 0;) {
    const std::size_t in = spec_.layer_inputs(l);
    const std::size_t out = spec_.layer_outputs(l);
    const double* h = l == 0 ? input_.data() : post_[l - 1].data();
    const std::size_t offset = spec_.layer_offset(l);
    k.outer_accumulate(delta_.data(), h, grad.data() + offset, out, in);
    double* gb = grad.data() + offset + out * in;
    for (std::size_t r = 0; r < out; ++r) gb[r] += delta_[r];
    if (l == 0) break;
    std::fill(delta_next_.begin(), delta_next_.begin() + static_cast<std::ptrdiff_t>(in), 0.0);
    k.affine_transpose_accumulate(theta.data() + offset, delta_.data(), delta_next_.data(), out, in);
    for (std::size_t c = 0; c < in; ++c)
      delta_next_[c] *= activate_derivative(spec_.activation, pre_[l - 1][c]);
    std::swap(delta_, delta_next_);
  }
  // Restore sizes after swaps so the buffers stay large enough for every layer.
  if (delta_.size() < delta_next_.size()) std::swap(delta_, delta_next_);
}

double MlpEvaluator::accumulate_loss_gradient(std::span<const double> theta, const PathSample& sample,
                                              double scale, std::span<double> grad, double t_min) {
  target_velocity_into(sample.x, sample.t, sample.z, target_, t_min);
  const auto out = forward(theta, sample.x, sample.t, sample.z);
  double loss = 0.0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    residual_[k] = out[k] - target_[k];
    loss += residual_[k] * residual_[k];
    residual_[k] *= 2.0;
  }
  backward(theta, residual_, scale, grad);
  return loss;
}

namespace {

void check_inputs(const NetworkParams& params, std::span<const double> x, double t,
                  std::span<const double> z) {
  const auto& spec = params.spec;
  if (params.theta.size() != spec.param_count()) throw InputError("forward: theta length does not match spec");
  if (x.size() != spec.data_dim || z.size() != spec.data_dim) throw InputError("forward: dimension mismatch");
  if (!all_finite(x) || !all_finite(z) || !std::isfinite(t)) throw InputError("forward: non-finite input");
}

}  // namespace

Vec forward(const NetworkParams& params, std::span<const double> x, double t, std::span<const double> z) {
  check_inputs(params, x, t, z);
  MlpEvaluator eval(params.spec);
  const auto out = eval.forward(params.theta, x, t, z);
  return Vec(out.begin(), out.end());
}

LossGradient loss_gradient(const NetworkParams& params, const PathSample& sample, double t_min) {
  check_inputs(params, sample.x, sample.t, sample.z);
  MlpEvaluator eval(params.spec);
  LossGradient lg;
  lg.grad.assign(params.theta.size(), 0.0);
  lg.loss = eval.accumulate_loss_gradient(params.theta, sample, 1.0, lg.grad, t_min);
  return lg;
}

double growth_bound_closed_form(double bound, std::size_t width, std::size_t depth, std::size_t fan_in,
                                double kappa) {
  if (!(bound > 0.0) || width < 1 || depth < 1 || fan_in < 1 || !(kappa >= 0.0))
    throw InputError("growth_bound: invalid arguments");
  const double alpha = bound * static_cast<double>(width);
  const double dk = static_cast<double>(fan_in) * kappa;
  const double layers = static_cast<double>(depth);
  if (alpha == 1.0) return bound * (dk + layers);
  const double alpha_pow = std::pow(alpha, layers - 1.0);
  if (alpha > 1.0 && dk >= 1.0 + (layers - 1.0) / alpha) return 2.0 * alpha_pow * bound * dk;
  return alpha_pow * bound * (dk + 1.0) + bound * (alpha_pow - 1.0) / (alpha - 1.0);
}

double output_growth_bound(const NetworkSpec& spec, double kappa) {
  spec.validate();
  // Rounding allowance gamma_n = n u / (1 - n u) for the accumulated
  // dot-product and activation error of the forward pass, so the value bounds
  // the computed output and not only the exact one.
  const double n = static_cast<double>((std::max(spec.input_dim(), spec.width) + 3) * spec.depth);
  const double u = std::numeric_limits<double>::epsilon() / 2.0;
  const double gamma = n * u / (1.0 - n * u);
  return growth_bound_closed_form(spec.param_bound, spec.width, spec.depth, spec.input_dim(), kappa) * (1.0 + 2.0 * gamma);
}

ThetaLipschitzProbe probe_theta_lipschitz(const NetworkSpec& spec, const TargetDistribution& dist,
                                          std::size_t pairs, double perturbation, std::uint64_t seed) {
  if (dist.dim() != spec.data_dim) throw InputError("probe_theta_lipschitz: dimension mismatch");
  ThetaLipschitzProbe probe;
  MlpEvaluator eval(spec);
  Rng rng = make_stream(seed, 0x7e7a);
  double sum = 0.0;
  Vec u1(spec.output_dim());
  for (std::size_t i = 0; i < pairs; ++i) {
    NetworkParams p1 = init_params(spec, seed + 1 + i);
    NetworkParams p2 = p1;
    for (double& v : p2.theta) v += perturbation * standard_normal(rng);
    clamp_params(p2);
    double dtheta = 0.0;
    for (std::size_t j = 0; j < p1.theta.size(); ++j)
      dtheta += (p1.theta[j] - p2.theta[j]) * (p1.theta[j] - p2.theta[j]);
    if (dtheta == 0.0) continue;
    const PathSample s = draw_path_sample(dist, seed ^ 0x5a5a, i);
    const auto o1 = eval.forward(p1.theta, s.x, s.t, s.z);
    std::copy(o1.begin(), o1.end(), u1.begin());
    const auto o2 = eval.forward(p2.theta, s.x, s.t, s.z);
    double du = 0.0;
    for (std::size_t k = 0; k < u1.size(); ++k) du += (u1[k] - o2[k]) * (u1[k] - o2[k]);
    const double ratio = std::sqrt(du / dtheta);
    probe.max_ratio = std::max(probe.max_ratio, ratio);
    sum += ratio;
    ++probe.pairs;
  }
  probe.mean_ratio = probe.pairs ? sum / static_cast<double>(probe.pairs) : 0.0;
  return probe;
}

}  // namespace fmlab
