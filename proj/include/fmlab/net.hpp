// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

/// Fixed-topology MLP representing the learned velocity field u^theta(x, t, z).
///
/// Layout: `depth` affine layers. Layer 0 maps the encoded input (2d + 1
/// values: x, t, z) to `width` units, layers 1..depth-2 are width x width,
/// and the last layer maps width -> d with no activation. theta stores, for
/// each layer in order, the row-major weight matrix followed by the bias.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fmlab/core/numeric.hpp"
#include "fmlab/path.hpp"

namespace fmlab {

enum class Activation : std::uint32_t { kTanh = 0, kGelu = 1, kRelu = 2 };

/// What the network sees in its z input slot.
///   kData:     the conditioning variable as given (training feeds the data
///              point z; generation feeds the noise draw X_0).
///   kMarginal: the slot is zeroed, so the network is a field of (x, t) only
///              and regresses onto the marginal velocity.
enum class Conditioning : std::uint32_t { kData = 0, kMarginal = 1 };

std::string to_string(Activation a);
Activation parse_activation(const std::string& name);
std::string to_string(Conditioning c);
Conditioning parse_conditioning(const std::string& name);

struct NetworkSpec {
  std::size_t data_dim = 2;
  std::size_t width = 32;
  std::size_t depth = 3;
  double param_bound = 4.0;
  Activation activation = Activation::kTanh;
  Conditioning conditioning = Conditioning::kData;

  std::size_t input_dim() const noexcept { return 2 * data_dim + 1; }
  std::size_t output_dim() const noexcept { return data_dim; }
  std::size_t layer_inputs(std::size_t layer) const noexcept;
  std::size_t layer_outputs(std::size_t layer) const noexcept;
  /// Offset of layer `layer`'s weight block inside theta; the bias follows it.
  std::size_t layer_offset(std::size_t layer) const noexcept;
  std::size_t param_count() const noexcept;
  /// Throws InputError unless width >= 1, depth >= 2, param_bound > 0, d >= 1.
  void validate() const;

  bool operator==(const NetworkSpec&) const = default;
};

struct NetworkParams {
  NetworkSpec spec;
  Vec theta;
};

NetworkParams zero_params(const NetworkSpec& spec);
/// Entries i.i.d. uniform on [-B / sqrt(W), B / sqrt(W)].
NetworkParams init_params(const NetworkSpec& spec, std::uint64_t seed);
/// Coordinate-wise projection onto [-B, B]^p.
void clamp_params(NetworkParams& params);
void clamp_to_bound(std::span<double> theta, double bound);

double activate(Activation a, double v);
double activate_derivative(Activation a, double v);

/// Forward/backward evaluator with preallocated buffers. Not thread-safe;
/// use one per thread. Parameters are passed per call, so one evaluator can
/// serve several parameter vectors of the same spec.
class MlpEvaluator {
 public:
  explicit MlpEvaluator(const NetworkSpec& spec);

  const NetworkSpec& spec() const noexcept { return spec_; }

  /// Encodes (x, t, z) according to the spec's conditioning mode and runs the
  /// network. The returned span is valid until the next call.
  std::span<const double> forward(std::span<const double> theta, std::span<const double> x, double t,
                                  std::span<const double> z);
  /// Runs the network on an already encoded input vector.
  std::span<const double> forward_encoded(std::span<const double> theta, std::span<const double> input);

  /// Reverse pass for the most recent forward call: grad += scale * J^T d_output.
  void backward(std::span<const double> theta, std::span<const double> d_output, double scale,
                std::span<double> grad);

  /// Squared residual against u_t for one sample, accumulating scale * d/dtheta
  /// into grad. Returns the (unscaled) squared residual.
  double accumulate_loss_gradient(std::span<const double> theta, const PathSample& sample,
                                  double scale, std::span<double> grad, double t_min = kDefaultTMin);

 private:
  NetworkSpec spec_;
  Vec input_;
  std::vector<Vec> pre_;   // pre-activations per layer
  std::vector<Vec> post_;  // activations per hidden layer (post_[l] = sigma(pre_[l]))
  Vec delta_, delta_next_;
  Vec residual_, target_;
};

/// Throws InputError on dimension mismatch or non-finite input.
Vec forward(const NetworkParams& params, std::span<const double> x, double t, std::span<const double> z);

struct LossGradient {
  double loss = 0.0;
  Vec grad;
};

/// loss = ||u^theta(x, t, z) - u_t(x, z)||^2 and its exact gradient in theta.
LossGradient loss_gradient(const NetworkParams& params, const PathSample& sample,
                           double t_min = kDefaultTMin);

/// ||h_D||_inf bound for a D-layer network with entries bounded by B, hidden
/// width W, first-layer fan-in `fan_in`, and inputs bounded by kappa in l_inf:
///   2 (BW)^{D-1} B fan_in kappa   if BW > 1 and fan_in kappa >= 1 + (D-1)/(BW)
///   B (fan_in kappa + D)          if BW == 1
///   (BW)^{D-1} B (fan_in kappa + 1) + B ((BW)^{D-1} - 1) / (BW - 1) otherwise.
double growth_bound_closed_form(double bound, std::size_t width, std::size_t depth, std::size_t fan_in,
                                double kappa);
/// The closed form for `spec`, using the encoded input width 2d + 1 as fan-in,
/// widened by a floating-point rounding allowance of a few ulps.
double output_growth_bound(const NetworkSpec& spec, double kappa);

/// Empirical ||u^{theta1} - u^{theta2}|| / ||theta1 - theta2|| over random
/// parameter pairs and inputs. Diagnostic only.
struct ThetaLipschitzProbe {
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  std::size_t pairs = 0;
};
ThetaLipschitzProbe probe_theta_lipschitz(const NetworkSpec& spec, const TargetDistribution& dist,
                                          std::size_t pairs, double perturbation, std::uint64_t seed);

// Checkpoint file ------------------------------------------------------------
//
// Little-endian binary:
//   char[8] magic "FMLCKPT\0"
//   u32     format version (1)
//   u32     data_dim, u32 width, u32 depth
//   u32     activation tag, u32 conditioning tag
//   f64     param_bound
//   u64     theta length
//   f64[]   theta

std::vector<char> serialize_checkpoint(const NetworkParams& params);
NetworkParams deserialize_checkpoint(std::string_view bytes);
void write_checkpoint(const std::filesystem::path& file, const NetworkParams& params);
NetworkParams read_checkpoint(const std::filesystem::path& file);

}  // namespace fmlab
