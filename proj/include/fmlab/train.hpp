// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

/// One-sample SGD with the decaying schedule eta_i = alpha / (i + gamma),
/// full-batch gradient descent for empirical-minimizer proxies, and the
/// diagnostics that estimate the optimization constants.
///
/// Steps are indexed from 0: the update producing theta_{i+1} from theta_i
/// uses eta_i, and e_0 is the suboptimality of the initial point.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fmlab/loss.hpp"
#include "fmlab/net.hpp"
#include "fmlab/path.hpp"

namespace fmlab {

struct TrainConfig {
  double alpha = 1.0;
  double gamma = 1.0;
  std::size_t n_steps = 0;
  std::uint64_t seed = 0;
  /// Projection radius; the network's param_bound when unset.
  std::optional<double> clamp_bound;
  std::optional<double> mu_hat;
  std::optional<double> L_hat;
  /// Population loss is measured every `log_every` steps (and at the ends).
  std::size_t log_every = 100;
  /// Size of the fixed evaluation set used for loss_mc.
  std::size_t eval_samples = 512;
  /// Theta snapshots every this many steps; 0 disables them.
  std::size_t snapshot_every = 0;
  /// Additional steps at which theta is snapshotted.
  std::vector<std::size_t> snapshot_at;
  /// Abort when loss_mc exceeds this multiple of the initial loss_mc.
  double divergence_factor = 1e3;
  double t_min = kDefaultTMin;

  double eta(std::size_t step) const noexcept { return alpha / (static_cast<double>(step) + gamma); }
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

inline constexpr double kNotMeasured = std::numeric_limits<double>::quiet_NaN();

struct TrainRecord {
  std::size_t step = 0;
  double eta = 0.0;
  double loss_mc = kNotMeasured;           // population loss proxy before this step
  double grad_norm_sq = 0.0;               // single-sample gradient used by this step
  double pop_grad_norm_sq = kNotMeasured;  // full gradient on the evaluation set
};

struct ThetaSnapshot {
  std::size_t step = 0;
  Vec theta;
};

struct TrainTrace {
  std::vector<TrainRecord> records;
  std::vector<ThetaSnapshot> snapshots;
  /// Loss and gradient measured at the returned parameters.
  double final_loss_mc = kNotMeasured;
  double final_pop_grad_norm_sq = kNotMeasured;
};

struct TrainResult {
  NetworkParams params;
  TrainTrace trace;
  bool aborted = false;
  std::size_t abort_step = 0;
  std::string abort_reason;
};

/// Generic stochastic gradient: writes the gradient for step `step` into
/// `grad` (already zeroed) and returns the sample loss.
using StochasticGradient =
    std::function<double(std::size_t step, std::span<const double> theta, std::span<double> grad)>;
/// Called after each update; return false to stop early.
using StepObserver = std::function<bool(std::size_t step, double eta, double sample_loss, double grad_norm_sq,
                                        std::span<const double> theta)>;

/// theta_{i+1} = clamp(theta_i - eta_i g_i). Throws RunAborted on a
/// non-finite loss or gradient. Returns the number of completed steps.
std::size_t sgd_minimize(std::span<double> theta, const StochasticGradient& gradient, double alpha, double gamma,
                         std::size_t n_steps, double clamp_bound, const StepObserver& observer = {});

/// Step i consumes fresh path sample i drawn from `dist` with cfg.seed.
TrainResult sgd_train(const NetworkParams& init, const TargetDistribution& dist, const TrainConfig& cfg);
/// Step i consumes data[i mod n]; the evaluation set is `data` itself.
TrainResult sgd_train_on_dataset(const NetworkParams& init, std::span<const PathSample> data,
                                 const TrainConfig& cfg);

/// Trace CSV: step,eta,loss_mc,grad_norm_sq (unmeasured loss written as nan).
void write_trace_csv(const std::filesystem::path& file, const TrainTrace& trace);
std::string trace_csv(const TrainTrace& trace);

// Full-batch gradient descent ------------------------------------------------

/// Returns the objective value and writes its gradient into `grad` (zeroed).
using Objective = std::function<double(std::span<const double> theta, std::span<double> grad)>;

struct GdConfig {
  double step = 0.05;
  std::size_t budget = 1000;
  double tol = 1e-6;  // stop once ||grad|| < tol
  double clamp_bound = std::numeric_limits<double>::infinity();
};

struct GdResult {
  Vec theta;
  double value = 0.0;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Constant-step descent. On convergence returns the iterate whose gradient
/// met the tolerance, otherwise the best iterate seen.
GdResult gd_minimize(Vec theta, const Objective& objective, const GdConfig& cfg);

struct ErmResult {
  NetworkParams params;
  double loss = 0.0;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Full-batch gradient descent on the empirical loss over `data`. The clamp
/// radius defaults to the network's param_bound.
ErmResult erm_proxy_train(const NetworkParams& init, std::span<const PathSample> data, GdConfig cfg,
                          double t_min = kDefaultTMin);

/// Empirical loss over `data` and its full gradient.
double empirical_loss_gradient(const NetworkParams& params, std::span<const PathSample> data,
                               std::span<double> grad, double t_min = kDefaultTMin);

// Diagnostics ----------------------------------------------------------------

struct VarianceEstimate {
  double sigma_sq = 0.0;
  double std_error = 0.0;
  std::size_t probes = 0;
};

/// Unbiased sample variance of single-sample gradients, summed over coordinates.
VarianceEstimate estimate_grad_variance(const StochasticGradient& gradient, std::span<const double> theta,
                                        std::size_t n_probes);
VarianceEstimate estimate_grad_variance(const NetworkParams& params, const TargetDistribution& dist,
                                        std::size_t n_probes, std::uint64_t seed, double t_min = kDefaultTMin);

struct PlProxy {
  double mu_hat = 0.0;
  double loss_floor = 0.0;
  std::size_t records_used = 0;
  bool degenerate = false;  // some record had a vanishing gradient above the floor
};

/// mu_hat = min ||grad||^2 / (2 (loss - floor)) over measured records. The
/// full gradient is used where it was measured. loss_floor = NaN selects the
/// best loss in the trace. Throws InputError with fewer than 10 records.
PlProxy estimate_pl_proxy(const TrainTrace& trace, double loss_floor = kNotMeasured);

/// Largest ||grad L(theta1) - grad L(theta2)|| / ||theta1 - theta2|| over
/// random nearby pairs around `params`; a lower estimate of the smoothness.
double estimate_smoothness_proxy(const NetworkParams& params, std::span<const PathSample> data, std::size_t pairs,
                                 double radius, std::uint64_t seed, double t_min = kDefaultTMin);

// Quadratic surrogate ---------------------------------------------------------

/// Loss f(theta) = E (z - theta)^2 / 2 with z ~ N(mean, stddev^2): mu = L = 1,
/// gradient noise variance sigma^2 = stddev^2, minimum value stddev^2 / 2.
struct QuadraticSurrogate {
  double mean = 0.0;
  double stddev = 1.0;

  double mu() const noexcept { return 1.0; }
  double smoothness() const noexcept { return 1.0; }
  double sigma_sq() const noexcept { return stddev * stddev; }
  double suboptimality(double theta) const noexcept { return 0.5 * (theta - mean) * (theta - mean); }
};

struct SuboptimalityPoint {
  std::size_t step = 0;  // suboptimality of theta_step
  double mean = 0.0;
  double std_error = 0.0;
};

/// Averages f(theta_i) - f* over independent SGD runs started at
/// mean + sqrt(2 e0), reporting the requested steps (sorted, <= n_steps).
std::vector<SuboptimalityPoint> run_surrogate_sgd(const QuadraticSurrogate& problem, double alpha, double gamma,
                                                  double e0, std::size_t n_steps, std::size_t runs,
                                                  std::span<const std::size_t> report_steps, std::uint64_t seed);

/// About `per_decade` logarithmically spaced integers in [1, n], plus 0.
std::vector<std::size_t> log_spaced_steps(std::size_t n, std::size_t per_decade);

}  // namespace fmlab
