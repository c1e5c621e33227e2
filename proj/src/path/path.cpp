// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "fmlab/path.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fmlab/core/error.hpp"

namespace fmlab {
namespace {

void check_time(double t, double t_min) {
  if (!std::isfinite(t) || t < 0.0) throw InputError("path: time must be finite and >= 0");
  if (t > 1.0 - t_min) throw SingularityError("path: t exceeds 1 - t_min, velocity is singular");
}

void check_same_dim(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size() || a.empty()) throw InputError(std::string(what) + ": dimension mismatch");
}

bool inside_unit_box(std::span<const double> p) {
  return std::all_of(p.begin(), p.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

}  // namespace

TargetDistribution TargetDistribution::gaussian_mixture(std::vector<MixtureComponent> components) {
  if (components.empty()) throw InputError("gaussian_mixture: no components");
  TargetDistribution dist;
  dist.kind_ = DistributionKind::kGaussianMixture;
  dist.dim_ = components.front().mean.size();
  if (dist.dim_ == 0) throw InputError("gaussian_mixture: zero-dimensional mean");
  double total = 0.0;
  for (const auto& c : components) {
    if (c.mean.size() != dist.dim_) throw InputError("gaussian_mixture: component dims differ");
    if (!(c.weight > 0.0) || !(c.scale >= 0.0)) throw InputError("gaussian_mixture: bad weight/scale");
    if (!inside_unit_box(c.mean)) throw InputError("gaussian_mixture: mean outside [0,1]^d");
    total += c.weight;
    dist.cumulative_weights_.push_back(total);
  }
  for (double& w : dist.cumulative_weights_) w /= total;
  dist.components_ = std::move(components);
  dist.lo_.assign(dist.dim_, 0.0);
  dist.hi_.assign(dist.dim_, 1.0);
  return dist;
}

TargetDistribution TargetDistribution::uniform_box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.empty()) throw InputError("uniform_box: dimension mismatch");
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!(lo[k] >= 0.0 && hi[k] <= 1.0 && lo[k] <= hi[k]))
      throw InputError("uniform_box: corners must satisfy 0 <= lo <= hi <= 1");
  }
  TargetDistribution dist;
  dist.kind_ = DistributionKind::kUniformBox;
  dist.dim_ = lo.size();
  dist.lo_ = std::move(lo);
  dist.hi_ = std::move(hi);
  return dist;
}

TargetDistribution TargetDistribution::two_moons(double noise) {
  if (!(noise >= 0.0)) throw InputError("two_moons: noise must be >= 0");
  TargetDistribution dist;
  dist.kind_ = DistributionKind::kTwoMoons;
  dist.dim_ = 2;
  dist.moon_noise_ = noise;
  dist.lo_.assign(2, 0.0);
  dist.hi_.assign(2, 1.0);
  return dist;
}

TargetDistribution TargetDistribution::point_mass(Vec z0) {
  return gaussian_mixture({MixtureComponent{std::move(z0), 0.0, 1.0}});
}

TargetDistribution TargetDistribution::reference_mixture() {
  return gaussian_mixture({MixtureComponent{{0.3, 0.3}, 0.08, 0.5},
                           MixtureComponent{{0.7, 0.7}, 0.08, 0.5}});
}

void TargetDistribution::draw_into(Rng& rng, std::span<double> out) const {
  if (out.size() != dim_) throw InputError("TargetDistribution::draw: dimension mismatch");
  switch (kind_) {
    case DistributionKind::kUniformBox:
      for (std::size_t k = 0; k < dim_; ++k) out[k] = lo_[k] + (hi_[k] - lo_[k]) * uniform01(rng);
      return;
    case DistributionKind::kGaussianMixture: {
      const double u = uniform01(rng);
      const auto it = std::upper_bound(cumulative_weights_.begin(), cumulative_weights_.end(), u);
      const auto& comp =
          components_[std::min<std::size_t>(it - cumulative_weights_.begin(), components_.size() - 1)];
      do {
        for (std::size_t k = 0; k < dim_; ++k) out[k] = comp.mean[k] + comp.scale * standard_normal(rng);
      } while (!inside_unit_box(out));
      return;
    }
    case DistributionKind::kTwoMoons: {
      // Raw moons live in [-1, 2] x [-0.5, 1]; map affinely into the unit box
      // with a margin so most jittered points survive the rejection step.
      do {
        const double angle = std::numbers::pi * uniform01(rng);
        const bool upper = uniform01(rng) < 0.5;
        double px = upper ? std::cos(angle) : 1.0 - std::cos(angle);
        double py = upper ? std::sin(angle) : 0.5 - std::sin(angle);
        px += moon_noise_ * standard_normal(rng);
        py += moon_noise_ * standard_normal(rng);
        out[0] = 0.1 + 0.8 * (px + 1.0) / 3.0;
        out[1] = 0.1 + 0.8 * (py + 0.5) / 1.5;
      } while (!inside_unit_box(out));
      return;
    }
  }
}

Vec TargetDistribution::draw(Rng& rng) const {
  Vec out(dim_);
  draw_into(rng, out);
  return out;
}

Vec TargetDistribution::support_lo() const { return lo_; }
Vec TargetDistribution::support_hi() const { return hi_; }

std::string TargetDistribution::descriptor() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case DistributionKind::kUniformBox:
      os << "uniform_box(lo=[";
      for (std::size_t k = 0; k < dim_; ++k) os << (k ? "," : "") << lo_[k];
      os << "],hi=[";
      for (std::size_t k = 0; k < dim_; ++k) os << (k ? "," : "") << hi_[k];
      os << "])";
      break;
    case DistributionKind::kGaussianMixture:
      os << "gaussian_mixture(";
      for (std::size_t c = 0; c < components_.size(); ++c) {
        const auto& comp = components_[c];
        os << (c ? ";" : "") << "w=" << comp.weight << ",s=" << comp.scale << ",m=[";
        for (std::size_t k = 0; k < dim_; ++k) os << (k ? "," : "") << comp.mean[k];
        os << "]";
      }
      os << ")";
      break;
    case DistributionKind::kTwoMoons:
      os << "two_moons(noise=" << moon_noise_ << ")";
      break;
  }
  return os.str();
}

void target_velocity_into(std::span<const double> x, double t, std::span<const double> z,
                          std::span<double> out, double t_min) {
  check_same_dim(x, z, "target_velocity");
  check_time(t, t_min);
  if (out.size() != x.size()) throw InputError("target_velocity: output dimension mismatch");
  const double inv = 1.0 / (1.0 - t);
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = (z[k] - x[k]) * inv;
}

Vec target_velocity(std::span<const double> x, double t, std::span<const double> z, double t_min) {
  Vec out(x.size());
  target_velocity_into(x, t, z, out, t_min);
  return out;
}

PathSample make_path_sample(Vec z, double t, Vec noise) {
  if (z.size() != noise.size() || z.empty()) throw InputError("make_path_sample: dimension mismatch");
  PathSample s;
  s.t = t;
  s.x.resize(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) s.x[k] = t * z[k] + (1.0 - t) * noise[k];
  s.z = std::move(z);
  s.noise = std::move(noise);
  return s;
}

namespace {

PathSample draw_sample_with_time(const TargetDistribution& dist, Rng& rng, double t) {
  Vec z = dist.draw(rng);
  Vec g(dist.dim());
  fill_standard_normal(rng, g);
  return make_path_sample(std::move(z), t, std::move(g));
}

}  // namespace

PathSample draw_path_sample(const TargetDistribution& dist, std::uint64_t seed, std::uint64_t index,
                            double t_min) {
  Rng rng = make_stream(seed, index);
  const double t = std::min(uniform01(rng), 1.0 - t_min);
  return draw_sample_with_time(dist, rng, t);
}

std::vector<PathSample> sample_path(const TargetDistribution& dist, std::uint64_t seed, std::size_t n,
                                    double t_min) {
  if (n == 0) throw InputError("sample_path: n must be >= 1");
  std::vector<PathSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(draw_path_sample(dist, seed, i, t_min));
  return out;
}

std::vector<PathSample> sample_path_at_time(const TargetDistribution& dist, std::uint64_t seed,
                                            std::size_t n, double t, double t_min) {
  check_time(t, t_min);
  std::vector<PathSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = make_stream(seed, i);
    out.push_back(draw_sample_with_time(dist, rng, t));
  }
  return out;
}

Truncation truncate_residual(std::span<const double> x, double t, std::span<const double> z,
                             double kappa, double t_min) {
  check_same_dim(x, z, "truncate_residual");
  check_time(t, t_min);
  if (!(kappa >= 0.0)) throw InputError("truncate_residual: kappa must be >= 0");
  Truncation out;
  out.standardized.resize(x.size());
  out.inside.resize(x.size());
  const double inv = 1.0 / (1.0 - t);
  for (std::size_t k = 0; k < x.size(); ++k) {
    out.standardized[k] = (x[k] - t * z[k]) * inv;
    out.inside[k] = std::abs(out.standardized[k]) <= kappa;
  }
  return out;
}

TruncatedVelocity truncated_velocities(std::span<const double> x, double t, std::span<const double> z,
                                       double kappa, double t_min) {
  Truncation trunc = truncate_residual(x, t, z, kappa, t_min);
  TruncatedVelocity out;
  out.target = target_velocity(x, t, z, t_min);
  for (std::size_t k = 0; k < x.size(); ++k)
    if (!trunc.inside[k]) out.target[k] = 0.0;
  out.gate = std::move(trunc.inside);
  return out;
}

}  // namespace fmlab
