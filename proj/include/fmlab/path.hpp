// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

/// Gaussian conditional probability path X_t | z ~ N(t z, (1 - t)^2 I_d),
/// its closed-form conditional velocity, and the per-coordinate truncation
/// used to bound the velocity fields.
///
/// Convention: z is a draw from the data distribution and the path runs from
/// N(0, I) at t = 0 to the point z at t = 1. Times are restricted to
/// [0, 1 - t_min] because the conditional velocity is singular at t = 1.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fmlab/core/numeric.hpp"
#include "fmlab/core/rng.hpp"

namespace fmlab {

inline constexpr double kDefaultTMin = 1e-3;

/// One training triple. `noise` is the standard-normal draw g that produced
/// x = t z + (1 - t) g; it is kept for diagnostics only.
struct PathSample {
  Vec z;
  double t = 0.0;
  Vec x;
  Vec noise;
};

enum class DistributionKind { kGaussianMixture, kUniformBox, kTwoMoons };

struct MixtureComponent {
  Vec mean;
  double scale = 0.0;  // isotropic standard deviation; 0 gives a point mass
  double weight = 1.0;
};

/// Data distribution on [0, 1]^d. Mixture components are truncated to the
/// unit box by rejection, so every draw is inside the support.
class TargetDistribution {
 public:
  static TargetDistribution gaussian_mixture(std::vector<MixtureComponent> components);
  static TargetDistribution uniform_box(Vec lo, Vec hi);
  /// Two interleaved half circles rescaled into [0, 1]^2, Gaussian jitter of
  /// standard deviation `noise` (rejected outside the box).
  static TargetDistribution two_moons(double noise);
  static TargetDistribution point_mass(Vec z0);
  /// Two well separated components in [0, 1]^2; the reference experiment target.
  static TargetDistribution reference_mixture();

  DistributionKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<MixtureComponent>& components() const noexcept { return components_; }
  const Vec& box_lo() const noexcept { return lo_; }
  const Vec& box_hi() const noexcept { return hi_; }
  double moon_noise() const noexcept { return moon_noise_; }

  Vec draw(Rng& rng) const;
  void draw_into(Rng& rng, std::span<double> out) const;

  /// Enclosing box of the support; always inside [0, 1]^d.
  Vec support_lo() const;
  Vec support_hi() const;

  /// Compact single-line description, used in file headers and ledgers.
  std::string descriptor() const;

 private:
  DistributionKind kind_ = DistributionKind::kUniformBox;
  std::size_t dim_ = 0;
  std::vector<MixtureComponent> components_;
  std::vector<double> cumulative_weights_;
  Vec lo_, hi_;
  double moon_noise_ = 0.0;
};

/// u_t(x, z) = (z - x) / (1 - t). Throws SingularityError for t > 1 - t_min.
Vec target_velocity(std::span<const double> x, double t, std::span<const double> z,
                    double t_min = kDefaultTMin);
void target_velocity_into(std::span<const double> x, double t, std::span<const double> z,
                          std::span<double> out, double t_min = kDefaultTMin);

/// x = t z + (1 - t) g.
PathSample make_path_sample(Vec z, double t, Vec noise);

/// n i.i.d. triples: z from `dist`, t ~ U[0, 1] clipped to [0, 1 - t_min],
/// x drawn from the path. Sample i uses RNG stream i, so any prefix of a
/// larger draw with the same seed is identical.
std::vector<PathSample> sample_path(const TargetDistribution& dist, std::uint64_t seed,
                                    std::size_t n, double t_min = kDefaultTMin);

/// Same as sample_path with every t fixed.
std::vector<PathSample> sample_path_at_time(const TargetDistribution& dist, std::uint64_t seed,
                                            std::size_t n, double t,
                                            double t_min = kDefaultTMin);

/// Draw stream-indexed sample `index`.
PathSample draw_path_sample(const TargetDistribution& dist, std::uint64_t seed,
                            std::uint64_t index, double t_min = kDefaultTMin);

struct Truncation {
  std::vector<bool> inside;  // |standardized_k| <= kappa
  Vec standardized;          // (x - t z) / (1 - t)
};
Truncation truncate_residual(std::span<const double> x, double t, std::span<const double> z,
                             double kappa, double t_min = kDefaultTMin);

struct TruncatedVelocity {
  Vec target;              // u_t where the gate is open, 0 elsewhere
  std::vector<bool> gate;  // same as Truncation::inside
};
TruncatedVelocity truncated_velocities(std::span<const double> x, double t,
                                       std::span<const double> z, double kappa,
                                       double t_min = kDefaultTMin);

// Dataset file ---------------------------------------------------------------
//
// Little-endian binary:
//   char[8]  magic "FMLDATA\0"
//   u32      format version (1)
//   u32      d
//   u64      n
//   f64      t_min
//   u64      seed
//   u32      descriptor length, then that many bytes of descriptor text
//   n rows of (z[d], t, x[d]) as f64

struct DatasetHeader {
  std::uint32_t dim = 0;
  std::uint64_t count = 0;
  double t_min = kDefaultTMin;
  std::uint64_t seed = 0;
  std::string descriptor;
};

struct Dataset {
  DatasetHeader header;
  std::vector<PathSample> samples;
};

void write_dataset(const std::filesystem::path& file, const Dataset& data);
Dataset read_dataset(const std::filesystem::path& file);
/// Header comment line, then columns z0..z{d-1}, t, x0..x{d-1}.
void write_dataset_csv(const std::filesystem::path& file, const Dataset& data);

}  // namespace fmlab
