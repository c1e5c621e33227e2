// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

/// Experiment configuration: one JSON document with a versioned schema.
/// Unknown keys are errors, and every error names the offending field by its
/// dotted path (for example "train.alpha").

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fmlab/bounds.hpp"
#include "fmlab/decomp.hpp"
#include "fmlab/net.hpp"
#include "fmlab/ode.hpp"
#include "fmlab/path.hpp"
#include "fmlab/train.hpp"

namespace fmlab::harness {

inline constexpr int kSchemaVersion = 1;

struct SweepSettings {
  std::vector<std::size_t> n_grid;
  std::vector<std::uint64_t> seeds;
  std::size_t heldout = 2048;
  std::size_t generated = 2048;
  std::size_t sliced_projections = 256;
  bool include_baseline = true;
};

struct DecomposeSettings {
  std::vector<std::size_t> n_grid;
  GdConfig erm_same;
  GdConfig erm_big;
  std::size_t big_factor = 50;
  std::size_t n_mc = 4096;
  std::size_t replicates = 1;
};

struct SampleSettings {
  std::filesystem::path checkpoint;
  std::size_t n_samples = 1024;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "runs";
  TargetDistribution dist = TargetDistribution::reference_mixture();
  NetworkSpec network;
  TrainConfig train;
  bool has_train = false;
  IntegratorConfig integrator;
  std::optional<SweepSettings> sweep;
  std::optional<DecomposeSettings> decompose;
  std::optional<SampleSettings> sample;
  double delta = 0.05;
  double c_scale = 1.0;
  /// Serialization of the parsed document (sorted keys), hashed into run ids.
  std::string canonical;
};

/// Sections a command needs; a missing required section is a ConfigError.
enum class Requirement { kTrain, kSample, kSweep, kDecompose };

ExperimentConfig parse_experiment_config(const nlohmann::json& doc, std::vector<Requirement> required = {});
/// Relative paths inside the file resolve against the file's directory.
ExperimentConfig load_experiment_config(const std::filesystem::path& file, std::vector<Requirement> required = {});

nlohmann::json distribution_to_json(const TargetDistribution& dist);
TargetDistribution distribution_from_json(const nlohmann::json& j, const std::string& path = "distribution");

/// Inputs of the bounds calculator.
struct BoundInputs {
  std::size_t W = 1, D = 2, d = 1;
  double B = 1.0;
  double n = 1.0;
  double delta = 0.05;
  double epsilon = 0.5;
  double C = 1.0;
  double c_scale = 1.0;
  double alpha = 2.0, gamma = 2.0, mu = 1.0, L = 1.0, sigma_sq = 1.0;
  double e0 = 1.0;
  double eps_vel = 0.0;
  double eps_approx = 0.0;
  double t_min = kDefaultTMin;
  LipschitzProfile lipschitz = LipschitzProfile::constant(0.0);
};

BoundInputs parse_bound_inputs(const nlohmann::json& doc);
BoundInputs load_bound_inputs(const std::filesystem::path& file);

/// Parses a JSON file, reporting I/O and syntax errors as ConfigError.
nlohmann::json read_json_file(const std::filesystem::path& file);

}  // namespace fmlab::harness
