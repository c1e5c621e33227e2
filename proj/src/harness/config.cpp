// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "fmlab/harness/config.hpp"

#include <algorithm>
#include <set>

#include "fmlab/core/error.hpp"
#include "fmlab/core/file_io.hpp"

namespace fmlab::harness {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Reads one JSON object, remembering which keys were consumed so the rest
// can be rejected.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& get(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(join(path_, key), "required field is missing");
    return j_.at(key);
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key) { return as_number(get(key), key); }
  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    return v ? as_number(*v, key) : fallback;
  }
  std::uint64_t count(const std::string& key) { return as_count(get(key), key); }
  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    const json* v = find(key);
    return v ? as_count(*v, key) : fallback;
  }
  std::string text(const std::string& key) { return as_text(get(key), key); }
  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    return v ? as_text(*v, key) : fallback;
  }
  bool flag(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(join(path_, key), "expected true or false");
    return v->get<bool>();
  }
  Vec numbers(const std::string& key) {
    const json& v = get(key);
    if (!v.is_array()) throw ConfigError(join(path_, key), "expected an array of numbers");
    Vec out;
    for (const json& e : v) out.push_back(as_number(e, key));
    return out;
  }
  std::vector<std::uint64_t> counts(const std::string& key) {
    const json& v = get(key);
    if (!v.is_array()) throw ConfigError(join(path_, key), "expected an array of integers");
    std::vector<std::uint64_t> out;
    for (const json& e : v) out.push_back(as_count(e, key));
    return out;
  }

  std::string child(const std::string& key) const { return join(path_, key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(join(path_, it.key()), "unknown field");
  }

 private:
  double as_number(const json& v, const std::string& key) const {
    if (!v.is_number()) throw ConfigError(join(path_, key), "expected a number");
    return v.get<double>();
  }
  std::uint64_t as_count(const json& v, const std::string& key) const {
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0 && !v.is_number_unsigned()))
      throw ConfigError(join(path_, key), "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }
  std::string as_text(const json& v, const std::string& key) const {
    if (!v.is_string()) throw ConfigError(join(path_, key), "expected a string");
    return v.get<std::string>();
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
auto rethrow_as_config(const std::string& field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(field, e.what());
  }
}

NetworkSpec parse_network(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  NetworkSpec s;
  s.data_dim = r.count("data_dim", s.data_dim);
  s.width = r.count("width", s.width);
  s.depth = r.count("depth", s.depth);
  s.param_bound = r.number("param_bound", s.param_bound);
  const std::string act = r.text("activation", to_string(s.activation));
  s.activation = rethrow_as_config(r.child("activation"), [&] { return parse_activation(act); });
  const std::string cond = r.text("conditioning", to_string(s.conditioning));
  s.conditioning = rethrow_as_config(r.child("conditioning"), [&] { return parse_conditioning(cond); });
  r.finish();
  rethrow_as_config(path, [&] {
    s.validate();
    return 0;
  });
  return s;
}

TrainConfig parse_train(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  TrainConfig c;
  c.alpha = r.number("alpha");
  c.gamma = r.number("gamma");
  c.n_steps = r.count("n_steps", 0);
  if (const json* v = r.find("clamp_bound")) {
    if (!v->is_number()) throw ConfigError(r.child("clamp_bound"), "expected a number");
    c.clamp_bound = v->get<double>();
  }
  if (const json* v = r.find("mu_hat")) {
    if (!v->is_number()) throw ConfigError(r.child("mu_hat"), "expected a number");
    c.mu_hat = v->get<double>();
  }
  if (const json* v = r.find("L_hat")) {
    if (!v->is_number()) throw ConfigError(r.child("L_hat"), "expected a number");
    c.L_hat = v->get<double>();
  }
  c.log_every = r.count("log_every", c.log_every);
  c.eval_samples = r.count("eval_samples", c.eval_samples);
  c.snapshot_every = r.count("snapshot_every", c.snapshot_every);
  c.divergence_factor = r.number("divergence_factor", c.divergence_factor);
  c.t_min = r.number("t_min", c.t_min);
  r.finish();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(join(path, e.field()), e.what());
  }
  return c;
}

IntegratorConfig parse_integrator(const json& j, const std::string& path, double t_min) {
  ObjectReader r(j, path);
  IntegratorConfig c;
  c.t_end = 1.0 - t_min;
  const std::string m = r.text("method", to_string(c.method));
  c.method = rethrow_as_config(r.child("method"), [&] { return parse_method(m); });
  c.n_steps = r.count("n_steps", c.n_steps);
  c.t_end = r.number("t_end", c.t_end);
  r.finish();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(join(path, e.field()), e.what());
  }
  return c;
}

std::vector<std::size_t> parse_grid(ObjectReader& r, const std::string& key) {
  const auto raw = r.counts(key);
  std::vector<std::size_t> grid(raw.begin(), raw.end());
  if (grid.empty()) throw ConfigError(r.child(key), "must not be empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1]) throw ConfigError(r.child(key), "must be strictly increasing");
  if (grid.front() == 0) throw ConfigError(r.child(key), "entries must be positive");
  return grid;
}

GdConfig parse_gd(const json& j, const std::string& path, GdConfig c) {
  ObjectReader r(j, path);
  c.step = r.number("step", c.step);
  c.budget = r.count("budget", c.budget);
  c.tol = r.number("tol", c.tol);
  r.finish();
  if (!(c.step > 0.0)) throw ConfigError(join(path, "step"), "must be positive");
  if (c.budget == 0) throw ConfigError(join(path, "budget"), "must be positive");
  return c;
}

}  // namespace

json read_json_file(const std::filesystem::path& file) {
  std::string text;
  try {
    text = read_file_bytes(file);
  } catch (const std::exception& e) {
    throw ConfigError("<file>", e.what());
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<syntax>", e.what());
  }
}

json distribution_to_json(const TargetDistribution& dist) {
  json j;
  switch (dist.kind()) {
    case DistributionKind::kGaussianMixture: {
      j["kind"] = "gaussian_mixture";
      json comps = json::array();
      for (const auto& c : dist.components()) comps.push_back({{"mean", c.mean}, {"scale", c.scale}, {"weight", c.weight}});
      j["components"] = comps;
      break;
    }
    case DistributionKind::kUniformBox:
      j["kind"] = "uniform_box";
      j["lo"] = dist.box_lo();
      j["hi"] = dist.box_hi();
      break;
    case DistributionKind::kTwoMoons:
      j["kind"] = "two_moons";
      j["noise"] = dist.moon_noise();
      break;
  }
  return j;
}

TargetDistribution distribution_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  const std::string kind = r.text("kind");
  TargetDistribution out;
  if (kind == "reference_mixture") {
    out = TargetDistribution::reference_mixture();
  } else if (kind == "gaussian_mixture") {
    const json& comps = r.get("components");
    if (!comps.is_array() || comps.empty()) throw ConfigError(r.child("components"), "expected a nonempty array");
    std::vector<MixtureComponent> cs;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      ObjectReader c(comps[i], r.child("components") + "[" + std::to_string(i) + "]");
      MixtureComponent mc;
      mc.mean = c.numbers("mean");
      mc.scale = c.number("scale");
      mc.weight = c.number("weight", 1.0);
      c.finish();
      cs.push_back(std::move(mc));
    }
    out = rethrow_as_config(r.child("components"), [&] { return TargetDistribution::gaussian_mixture(cs); });
  } else if (kind == "uniform_box") {
    Vec lo = r.numbers("lo"), hi = r.numbers("hi");
    out = rethrow_as_config(path, [&] { return TargetDistribution::uniform_box(lo, hi); });
  } else if (kind == "two_moons") {
    const double noise = r.number("noise", 0.05);
    out = rethrow_as_config(path, [&] { return TargetDistribution::two_moons(noise); });
  } else if (kind == "point_mass") {
    Vec z0 = r.numbers("point");
    out = rethrow_as_config(path, [&] { return TargetDistribution::point_mass(z0); });
  } else {
    throw ConfigError(r.child("kind"), "unknown distribution kind '" + kind + "'");
  }
  r.finish();
  return out;
}

ExperimentConfig parse_experiment_config(const json& doc, std::vector<Requirement> required) {
  ObjectReader r(doc, "");
  ExperimentConfig c;
  c.schema_version = static_cast<int>(r.count("schema_version"));
  if (c.schema_version != kSchemaVersion)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(c.schema_version));
  c.seed = r.count("seed", 0);
  c.output_dir = r.text("output_dir", c.output_dir.string());
  c.delta = r.number("delta", c.delta);
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ConfigError("delta", "must lie in (0, 1)");
  c.c_scale = r.number("c_scale", c.c_scale);
  if (!(c.c_scale > 0.0)) throw ConfigError("c_scale", "must be positive");
  if (const json* d = r.find("distribution")) c.dist = distribution_from_json(*d, "distribution");
  if (const json* n = r.find("network")) c.network = parse_network(*n, "network");
  if (c.network.data_dim != c.dist.dim()) throw ConfigError("network.data_dim", "does not match the distribution");

  auto needs = [&](Requirement q) { return std::find(required.begin(), required.end(), q) != required.end(); };
  auto require_section = [&](const char* key, bool needed) -> const json* {
    const json* s = r.find(key);
    if (!s && needed) throw ConfigError(key, "required section is missing");
    return s;
  };

  if (const json* t = require_section("train", needs(Requirement::kTrain) || needs(Requirement::kSweep) ||
                                                   needs(Requirement::kDecompose))) {
    c.train = parse_train(*t, "train");
    c.train.seed = c.seed;
    c.has_train = true;
  }
  c.integrator.t_end = 1.0 - c.train.t_min;
  if (const json* i = r.find("integrator")) c.integrator = parse_integrator(*i, "integrator", c.train.t_min);

  if (const json* s = require_section("sweep", needs(Requirement::kSweep))) {
    ObjectReader sr(*s, "sweep");
    SweepSettings ss;
    ss.n_grid = parse_grid(sr, "n_grid");
    ss.seeds = sr.counts("seeds");
    if (ss.seeds.empty()) throw ConfigError("sweep.seeds", "must not be empty");
    ss.heldout = sr.count("heldout", ss.heldout);
    ss.generated = sr.count("generated", ss.generated);
    ss.sliced_projections = sr.count("sliced_projections", ss.sliced_projections);
    ss.include_baseline = sr.flag("include_baseline", ss.include_baseline);
    sr.finish();
    if (ss.heldout < 2 || ss.generated < 2) throw ConfigError("sweep.heldout", "clouds need at least two points");
    c.sweep = ss;
  }
  if (const json* s = require_section("decompose", needs(Requirement::kDecompose))) {
    ObjectReader dr(*s, "decompose");
    DecomposeSettings ds;
    ds.n_grid = parse_grid(dr, "n_grid");
    if (const json* g = dr.find("erm_same")) ds.erm_same = parse_gd(*g, "decompose.erm_same", ds.erm_same);
    if (const json* g = dr.find("erm_big")) ds.erm_big = parse_gd(*g, "decompose.erm_big", ds.erm_big);
    ds.big_factor = dr.count("big_factor", ds.big_factor);
    ds.n_mc = dr.count("n_mc", ds.n_mc);
    ds.replicates = dr.count("replicates", ds.replicates);
    dr.finish();
    if (ds.big_factor < 1) throw ConfigError("decompose.big_factor", "must be at least 1");
    if (ds.n_mc < 100) throw ConfigError("decompose.n_mc", "must be at least 100");
    if (ds.replicates < 1) throw ConfigError("decompose.replicates", "must be at least 1");
    if (ds.n_grid.front() < 10) throw ConfigError("decompose.n_grid", "entries must be at least 10");
    c.decompose = ds;
  }
  if (const json* s = require_section("sample", needs(Requirement::kSample))) {
    ObjectReader sr(*s, "sample");
    SampleSettings ss;
    ss.checkpoint = sr.text("checkpoint");
    ss.n_samples = sr.count("n_samples", ss.n_samples);
    sr.finish();
    if (ss.n_samples == 0) throw ConfigError("sample.n_samples", "must be positive");
    c.sample = ss;
  }
  r.finish();
  c.canonical = doc.dump();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& file, std::vector<Requirement> required) {
  ExperimentConfig c = parse_experiment_config(read_json_file(file), std::move(required));
  const auto base = file.parent_path();
  if (c.output_dir.is_relative()) c.output_dir = base / c.output_dir;
  if (c.sample && c.sample->checkpoint.is_relative()) c.sample->checkpoint = base / c.sample->checkpoint;
  return c;
}

BoundInputs parse_bound_inputs(const json& doc) {
  ObjectReader r(doc, "");
  const auto version = r.count("schema_version");
  if (version != kSchemaVersion) throw ConfigError("schema_version", "unsupported version");
  BoundInputs b;
  b.W = r.count("W");
  b.D = r.count("D");
  b.d = r.count("d");
  b.B = r.number("B");
  b.n = r.number("n");
  b.delta = r.number("delta");
  b.epsilon = r.number("epsilon");
  b.C = r.number("C", b.C);
  b.c_scale = r.number("c_scale", b.c_scale);
  b.alpha = r.number("alpha", b.alpha);
  b.gamma = r.number("gamma", b.gamma);
  b.mu = r.number("mu", b.mu);
  b.L = r.number("L", b.L);
  b.sigma_sq = r.number("sigma_sq", b.sigma_sq);
  b.e0 = r.number("e0", b.e0);
  b.eps_vel = r.number("eps_vel", b.eps_vel);
  b.eps_approx = r.number("eps_approx", b.eps_approx);
  b.t_min = r.number("t_min", b.t_min);
  if (const json* l = r.find("lipschitz")) {
    if (l->is_number()) {
      b.lipschitz = LipschitzProfile::constant(l->get<double>());
    } else {
      ObjectReader lr(*l, "lipschitz");
      b.lipschitz.edges = lr.numbers("edges");
      b.lipschitz.values = lr.numbers("values");
      lr.finish();
    }
    rethrow_as_config("lipschitz", [&] {
      b.lipschitz.validate();
      return 0;
    });
  }
  r.finish();
  if (b.W < 1 || b.D < 1 || b.d < 1) throw ConfigError("W", "W, D and d must be at least 1");
  if (!(b.delta > 0.0 && b.delta < 1.0)) throw ConfigError("delta", "must lie in (0, 1)");
  if (!(b.epsilon > 0.0)) throw ConfigError("epsilon", "must be positive");
  return b;
}

BoundInputs load_bound_inputs(const std::filesystem::path& file) { return parse_bound_inputs(read_json_file(file)); }

}  // namespace fmlab::harness
