// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "fmlab/harness/commands.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "fmlab/bounds.hpp"
#include "fmlab/core/error.hpp"
#include "fmlab/core/file_io.hpp"
#include "fmlab/decomp.hpp"
#include "fmlab/harness/config.hpp"
#include "fmlab/harness/ledger.hpp"
#include "fmlab/harness/sweep.hpp"
#include "fmlab/harness/verify.hpp"
#include "fmlab/loss.hpp"
#include "fmlab/metrics.hpp"
#include "fmlab/net.hpp"
#include "fmlab/ode.hpp"
#include "fmlab/simd/kernels.hpp"
#include "fmlab/train.hpp"

namespace fmlab::harness {

namespace {

using json = nlohmann::json;

constexpr std::uint64_t kInitTag = 0x1417;
constexpr std::uint64_t kGenerateTag = 0x9e4e;
constexpr std::uint64_t kReferenceTag = 0x4e1d;
constexpr std::size_t kFinalLossSamples = 2048;

ExperimentConfig load(const CommandOptions& opts, std::vector<Requirement> required) {
  if (opts.config.empty()) throw ConfigError("--config", "a configuration file is required");
  ExperimentConfig cfg = load_experiment_config(opts.config, std::move(required));
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.train.seed = *opts.seed;
  }
  if (opts.out) cfg.output_dir = *opts.out;
  return cfg;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string key = cfg.canonical + "|seed=" + std::to_string(cfg.seed);
  return fnv1a_hex(key);
}

struct RunContext {
  RunLedger ledger;
  RunRecord record;

  RunContext(const ExperimentConfig& cfg, const std::string& command) : ledger(cfg.output_dir) {
    record.command = command;
    record.config_hash = config_hash(cfg);
    record.run_id = ledger.next_run_id(record.config_hash);
    record.source_version = source_version();
    record.seed = cfg.seed;
    record.notes["kernels"] = std::string(simd::isa_name(simd::active_isa()));
  }

  std::filesystem::path artifact(const std::string& suffix) {
    const auto p = ledger.artifact_path(record.run_id, suffix);
    record.artifacts.push_back(p.filename().string());
    return p;
  }

  void metric(std::string name, double value, double se, std::string estimator) {
    record.metrics.push_back({std::move(name), value, se, std::move(estimator), record.seed});
  }

  void commit(std::ostream& out) {
    ledger.append(record);
    out << "run " << record.run_id << " recorded in " << ledger.file().string() << "\n";
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Maps exceptions onto exit codes and prints a one-line diagnostic.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.field() << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const InputError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const RunAborted& e) {
    err << "run aborted at step " << e.step() << ": " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace

int cmd_train(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load(opts, {Requirement::kTrain});
    cfg.train.validate();
    RunContext run(cfg, "train");
    const NetworkParams init = init_params(cfg.network, derive_seed(cfg.seed, kInitTag));
    const TrainResult result = sgd_train(init, cfg.dist, cfg.train);

    write_checkpoint(run.artifact("ckpt"), result.params);
    write_trace_csv(run.artifact("trace.csv"), result.trace);
    write_file_text(run.artifact("config.json"), json::parse(cfg.canonical).dump(2) + "\n");

    const LossEstimate final_loss =
        population_loss_mc(result.params, cfg.dist, kFinalLossSamples, derive_seed(cfg.seed, 0xf1a1));
    run.metric("population_loss", final_loss.value, final_loss.std_error, "monte_carlo");
    run.metric("final_pop_grad_norm_sq", result.trace.final_pop_grad_norm_sq, 0.0, "full_gradient");
    run.record.notes["steps"] = cfg.train.n_steps;
    run.record.notes["aborted"] = result.aborted;
    if (result.aborted) {
      run.record.notes["abort_step"] = result.abort_step;
      run.record.notes["abort_reason"] = result.abort_reason;
    }
    run.commit(out);
    out << "population loss " << num(final_loss.value) << " +- " << num(final_loss.std_error) << "\n";
    if (result.aborted) {
      err << "training aborted at step " << result.abort_step << ": " << result.abort_reason << "\n";
      return kExitFailure;
    }
    return kExitOk;
  });
}

int cmd_sample(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load(opts, {Requirement::kSample});
    const SampleSettings& ss = *cfg.sample;
    const NetworkParams params = read_checkpoint(ss.checkpoint);
    if (params.spec.data_dim != cfg.dist.dim())
      throw ConfigError("sample.checkpoint", "network dimension does not match the distribution");
    RunContext run(cfg, "sample");
    const std::uint64_t gen_seed = derive_seed(cfg.seed, kGenerateTag);
    const PointCloud samples = generate(params, ss.n_samples, cfg.integrator, gen_seed);
    write_point_cloud_csv(run.artifact("samples.csv"), samples);

    PointCloud reference = PointCloud::with_size(cfg.dist.dim(), ss.n_samples);
    for (std::size_t i = 0; i < ss.n_samples; ++i) {
      Rng rng = make_stream(derive_seed(cfg.seed, kReferenceTag), i);
      cfg.dist.draw_into(rng, reference.point(i));
    }
    const bool exact = ss.n_samples <= 2048;
    const double w2 = exact ? w2_exact(samples, reference)
                            : w2_sliced_normalized(samples, reference, 256, derive_seed(cfg.seed, 0x511c));
    run.metric("w2_to_target_sample", w2, 0.0, exact ? "exact" : "sliced_normalized");

    json sidecar;
    sidecar["run_id"] = run.record.run_id;
    sidecar["seed"] = cfg.seed;
    sidecar["generation_seed"] = gen_seed;
    sidecar["n_samples"] = ss.n_samples;
    sidecar["integrator"] = {{"method", to_string(cfg.integrator.method)},
                             {"n_steps", cfg.integrator.n_steps},
                             {"t_end", cfg.integrator.t_end}};
    sidecar["checkpoint"] = ss.checkpoint.string();
    sidecar["checkpoint_fnv1a"] = fnv1a_hex(read_file_bytes(ss.checkpoint));
    write_file_text(run.artifact("samples.json"), sidecar.dump(2) + "\n");
    run.commit(out);
    out << "W2 to a fresh target sample (" << (exact ? "exact" : "sliced") << "): " << num(w2) << "\n";
    return kExitOk;
  });
}

int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load(opts, {Requirement::kSweep});
    cfg.train.validate();
    RunContext run(cfg, "sweep");
    const SweepReport rep = run_sweep(cfg);
    write_file_text(run.artifact("sweep.csv"), sweep_points_csv(rep));
    write_file_text(run.artifact("sweep_summary.csv"), sweep_summary_csv(rep));
    write_file_text(run.artifact("sweep.json"), sweep_report_json(rep).dump(2) + "\n");

    for (const SweepRow& row : rep.rows)
      run.metric("w2@n=" + std::to_string(row.n), row.mean, row.std_error, rep.estimator);
    if (!rep.points.empty() && rep.points.front().n == 0)
      run.metric("w2_untrained", rep.baseline_mean, rep.baseline_se, rep.estimator);
    run.metric("loglog_slope", rep.fit.slope, 0.0, "least_squares");
    run.metric("envelope_c", rep.envelope_c, 0.0, "anchor_at_max_n");
    run.record.notes["checks"] = {{"below_baseline", rep.below_baseline},
                                  {"nonincreasing", rep.nonincreasing},
                                  {"slope_ok", rep.slope_ok},
                                  {"under_envelope", rep.under_envelope},
                                  {"any_aborted", rep.any_aborted}};
    run.commit(out);

    out << "n        mean_w2     std_error   envelope\n";
    for (const SweepRow& row : rep.rows) {
      char line[128];
      std::snprintf(line, sizeof line, "%-8zu %-11.5f %-11.5f %.5f\n", row.n, row.mean, row.std_error, row.envelope);
      out << line;
    }
    out << "untrained " << num(rep.baseline_mean) << ", slope " << num(rep.fit.slope) << ", estimator "
        << rep.estimator << "\n";
    const bool ok = !rep.any_aborted && rep.below_baseline && rep.nonincreasing && rep.slope_ok && rep.under_envelope;
    if (!ok) err << "sweep checks failed; see " << run.record.run_id << ".sweep.json\n";
    return ok ? kExitOk : kExitFailure;
  });
}

int cmd_decompose(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load(opts, {Requirement::kDecompose});
    const DecomposeSettings& ds = *cfg.decompose;
    RunContext run(cfg, "decompose");
    std::vector<DecompositionReport> reports;
    std::string csv = decomposition_csv_header() + "\n";
    std::string jsonl;
    bool ok = true;
    for (std::size_t n : ds.n_grid) {
      DecompConfig dc;
      dc.n = n;
      dc.train = cfg.train;
      dc.erm_same = ds.erm_same;
      dc.erm_big = ds.erm_big;
      dc.big_factor = ds.big_factor;
      dc.n_mc = ds.n_mc;
      dc.delta = cfg.delta;
      dc.seed = cfg.seed;
      const DecompositionReport r = measure_decomposition_replicated(cfg.dist, cfg.network, dc, ds.replicates);
      reports.push_back(r);
      csv += decomposition_csv_row(r) + "\n";
      json j = {{"n", r.n},
                {"n_big", r.n_big},
                {"replicates", r.replicates},
                {"approx", r.approx.value},
                {"approx_se", r.approx.std_error},
                {"stat", r.stat.value},
                {"stat_se", r.stat.std_error},
                {"opt", r.opt.value},
                {"opt_se", r.opt.std_error},
                {"total", r.total.value},
                {"total_se", r.total.std_error},
                {"rhs", r.rhs},
                {"tolerance", r.tolerance},
                {"inequality_holds", r.inequality_holds},
                {"erm_same_converged", r.erm_same_converged},
                {"erm_big_converged", r.erm_big_converged},
                {"sgd_aborted", r.sgd_aborted}};
      jsonl += j.dump() + "\n";
      ok = ok && r.inequality_holds && !r.sgd_aborted;
      out << "n=" << n << " total " << num(r.total.value) << " <= " << num(r.rhs) << " + " << num(r.tolerance)
          << (r.inequality_holds ? "" : "  VIOLATED") << "\n";
      run.metric("stat@n=" + std::to_string(n), r.stat.value, r.stat.std_error, "monte_carlo");
      run.metric("total@n=" + std::to_string(n), r.total.value, r.total.std_error, "monte_carlo");
    }
    write_file_text(run.artifact("decomp.csv"), csv);
    write_file_text(run.artifact("decomp.jsonl"), jsonl);
    out << "statistical term " << (stat_trend_nonincreasing(reports) ? "nonincreasing" : "rises")
        << " across the grid within 2 combined SEs\n";
    if (reports.size() >= 4) {
      const RateFit fit = stat_rate_fit(reports);
      run.metric("stat_slope", fit.slope, 0.0, "least_squares");
      out << "statistical term slope " << num(fit.slope) << " over " << fit.points << " points\n";
    }
    run.commit(out);
    if (!ok) err << "decomposition inequality violated or training aborted\n";
    return ok ? kExitOk : kExitFailure;
  });
}

int cmd_bounds(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.config.empty()) throw ConfigError("--config", "a bound inputs file is required");
    if (opts.format != "text" && opts.format != "json") throw ConfigError("--format", "must be 'text' or 'json'");
    const BoundInputs in = load_bound_inputs(opts.config);

    std::vector<std::pair<std::string, double>> rows;
    const double kappa = kappa_of(in.C, in.d, in.n, in.delta);
    rows.emplace_back("kappa", kappa);
    rows.emplace_back("gate_budget_per_coordinate", in.delta / (static_cast<double>(in.d) * in.n));
    rows.emplace_back("growth_bound", growth_bound_closed_form(in.B, in.W, in.D, 2 * in.d + 1, kappa));
    rows.emplace_back("sample_complexity_real", sample_complexity_real(in.W, in.D, in.d, in.epsilon, in.delta, in.c_scale));
    const double n_req = sample_complexity_real(in.W, in.D, in.d, in.epsilon, in.delta, in.c_scale);
    rows.emplace_back("sample_complexity",
                      n_req < 9.0e18 ? static_cast<double>(sample_complexity(in.W, in.D, in.d, in.epsilon, in.delta,
                                                                             in.c_scale))
                                     : n_req);
    rows.emplace_back("epsilon_at_n", std::pow(in.n, -0.25));
    const SgdConstants sc = sgd_constants(in.alpha, in.mu, in.L, in.sigma_sq);
    rows.emplace_back("sgd_p", sc.p);
    rows.emplace_back("sgd_b", sc.b);
    if (sc.p > 1.0) {
      rows.emplace_back("sgd_constant_c", sgd_bound_constant(sc.p, in.gamma));
      rows.emplace_back("sgd_bound_at_n", sgd_suboptimality_bound(in.e0, sc.p, in.gamma, sc.b, in.n));
    }
    rows.emplace_back("lipschitz_integral", in.lipschitz.integral(1.0 - in.t_min));
    rows.emplace_back("w2_envelope", wasserstein_envelope(in.eps_vel, in.lipschitz, in.t_min));
    const EnvelopeConventions env = end_to_end_envelopes(in.epsilon, in.eps_approx, in.lipschitz, in.t_min);
    rows.emplace_back("w2_end_to_end_error_inside", env.error_inside);
    rows.emplace_back("w2_end_to_end_error_outside", env.error_outside);
    rows.emplace_back("w2_end_to_end_conservative", env.conservative);

    if (opts.format == "json") {
      json j = json::object();
      for (const auto& [k, v] : rows) j[k] = std::isfinite(v) ? json(v) : json(nullptr);
      if (sc.p <= 1.0) j["sgd_note"] = "alpha * mu <= 1: the O(1/n) bound does not apply";
      j["lipschitz_lower_estimate"] = in.lipschitz.lower_estimate;
      out << j.dump(2) << "\n";
    } else {
      for (const auto& [k, v] : rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%-28s %.10g\n", k.c_str(), v);
        out << line;
      }
      if (sc.p <= 1.0) out << "alpha * mu <= 1: the O(1/n) SGD bound does not apply\n";
      if (in.lipschitz.lower_estimate) out << "lipschitz profile is an empirical lower estimate\n";
    }
    return kExitOk;
  });
}

int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto fault = parse_fault(opts.fault);
    if (!fault) throw ConfigError("--fault", "unknown fault mode '" + opts.fault + "'");
    const std::uint64_t seed = opts.seed.value_or(0);
    const auto results = run_verify_suite(seed, *fault);
    bool all = true;
    for (const PropertyResult& r : results) {
      const json j = {{"property", r.name}, {"passed", r.passed}, {"detail", r.detail}};
      out << j.dump() << "\n";
      all = all && r.passed;
    }
    const json summary = {{"seed", seed}, {"fault", to_string(*fault)}, {"passed", all}};
    out << summary.dump() << "\n";
    return all ? kExitOk : kExitFailure;
  });
}

int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  if (name == "train") return cmd_train(opts, out, err);
  if (name == "sample") return cmd_sample(opts, out, err);
  if (name == "sweep") return cmd_sweep(opts, out, err);
  if (name == "decompose") return cmd_decompose(opts, out, err);
  if (name == "bounds") return cmd_bounds(opts, out, err);
  if (name == "verify") return cmd_verify(opts, out, err);
  err << "configuration error: unknown subcommand '" << name << "'\n";
  return kExitConfig;
}

}  // namespace fmlab::harness
