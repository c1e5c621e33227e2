// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "fmlab/harness/ledger.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fmlab/core/error.hpp"

#ifndef FMLAB_SOURCE_VERSION
#define FMLAB_SOURCE_VERSION "unknown"
#endif

namespace fmlab::harness {

using nlohmann::json;

std::string source_version() { return FMLAB_SOURCE_VERSION; }

json to_json(const RunRecord& r) {
  json metrics = json::array();
  for (const MetricRecord& m : r.metrics)
    metrics.push_back({{"metric", m.metric},
                       {"value", m.value},
                       {"std_error", m.std_error},
                       {"estimator", m.estimator},
                       {"seed", m.seed}});
  return json{{"run_id", r.run_id},
              {"command", r.command},
              {"config_hash", r.config_hash},
              {"source_version", r.source_version},
              {"seed", r.seed},
              {"metrics", metrics},
              {"artifacts", r.artifacts},
              {"notes", r.notes}};
}

RunRecord run_record_from_json(const json& j) {
  RunRecord r;
  r.run_id = j.at("run_id").get<std::string>();
  r.command = j.at("command").get<std::string>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.source_version = j.at("source_version").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const json& m : j.at("metrics")) {
    MetricRecord mr;
    mr.metric = m.at("metric").get<std::string>();
    // NaN and infinity serialize as null.
    mr.value = m.at("value").is_null() ? std::nan("") : m.at("value").get<double>();
    mr.std_error = m.at("std_error").is_null() ? std::nan("") : m.at("std_error").get<double>();
    mr.estimator = m.at("estimator").get<std::string>();
    mr.seed = m.at("seed").get<std::uint64_t>();
    r.metrics.push_back(std::move(mr));
  }
  r.artifacts = j.at("artifacts").get<std::vector<std::string>>();
  if (j.contains("notes")) r.notes = j.at("notes");
  return r;
}

RunLedger::RunLedger(std::filesystem::path directory) : dir_(std::move(directory)) {
  std::filesystem::create_directories(dir_);
}

std::vector<RunRecord> RunLedger::read_all() const {
  std::vector<RunRecord> out;
  std::ifstream in(file());
  if (!in) return out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(run_record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw InputError("ledger line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string RunLedger::next_run_id(const std::string& config_hash) const {
  std::lock_guard<std::mutex> lock(mutex_);
  const std::string prefix = config_hash.substr(0, 8);
  std::size_t seq = 0;
  for (const RunRecord& r : read_all())
    if (r.run_id.rfind(prefix + "-", 0) == 0) ++seq;
  std::ostringstream id;
  id << prefix << '-';
  id.width(4);
  id.fill('0');
  id << seq + 1;
  return id.str();
}

std::filesystem::path RunLedger::artifact_path(const std::string& run_id, const std::string& suffix) const {
  return dir_ / (run_id + "." + suffix);
}

void RunLedger::append(const RunRecord& record) {
  for (const std::string& a : record.artifacts) {
    if (a.rfind(record.run_id + ".", 0) != 0) throw InputError("ledger: artifact '" + a + "' is not named after its run");
    if (!std::filesystem::exists(dir_ / a)) throw InputError("ledger: artifact '" + a + "' does not exist");
  }
  std::lock_guard<std::mutex> lock(mutex_);
  std::ofstream out(file(), std::ios::app | std::ios::binary);
  if (!out) throw InputError("ledger: cannot open " + file().string());
  out << to_json(record).dump() << '\n';
  if (!out) throw InputError("ledger: write failed");
}

LedgerCheck check_ledger(const std::filesystem::path& directory) {
  LedgerCheck check;
  RunLedger ledger(directory);
  std::map<std::string, std::string> owner;
  std::map<std::string, int> ids;
  for (const RunRecord& r : ledger.read_all()) {
    if (++ids[r.run_id] > 1) {
      check.ok = false;
      check.problems.push_back("duplicate run id " + r.run_id);
    }
    for (const std::string& a : r.artifacts) {
      if (!std::filesystem::exists(directory / a)) {
        check.ok = false;
        check.problems.push_back("missing artifact " + a);
      }
      if (a.rfind(r.run_id + ".", 0) != 0) {
        check.ok = false;
        check.problems.push_back("artifact " + a + " not named after " + r.run_id);
      }
      auto [it, inserted] = owner.emplace(a, r.run_id);
      if (!inserted) {
        check.ok = false;
        check.problems.push_back("artifact " + a + " listed by several runs");
      }
    }
  }
  return check;
}

}  // namespace fmlab::harness
