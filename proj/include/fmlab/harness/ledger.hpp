// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

/// Append-only run ledger stored as JSON lines in the output directory.
/// Each run gets an id "<config hash prefix>-<sequence>", and every artifact
/// it writes is named "<run id>.<suffix>" next to the ledger.

#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

namespace fmlab::harness {

struct MetricRecord {
  std::string metric;
  double value = 0.0;
  double std_error = 0.0;
  std::string estimator;
  std::uint64_t seed = 0;
};

struct RunRecord {
  std::string run_id;
  std::string command;
  std::string config_hash;
  std::string source_version;
  std::uint64_t seed = 0;
  std::vector<MetricRecord> metrics;
  std::vector<std::string> artifacts;  // file names relative to the ledger directory
  nlohmann::json notes = nlohmann::json::object();
};

nlohmann::json to_json(const RunRecord& r);
RunRecord run_record_from_json(const nlohmann::json& j);

/// Build identifier baked in at configure time.
std::string source_version();

class RunLedger {
 public:
  explicit RunLedger(std::filesystem::path directory);

  const std::filesystem::path& directory() const noexcept { return dir_; }
  std::filesystem::path file() const { return dir_ / "ledger.jsonl"; }

  /// Next unused id for a config hash.
  std::string next_run_id(const std::string& config_hash) const;
  std::filesystem::path artifact_path(const std::string& run_id, const std::string& suffix) const;

  /// Appends one line. Throws if a listed artifact is missing or is not
  /// named after the run.
  void append(const RunRecord& record);
  std::vector<RunRecord> read_all() const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

struct LedgerCheck {
  bool ok = true;
  std::vector<std::string> problems;
};

/// Every artifact exists, carries its run id, and belongs to exactly one record.
LedgerCheck check_ledger(const std::filesystem::path& directory);

}  // namespace fmlab::harness
