#pragma once

#include "relctl/policy.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace relctl {

inline constexpr int kRunLogSchemaVersion = 1;

/// Echo of the configuration a run executed under.
struct RunMeta {
  std::string policy;
  std::string data_source; // csv path or "synthetic:<path>" / "synthetic:<inline>"
  int rolling_window = 3;
  double alpha = 0.5;
  int top_k = 50;
  int ece_bins = 15;
  std::uint64_t seed = 42;
  CostTable costs;
  std::optional<ThresholdConfig> thresholds;
};

/// One deployment run as persisted to disk. `created` is the only field that
/// varies between identical runs.
struct RunLog {
  int schema_version = kRunLogSchemaVersion;
  std::string created; // ISO-8601 UTC timestamp
  RunMeta meta;
  Trajectory trajectory;
  PolicyOutcome outcome;
};

/// Serializes to a stable JSON document (stable key order and float
/// round-tripping; byte-identical for identical runs apart from `created`).
std::string run_log_to_json(const RunLog& log);
RunLog run_log_from_json(const std::string& text);

void write_run_log(const std::string& path, const RunLog& log);
/// Throws DataError with a schema-version hint on malformed or mismatched
/// input.
RunLog read_run_log(const std::string& path);

/// Current time as an ISO-8601 UTC string.
std::string iso_timestamp_now();

} // namespace relctl
