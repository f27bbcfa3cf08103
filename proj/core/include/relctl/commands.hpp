#pragma once

#include "relctl/policy.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace relctl {

/// Options shared by the CLI subcommands. The thin flag parser in tools/
/// fills this in; tests drive the commands directly.
struct CliOptions {
  // data source: exactly one of (data_csv + schema_json + cutoff) or synthetic_json
  std::string data_csv;
  std::string schema_json;
  std::string cutoff;
  std::string synthetic_json;
  std::string external_scores; // optional: replay stored per-window scores

  std::string policy = "p0";
  int window_w = 3;
  double alpha = 0.5;
  int top_k = 50;
  int ece_bins = 15;
  std::optional<ThresholdConfig> thresholds;

  int budget = 15;
  int workers = 1;

  std::string log_path;                  // bootstrap input
  int replicates = 1000;
  double level = 0.95;

  std::vector<std::string> report_logs;  // report inputs
  std::string sweep_csv;

  std::uint64_t seed = 42;
  bool seed_overrides_synthetic = false; // --seed given explicitly
  std::string out_dir = ".";
};

/// Exit codes: 0 success, 2 config error, 3 data error, 4 internal error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

/// Parses "d1,d2,C,A" into a ThresholdConfig.
ThresholdConfig parse_thresholds_flag(const std::string& text);

void cmd_run(const CliOptions& opt, std::ostream& out);
void cmd_sweep(const CliOptions& opt, std::ostream& out);
void cmd_bootstrap(const CliOptions& opt, std::ostream& out);
void cmd_report(const CliOptions& opt, std::ostream& out);

/// Runs one subcommand, mapping exceptions to exit codes and printing the
/// error on stderr.
int dispatch(const std::string& command, const CliOptions& opt, std::ostream& out);

} // namespace relctl
