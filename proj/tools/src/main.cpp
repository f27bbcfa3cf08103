// relctl: deployment-reliability control for binary classifiers over
// chronological windows. Runs intervention policies, sweeps the threshold
// family for the cost-volatility frontier, and bootstraps volatility CIs.

#include "relctl/commands.hpp"
#include "relctl/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

void add_data_flags(CLI::App* cmd, relctl::CliOptions& opt) {
  cmd->add_option("--data", opt.data_csv, "Input CSV with one row per example");
  cmd->add_option("--schema", opt.schema_json,
                  "Sidecar JSON mapping each CSV column to numeric|categorical|label|date|window|ignore");
  cmd->add_option("--cutoff", opt.cutoff,
                  "First date (ISO-8601) or integer window id of the evaluation horizon");
  cmd->add_option("--synthetic", opt.synthetic_json, "Synthetic dataset config (JSON)");
  cmd->add_option("--scores", opt.external_scores,
                  "Replay external per-window scores (CSV: window_id,row_index,probability)");
}

void add_engine_flags(CLI::App* cmd, relctl::CliOptions& opt) {
  cmd->add_option("--window", opt.window_w, "Rolling window length W (retrain history and drift reference)")
      ->capture_default_str();
  cmd->add_option("--alpha", opt.alpha, "Weight of the numeric (KS) drift component")
      ->capture_default_str();
  cmd->add_option("--topk", opt.top_k, "Categories kept per histogram before pooling into OTHER")
      ->capture_default_str();
  cmd->add_option("--ece-bins", opt.ece_bins, "Equal-width probability bins for ECE")
      ->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"deployment-reliability control engine"};
  app.require_subcommand(1);

  relctl::CliOptions opt;
  std::string thresholds_flag;

  auto add_seed_out = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opt.seed, "Seed for training and synthetic generation")
        ->capture_default_str();
    cmd->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
  };

  CLI::App* run = app.add_subcommand("run", "Run one deployment policy and write its log");
  run->add_option("--policy", opt.policy, "Policy: p0 (static), p1 (periodic recalibration), "
                                          "p2 (rolling retraining), dtrc (drift-triggered)")
      ->capture_default_str();
  run->add_option("--thresholds", thresholds_flag, "dtrc thresholds d1,d2,C,A");
  add_data_flags(run, opt);
  add_engine_flags(run, opt);
  add_seed_out(run);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Evaluate the dtrc threshold family; emit operating points, frontier and knee");
  sweep->add_option("--budget", opt.budget, "Cost budget for knee selection")->capture_default_str();
  sweep->add_option("--workers", opt.workers, "Worker threads for the sweep")->capture_default_str();
  add_data_flags(sweep, opt);
  add_engine_flags(sweep, opt);
  add_seed_out(sweep);

  CLI::App* bootstrap = app.add_subcommand(
      "bootstrap", "Block-bootstrap confidence intervals for a run log's volatility");
  bootstrap->add_option("--log", opt.log_path, "Run log produced by `relctl run`")->required();
  bootstrap->add_option("--replicates", opt.replicates, "Bootstrap replicates")
      ->capture_default_str();
  bootstrap->add_option("--level", opt.level, "Confidence level")->capture_default_str();
  add_seed_out(bootstrap);

  CLI::App* report = app.add_subcommand(
      "report", "Emit tidy plot-data CSVs from run logs and/or a sweep table");
  report->add_option("--log", opt.report_logs, "Run log(s) to turn into time series");
  report->add_option("--sweep", opt.sweep_csv, "Sweep table to turn into a scatter CSV");
  report->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? relctl::kExitOk : relctl::kExitConfig;
  }

  opt.seed_overrides_synthetic = run->count("--seed") > 0 || sweep->count("--seed") > 0;
  if (!thresholds_flag.empty()) {
    try {
      opt.thresholds = relctl::parse_thresholds_flag(thresholds_flag);
    } catch (const relctl::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return relctl::kExitConfig;
    }
  }

  const std::string command = app.get_subcommands().front()->get_name();
  return relctl::dispatch(command, opt, std::cout);
}
