#include "relctl/commands.hpp"

#include "relctl/bootstrap.hpp"
#include "relctl/error.hpp"
#include "relctl/log.hpp"
#include "relctl/runlog.hpp"
#include "relctl/sweep.hpp"
#include "text_util.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

namespace relctl {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

ThresholdConfig parse_thresholds_flag(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    double v;
    if (!detail::parse_double(tok, v))
      throw ConfigError("--thresholds: unparseable value '" + tok + "'");
    vals.push_back(v);
  }
  if (vals.size() != 4)
    throw ConfigError("--thresholds: expected 4 comma-separated values d1,d2,C,A");
  ThresholdConfig cfg{vals[0], vals[1], vals[2], vals[3]};
  cfg.validate();
  return cfg;
}

namespace {

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw ConfigError(std::string(flag) + ": missing required path");
  if (!fs::exists(path)) throw ConfigError(std::string(flag) + ": file not found: " + path);
}

struct LoadedData {
  WindowedDataset data;
  std::string source;
  std::uint64_t seed;
};

LoadedData load_data(const CliOptions& opt) {
  const bool has_csv = !opt.data_csv.empty();
  const bool has_synth = !opt.synthetic_json.empty();
  if (has_csv == has_synth)
    throw ConfigError("data source: give exactly one of --data/--schema/--cutoff or --synthetic");

  if (has_csv) {
    require_file(opt.data_csv, "--data");
    require_file(opt.schema_json, "--schema");
    if (opt.cutoff.empty()) throw ConfigError("--cutoff: required with --data");
    return {load_csv(opt.data_csv, opt.schema_json, opt.cutoff), opt.data_csv, opt.seed};
  }

  require_file(opt.synthetic_json, "--synthetic");
  SyntheticConfig cfg = load_synthetic_config(opt.synthetic_json);
  if (opt.seed_overrides_synthetic) cfg.seed = opt.seed;
  return {generate_synthetic(cfg), "synthetic:" + opt.synthetic_json, cfg.seed};
}

EngineConfig make_engine_config(const CliOptions& opt) {
  EngineConfig cfg;
  if (opt.window_w < 1) throw ConfigError("--window: must be >= 1");
  if (!(opt.alpha >= 0.0 && opt.alpha <= 1.0)) throw ConfigError("--alpha: must lie in [0,1]");
  if (opt.top_k < 1) throw ConfigError("--topk: must be >= 1");
  if (opt.ece_bins < 1) throw ConfigError("--ece-bins: must be >= 1");
  cfg.rolling_window = opt.window_w;
  cfg.alpha = opt.alpha;
  cfg.top_k = opt.top_k;
  cfg.ece_bins = opt.ece_bins;
  cfg.train.seed = opt.seed;
  return cfg;
}

std::unique_ptr<Learner> make_learner(const CliOptions& opt, const EngineConfig& cfg) {
  if (!opt.external_scores.empty()) {
    require_file(opt.external_scores, "--scores");
    return std::make_unique<ExternalLearner>(load_external_scores(opt.external_scores));
  }
  return std::make_unique<BuiltinLearner>(cfg.train);
}

void ensure_out_dir(const std::string& dir) {
  if (dir.empty()) throw ConfigError("--out: missing output directory");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("--out: cannot create directory " + dir + ": " + ec.message());
}

void print_outcome_table(std::ostream& out, const std::string& policy,
                         const PolicyOutcome& o) {
  out << std::left << std::setw(8) << "policy" << std::right << std::setw(10) << "mean_auc"
      << std::setw(10) << "mean_ece" << std::setw(12) << "mean_brier" << std::setw(10) << "v_l1"
      << std::setw(10) << "v_l1_dn" << std::setw(6) << "cost" << '\n';
  out << std::left << std::setw(8) << policy << std::right << std::fixed
      << std::setprecision(6) << std::setw(10) << o.mean_auc << std::setw(10) << o.mean_ece
      << std::setw(12) << o.mean_brier << std::setw(10) << o.v_l1 << std::setw(10)
      << o.v_l1_downside << std::defaultfloat << std::setw(6) << o.total_cost << '\n';
  out << "actions: " << o.action_sequence << '\n';
}

RunMeta make_meta(const CliOptions& opt, const LoadedData& loaded, const EngineConfig& cfg,
                  const PolicySpec& spec) {
  RunMeta meta;
  meta.policy = to_string(spec.kind);
  meta.data_source = loaded.source;
  meta.rolling_window = cfg.rolling_window;
  meta.alpha = cfg.alpha;
  meta.top_k = cfg.top_k;
  meta.ece_bins = cfg.ece_bins;
  meta.seed = loaded.seed;
  meta.costs = cfg.costs;
  meta.thresholds = spec.thresholds;
  return meta;
}

} // namespace

void cmd_run(const CliOptions& opt, std::ostream& out) {
  const PolicyKind kind = policy_from_string(opt.policy);
  PolicySpec spec{kind, opt.thresholds};
  if (kind == PolicyKind::Dtrc && !opt.thresholds)
    throw ConfigError("--thresholds: required for --policy dtrc");
  spec.validate();

  const LoadedData loaded = load_data(opt);
  const EngineConfig cfg = make_engine_config(opt);
  const auto learner = make_learner(opt, cfg);
  ensure_out_dir(opt.out_dir);

  const Trajectory traj = run_deployment(loaded.data, spec, cfg, *learner);
  const PolicyOutcome outcome = summarize(traj, cfg.downside_mode);

  RunLog log;
  log.created = iso_timestamp_now();
  log.meta = make_meta(opt, loaded, cfg, spec);
  log.trajectory = traj;
  log.outcome = outcome;
  const std::string path = (fs::path(opt.out_dir) / ("run_" + opt.policy + ".json")).string();
  write_run_log(path, log);

  print_outcome_table(out, opt.policy, outcome);
  out << "log: " << path << '\n';
}

void cmd_sweep(const CliOptions& opt, std::ostream& out) {
  const LoadedData loaded = load_data(opt);
  const EngineConfig cfg = make_engine_config(opt);
  const auto learner = make_learner(opt, cfg);
  ensure_out_dir(opt.out_dir);
  if (opt.workers < 1) throw ConfigError("--workers: must be >= 1");

  // Static baseline supplies the alarm quantiles and the observed drift values.
  const Trajectory p0 = run_deployment(loaded.data, PolicySpec{PolicyKind::P0, {}}, cfg, *learner);
  const auto [theta_c, theta_a] = reliability_alarm_thresholds(p0);
  const std::vector<double> drifts = drift_series(p0);
  const std::vector<double> candidates = candidate_drift_thresholds(drifts);

  const std::vector<OperatingPoint> raw =
      sweep(loaded.data, candidates, theta_c, theta_a, cfg, *learner, opt.workers);
  const std::vector<OperatingPoint> points = dedup_by_action_signature(raw);
  const ParetoFrontier frontier = pareto_frontier(points);
  const KneeResult knee = knee_select(frontier, opt.budget);

  const std::string path = (fs::path(opt.out_dir) / "sweep.csv").string();
  std::ofstream csv(path);
  if (!csv) throw DataError("sweep: cannot write " + path);
  write_operating_points_csv(csv, points, frontier, &knee.point);

  out << "alarms: theta_c=" << theta_c << " theta_a=" << theta_a << '\n';
  out << "candidates: " << candidates.size() << ", pairs evaluated: " << raw.size()
      << ", distinct operating points: " << points.size()
      << ", frontier size: " << frontier.points.size() << '\n';
  out << "knee (budget " << opt.budget << "): theta_d1=" << knee.point.config.theta_d1
      << " theta_d2=" << knee.point.config.theta_d2
      << " cost=" << knee.point.outcome.total_cost << " v_l1=" << knee.point.outcome.v_l1;
  if (!knee.within_budget) out << "  [budget infeasible; minimum-cost fallback]";
  out << '\n';
  out << "table: " << path << '\n';
}

void cmd_bootstrap(const CliOptions& opt, std::ostream& out) {
  require_file(opt.log_path, "--log");
  if (opt.replicates < 1) throw ConfigError("--replicates: must be >= 1");
  if (!(opt.level > 0.0 && opt.level < 1.0)) throw ConfigError("--level: must lie in (0,1)");
  ensure_out_dir(opt.out_dir);

  const RunLog log = read_run_log(opt.log_path);
  const auto states = log.trajectory.states();
  const auto [v, v_down] =
      block_bootstrap(states, opt.replicates, opt.level, opt.seed);

  ordered_json j;
  j["policy"] = log.meta.policy;
  j["source_log"] = opt.log_path;
  auto result_json = [](const BootstrapResult& r) {
    return ordered_json{{"metric", r.metric},
                        {"point_estimate", r.point_estimate},
                        {"lower", r.lower},
                        {"upper", r.upper},
                        {"n_replicates", r.n_replicates},
                        {"level", r.level},
                        {"seed", r.seed}};
  };
  j["results"] = ordered_json::array({result_json(v), result_json(v_down)});
  const std::string path =
      (fs::path(opt.out_dir) / ("bootstrap_" + log.meta.policy + ".json")).string();
  std::ofstream file(path);
  if (!file) throw DataError("bootstrap: cannot write " + path);
  file << j.dump(2) << "\n";

  out << std::left << std::setw(16) << "metric" << std::right << std::setw(12) << "point"
      << std::setw(12) << "lower" << std::setw(12) << "upper" << '\n';
  for (const BootstrapResult* r : {&v, &v_down})
    out << std::left << std::setw(16) << r->metric << std::right << std::fixed
        << std::setprecision(6) << std::setw(12) << r->point_estimate << std::setw(12)
        << r->lower << std::setw(12) << r->upper << std::defaultfloat << '\n';
  out << "ci: " << path << '\n';
}

namespace {

std::vector<std::vector<std::string>> read_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("report: cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(detail::split_csv_line(line));
  }
  if (rows.empty()) throw DataError("report: empty csv " + path);
  return rows;
}

} // namespace

void cmd_report(const CliOptions& opt, std::ostream& out) {
  if (opt.report_logs.empty() && opt.sweep_csv.empty())
    throw ConfigError("report: give at least one --log or a --sweep csv");
  ensure_out_dir(opt.out_dir);

  if (!opt.report_logs.empty()) {
    std::vector<RunLog> logs;
    for (const std::string& p : opt.report_logs) {
      require_file(p, "--log");
      logs.push_back(read_run_log(p)); // rejects mismatched schema versions
    }

    auto series = [&](const char* filename, auto&& value_columns, auto&& value_writer) {
      const std::string path = (fs::path(opt.out_dir) / filename).string();
      std::ofstream csv(path);
      if (!csv) throw DataError("report: cannot write " + path);
      csv << "policy,window_id" << value_columns << "\n";
      csv.precision(17);
      for (const RunLog& log : logs)
        for (const WindowRecord& r : log.trajectory.records) {
          csv << log.meta.policy << ',' << r.window_id;
          value_writer(csv, r);
          csv << '\n';
        }
      out << "series: " << path << '\n';
    };

    series("auc_series.csv", ",auc",
           [](std::ostream& csv, const WindowRecord& r) { csv << ',' << r.pre_metrics.auc; });
    series("ece_series.csv", ",ece",
           [](std::ostream& csv, const WindowRecord& r) { csv << ',' << r.pre_metrics.ece; });
    series("drift_series.csv", ",ks_mean,jsd_mean,combined",
           [](std::ostream& csv, const WindowRecord& r) {
             csv << ',';
             if (r.drift.ks_mean) csv << *r.drift.ks_mean;
             csv << ',';
             if (r.drift.jsd_mean) csv << *r.drift.jsd_mean;
             csv << ',' << r.drift.combined;
           });
  }

  if (!opt.sweep_csv.empty()) {
    require_file(opt.sweep_csv, "--sweep");
    const auto table = read_csv_table(opt.sweep_csv);
    const auto& header = table.front();
    auto col = [&](const std::string& name) {
      for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
      throw DataError("report: sweep csv missing column '" + name + "'");
    };
    const std::size_t c_cost = col("total_cost"), c_v = col("v_l1"),
                      c_front = col("on_frontier"), c_knee = col("is_knee"),
                      c_d1 = col("theta_d1"), c_d2 = col("theta_d2");

    const std::string path = (fs::path(opt.out_dir) / "scatter.csv").string();
    std::ofstream csv(path);
    if (!csv) throw DataError("report: cannot write " + path);
    csv << "total_cost,v_l1,on_frontier,is_knee,theta_d1,theta_d2\n";
    for (std::size_t r = 1; r < table.size(); ++r) {
      const auto& row = table[r];
      csv << row[c_cost] << ',' << row[c_v] << ',' << row[c_front] << ',' << row[c_knee] << ','
          << row[c_d1] << ',' << row[c_d2] << '\n';
    }
    out << "scatter: " << path << '\n';
  }
}

int dispatch(const std::string& command, const CliOptions& opt, std::ostream& out) {
  try {
    if (command == "run") {
      cmd_run(opt, out);
    } else if (command == "sweep") {
      cmd_sweep(opt, out);
    } else if (command == "bootstrap") {
      cmd_bootstrap(opt, out);
    } else if (command == "report") {
      cmd_report(opt, out);
    } else {
      throw ConfigError("unknown command '" + command + "'");
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

} // namespace relctl
