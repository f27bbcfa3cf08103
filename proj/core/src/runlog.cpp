#include "relctl/runlog.hpp"

#include "relctl/error.hpp"

#include <nlohmann/json.hpp>

#include <ctime>
#include <fstream>
#include <sstream>

namespace relctl {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json to_json(const DriftSignal& d) {
  ordered_json j;
  j["ks_mean"] = d.ks_mean ? ordered_json(*d.ks_mean) : ordered_json(nullptr);
  j["jsd_mean"] = d.jsd_mean ? ordered_json(*d.jsd_mean) : ordered_json(nullptr);
  j["combined"] = d.combined;
  j["alpha"] = d.alpha;
  return j;
}

DriftSignal drift_from_json(const ordered_json& j) {
  DriftSignal d;
  if (!j.at("ks_mean").is_null()) d.ks_mean = j.at("ks_mean").get<double>();
  if (!j.at("jsd_mean").is_null()) d.jsd_mean = j.at("jsd_mean").get<double>();
  d.combined = j.at("combined").get<double>();
  d.alpha = j.at("alpha").get<double>();
  return d;
}

ordered_json to_json(const IsotonicCalibrator& cal) {
  return ordered_json{{"breakpoints", cal.breakpoints}, {"values", cal.plateau_values}};
}

IsotonicCalibrator calibrator_from_json(const ordered_json& j) {
  IsotonicCalibrator cal;
  cal.breakpoints = j.at("breakpoints").get<std::vector<double>>();
  cal.plateau_values = j.at("values").get<std::vector<double>>();
  return cal;
}

ordered_json to_json(const ThresholdConfig& t) {
  return ordered_json{{"theta_d1", t.theta_d1},
                      {"theta_d2", t.theta_d2},
                      {"theta_c", t.theta_c},
                      {"theta_a", t.theta_a}};
}

ThresholdConfig thresholds_from_json(const ordered_json& j) {
  return ThresholdConfig{j.at("theta_d1").get<double>(), j.at("theta_d2").get<double>(),
                         j.at("theta_c").get<double>(), j.at("theta_a").get<double>()};
}

ordered_json to_json(const WindowRecord& r) {
  ordered_json j;
  j["window_id"] = r.window_id;
  j["pre_metrics"] = ordered_json{
      {"auc", r.pre_metrics.auc}, {"ece", r.pre_metrics.ece}, {"brier", r.pre_metrics.brier}};
  j["drift"] = to_json(r.drift);
  j["calib_fail"] = r.calib_fail;
  j["disc_fail"] = r.disc_fail;
  j["action"] = r.action ? ordered_json(to_string(*r.action)) : ordered_json(nullptr);
  j["cost"] = r.cost;
  if (r.fitted_calibrator) j["calibrator"] = to_json(*r.fitted_calibrator);
  return j;
}

WindowRecord record_from_json(const ordered_json& j) {
  WindowRecord r;
  r.window_id = j.at("window_id").get<long long>();
  const auto& m = j.at("pre_metrics");
  r.pre_metrics = ReliabilityState{m.at("auc").get<double>(), m.at("ece").get<double>(),
                                   m.at("brier").get<double>()};
  r.drift = drift_from_json(j.at("drift"));
  r.calib_fail = j.at("calib_fail").get<bool>();
  r.disc_fail = j.at("disc_fail").get<bool>();
  if (!j.at("action").is_null()) r.action = action_from_string(j.at("action").get<std::string>());
  r.cost = j.at("cost").get<int>();
  if (j.contains("calibrator")) r.fitted_calibrator = calibrator_from_json(j.at("calibrator"));
  return r;
}

ordered_json to_json(const PolicyOutcome& o) {
  ordered_json j;
  j["mean_auc"] = o.mean_auc;
  j["mean_ece"] = o.mean_ece;
  j["mean_brier"] = o.mean_brier;
  j["v_l1"] = o.v_l1;
  j["v_l1_downside"] = o.v_l1_downside;
  j["total_cost"] = o.total_cost;
  j["action_sequence"] = o.action_sequence;
  j["n_retrains"] = o.n_retrains;
  j["n_recalibrations"] = o.n_recalibrations;
  j["n_train_inits"] = o.n_train_inits;
  return j;
}

PolicyOutcome outcome_from_json(const ordered_json& j) {
  PolicyOutcome o;
  o.mean_auc = j.at("mean_auc").get<double>();
  o.mean_ece = j.at("mean_ece").get<double>();
  o.mean_brier = j.at("mean_brier").get<double>();
  o.v_l1 = j.at("v_l1").get<double>();
  o.v_l1_downside = j.at("v_l1_downside").get<double>();
  o.total_cost = j.at("total_cost").get<int>();
  o.action_sequence = j.at("action_sequence").get<std::string>();
  o.n_retrains = j.at("n_retrains").get<int>();
  o.n_recalibrations = j.at("n_recalibrations").get<int>();
  o.n_train_inits = j.at("n_train_inits").get<int>();
  return o;
}

} // namespace

std::string run_log_to_json(const RunLog& log) {
  ordered_json j;
  j["schema_version"] = log.schema_version;
  j["created"] = log.created;

  ordered_json meta;
  meta["policy"] = log.meta.policy;
  meta["data_source"] = log.meta.data_source;
  meta["rolling_window"] = log.meta.rolling_window;
  meta["alpha"] = log.meta.alpha;
  meta["top_k"] = log.meta.top_k;
  meta["ece_bins"] = log.meta.ece_bins;
  meta["seed"] = log.meta.seed;
  meta["costs"] = ordered_json{{"noop", log.meta.costs.noop},
                               {"recalibrate", log.meta.costs.recalibrate},
                               {"retrain", log.meta.costs.retrain},
                               {"both", log.meta.costs.both},
                               {"train_init", log.meta.costs.train_init}};
  meta["thresholds"] =
      log.meta.thresholds ? to_json(*log.meta.thresholds) : ordered_json(nullptr);
  j["meta"] = std::move(meta);

  ordered_json init;
  init["action"] = to_string(log.trajectory.init_action);
  init["cost"] = log.trajectory.init_cost;
  if (log.trajectory.init_calibrator)
    init["calibrator"] = to_json(*log.trajectory.init_calibrator);
  j["init"] = std::move(init);

  ordered_json windows = ordered_json::array();
  for (const WindowRecord& r : log.trajectory.records) windows.push_back(to_json(r));
  j["windows"] = std::move(windows);

  j["outcome"] = to_json(log.outcome);
  return j.dump(2) + "\n";
}

RunLog run_log_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw DataError(std::string("run log: invalid JSON: ") + e.what());
  }
  try {
    RunLog log;
    if (!j.contains("schema_version"))
      throw DataError("run log: missing schema_version (expected " +
                      std::to_string(kRunLogSchemaVersion) + ")");
    log.schema_version = j.at("schema_version").get<int>();
    if (log.schema_version != kRunLogSchemaVersion)
      throw DataError("run log: schema_version " + std::to_string(log.schema_version) +
                      " unsupported; this build reads version " +
                      std::to_string(kRunLogSchemaVersion));
    log.created = j.at("created").get<std::string>();

    const auto& meta = j.at("meta");
    log.meta.policy = meta.at("policy").get<std::string>();
    log.meta.data_source = meta.at("data_source").get<std::string>();
    log.meta.rolling_window = meta.at("rolling_window").get<int>();
    log.meta.alpha = meta.at("alpha").get<double>();
    log.meta.top_k = meta.at("top_k").get<int>();
    log.meta.ece_bins = meta.at("ece_bins").get<int>();
    log.meta.seed = meta.at("seed").get<std::uint64_t>();
    const auto& costs = meta.at("costs");
    log.meta.costs = CostTable{costs.at("noop").get<int>(), costs.at("recalibrate").get<int>(),
                               costs.at("retrain").get<int>(), costs.at("both").get<int>(),
                               costs.at("train_init").get<int>()};
    if (!meta.at("thresholds").is_null())
      log.meta.thresholds = thresholds_from_json(meta.at("thresholds"));

    log.trajectory.policy = log.meta.policy;
    const auto& init = j.at("init");
    log.trajectory.init_action = action_from_string(init.at("action").get<std::string>());
    log.trajectory.init_cost = init.at("cost").get<int>();
    if (init.contains("calibrator"))
      log.trajectory.init_calibrator = calibrator_from_json(init.at("calibrator"));
    for (const auto& rec : j.at("windows")) log.trajectory.records.push_back(record_from_json(rec));

    log.outcome = outcome_from_json(j.at("outcome"));
    return log;
  } catch (const ordered_json::exception& e) {
    throw DataError(std::string("run log: schema mismatch (version ") +
                    std::to_string(kRunLogSchemaVersion) + " expected): " + e.what());
  }
}

void write_run_log(const std::string& path, const RunLog& log) {
  std::ofstream out(path);
  if (!out) throw DataError("run log: cannot write " + path);
  out << run_log_to_json(log);
}

RunLog read_run_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("run log: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return run_log_from_json(buf.str());
}

std::string iso_timestamp_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

} // namespace relctl
