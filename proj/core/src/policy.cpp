#include "relctl/policy.hpp"

#include "relctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace relctl {

const char* to_string(Action a) {
  switch (a) {
    case Action::NoOp: return "NoOp";
    case Action::Recalibrate: return "Recalibrate";
    case Action::Retrain: return "Retrain";
    case Action::Both: return "Both";
    case Action::TrainInit: return "TrainInit";
  }
  throw InvariantError("to_string: unknown action");
}

Action action_from_string(const std::string& name) {
  if (name == "NoOp") return Action::NoOp;
  if (name == "Recalibrate") return Action::Recalibrate;
  if (name == "Retrain") return Action::Retrain;
  if (name == "Both") return Action::Both;
  if (name == "TrainInit") return Action::TrainInit;
  throw DataError("unknown action name: " + name);
}

int CostTable::cost(Action a) const {
  switch (a) {
    case Action::NoOp: return noop;
    case Action::Recalibrate: return recalibrate;
    case Action::Retrain: return retrain;
    case Action::Both: return both;
    case Action::TrainInit: return train_init;
  }
  throw InvariantError("cost: unknown action");
}

int action_cost(Action a) { return CostTable{}.cost(a); }

void ThresholdConfig::validate() const {
  if (!(std::isfinite(theta_d1) && std::isfinite(theta_d2) && std::isfinite(theta_c) &&
        std::isfinite(theta_a)))
    throw ConfigError("thresholds: all values must be finite");
  if (!(theta_d2 > theta_d1))
    throw ConfigError("thresholds: theta_d2 must exceed theta_d1");
}

Action dtrc_decide(const ReliabilityState& pre, double drift, const ThresholdConfig& cfg,
                   bool model_exists) {
  if (!model_exists) return Action::TrainInit;
  const bool calib_fail = pre.ece >= cfg.theta_c;
  const bool disc_fail = pre.auc <= cfg.theta_a;
  if (drift <= cfg.theta_d1) return Action::NoOp;
  if (drift <= cfg.theta_d2) return calib_fail ? Action::Recalibrate : Action::NoOp;
  return (calib_fail || disc_fail) ? Action::Both : Action::Retrain;
}

PolicyKind policy_from_string(const std::string& name) {
  if (name == "p0") return PolicyKind::P0;
  if (name == "p1") return PolicyKind::P1;
  if (name == "p2") return PolicyKind::P2;
  if (name == "dtrc") return PolicyKind::Dtrc;
  throw ConfigError("unknown policy '" + name + "' (expected p0, p1, p2 or dtrc)");
}

const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::P0: return "p0";
    case PolicyKind::P1: return "p1";
    case PolicyKind::P2: return "p2";
    case PolicyKind::Dtrc: return "dtrc";
  }
  throw InvariantError("to_string: unknown policy kind");
}

void PolicySpec::validate() const {
  if (kind == PolicyKind::Dtrc) {
    if (!thresholds) throw ConfigError("policy dtrc requires thresholds");
    thresholds->validate();
  }
}

std::vector<ReliabilityState> Trajectory::states() const {
  std::vector<ReliabilityState> out;
  out.reserve(records.size());
  for (const WindowRecord& r : records) out.push_back(r.pre_metrics);
  return out;
}

std::string Trajectory::action_signature() const {
  std::string sig = to_string(init_action);
  for (const WindowRecord& r : records) {
    if (!r.action) break; // final window carries no boundary decision
    sig += '|';
    sig += to_string(*r.action);
  }
  return sig;
}

Scorer BuiltinLearner::fit(const WindowedDataset& data,
                           std::span<const std::size_t> window_indices) const {
  if (window_indices.empty()) throw InvariantError("fit: no training windows");
  WindowSlice s;
  s.schema = &data.schema;
  for (std::size_t i : window_indices) s.windows.push_back(&data.windows[i]);
  try {
    return Scorer::builtin(train_builtin(s, cfg_));
  } catch (const DataError& e) {
    std::string ids;
    for (std::size_t i : window_indices)
      ids += (ids.empty() ? "" : ",") + std::to_string(data.windows[i].id);
    throw DataError(std::string(e.what()) + " (training windows " + ids + ")");
  }
}

ExternalLearner::ExternalLearner(ExternalScores table)
    : table_(std::make_shared<const ExternalScores>(std::move(table))) {}

Scorer ExternalLearner::fit(const WindowedDataset&, std::span<const std::size_t>) const {
  return Scorer::external(table_);
}

namespace {

struct DeployedState {
  Scorer model;
  std::optional<IsotonicCalibrator> calibrator;

  std::vector<double> probabilities(const WindowedDataset& data, std::size_t g) const {
    std::vector<double> raw = model.window_scores(data, g);
    return calibrator ? apply_calibrator(*calibrator, raw) : raw;
  }
};

std::vector<std::size_t> index_range(std::size_t first, std::size_t last_inclusive) {
  std::vector<std::size_t> out(last_inclusive - first + 1);
  std::iota(out.begin(), out.end(), first);
  return out;
}

// Rolling training range ending at global window g: the last min(W, g+1)
// realized windows.
std::vector<std::size_t> rolling_range(std::size_t g, int w) {
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(w), g + 1);
  return index_range(g + 1 - take, g);
}

} // namespace

Trajectory run_deployment(const WindowedDataset& data, const PolicySpec& policy,
                          const EngineConfig& cfg, const Learner& learner) {
  data.validate();
  policy.validate();
  if (cfg.rolling_window < 1) throw ConfigError("engine: rolling window must be >= 1");
  const std::size_t h = data.n_history;
  const std::size_t t_total = data.n_eval();
  if (h == 0) throw DataError("run_deployment: no pre-horizon history windows for training");
  if (t_total == 0) throw DataError("run_deployment: no evaluation windows");

  Trajectory traj;
  traj.policy = to_string(policy.kind);

  // Boundary 0: put the first model in place for evaluation window 1. P2
  // starts from its rolling window; everything else trains on all history.
  DeployedState state{policy.kind == PolicyKind::P2
                          ? learner.fit(data, rolling_range(h - 1, cfg.rolling_window))
                          : learner.fit(data, index_range(0, h - 1)),
                      std::nullopt};
  switch (policy.kind) {
    case PolicyKind::P0:
      traj.init_action = Action::NoOp;
      break;
    case PolicyKind::P1: {
      // First calibrator fits on the last pre-horizon window.
      const std::size_t g = h - 1;
      state.calibrator = fit_isotonic(state.model.window_scores(data, g),
                                      data.windows[g].labels);
      traj.init_calibrator = state.calibrator;
      traj.init_action = Action::Recalibrate;
      break;
    }
    case PolicyKind::P2:
      traj.init_action = Action::Retrain;
      break;
    case PolicyKind::Dtrc:
      traj.init_action = dtrc_decide(ReliabilityState{}, 0.0, *policy.thresholds, false);
      break;
  }
  traj.init_cost = cfg.costs.cost(traj.init_action);

  for (std::size_t t = 1; t <= t_total; ++t) {
    const std::size_t g = data.eval_global_index(t);
    const Window& w = data.windows[g];

    WindowRecord rec;
    rec.window_id = w.id;

    const std::vector<double> probs = state.probabilities(data, g);
    rec.pre_metrics = ReliabilityState{roc_auc(probs, w.labels),
                                       ece(probs, w.labels, cfg.ece_bins),
                                       brier(probs, w.labels)};
    rec.drift = drift_signal(partition_reference(data, t, cfg.rolling_window),
                             slice_single(data, g), cfg.alpha, cfg.top_k);
    if (policy.thresholds) {
      rec.calib_fail = rec.pre_metrics.ece >= policy.thresholds->theta_c;
      rec.disc_fail = rec.pre_metrics.auc <= policy.thresholds->theta_a;
    }

    if (t < t_total) {
      Action action = Action::NoOp;
      switch (policy.kind) {
        case PolicyKind::P0: action = Action::NoOp; break;
        case PolicyKind::P1: action = Action::Recalibrate; break;
        case PolicyKind::P2: action = Action::Retrain; break;
        case PolicyKind::Dtrc:
          action = dtrc_decide(rec.pre_metrics, rec.drift.combined, *policy.thresholds, true);
          break;
      }

      switch (action) {
        case Action::NoOp:
          break;
        case Action::Recalibrate:
          state.calibrator = fit_isotonic(state.model.window_scores(data, g), w.labels);
          rec.fitted_calibrator = state.calibrator;
          break;
        case Action::Retrain:
          state.model = learner.fit(data, rolling_range(g, cfg.rolling_window));
          state.calibrator.reset();
          break;
        case Action::Both:
          state.model = learner.fit(data, rolling_range(g, cfg.rolling_window));
          state.calibrator = fit_isotonic(state.model.window_scores(data, g), w.labels);
          rec.fitted_calibrator = state.calibrator;
          break;
        case Action::TrainInit:
          throw InvariantError("run_deployment: TrainInit after the first boundary");
      }
      rec.action = action;
      rec.cost = cfg.costs.cost(action);
    }

    traj.records.push_back(std::move(rec));
  }

  return traj;
}

PolicyOutcome summarize(const Trajectory& traj, DownsideMode mode) {
  const std::size_t t = traj.records.size();
  if (t < 2) throw DataError("summarize: need at least 2 windows, got " + std::to_string(t));

  PolicyOutcome out;
  for (const WindowRecord& r : traj.records) {
    out.mean_auc += r.pre_metrics.auc;
    out.mean_ece += r.pre_metrics.ece;
    out.mean_brier += r.pre_metrics.brier;
  }
  out.mean_auc /= static_cast<double>(t);
  out.mean_ece /= static_cast<double>(t);
  out.mean_brier /= static_cast<double>(t);

  const auto states = traj.states();
  out.v_l1 = volatility_l1(states);
  out.v_l1_downside = downside_volatility(states, mode);

  out.total_cost = traj.init_cost;
  auto count_action = [&out](Action a) {
    switch (a) {
      case Action::NoOp: break;
      case Action::Recalibrate: ++out.n_recalibrations; break;
      case Action::Retrain: ++out.n_retrains; break;
      case Action::Both:
        ++out.n_retrains;
        ++out.n_recalibrations;
        break;
      case Action::TrainInit: ++out.n_train_inits; break;
    }
  };
  count_action(traj.init_action);
  for (const WindowRecord& r : traj.records) {
    out.total_cost += r.cost;
    if (r.action) count_action(*r.action);
  }
  out.action_sequence = traj.action_signature();
  return out;
}

} // namespace relctl
