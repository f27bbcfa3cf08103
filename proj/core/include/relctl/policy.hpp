#pragma once

#include "relctl/calibration.hpp"
#include "relctl/dataset.hpp"
#include "relctl/drift.hpp"
#include "relctl/metrics.hpp"
#include "relctl/predictor.hpp"

#include <optional>
#include <string>
#include <vector>

namespace relctl {

/// Intervention vocabulary. TrainInit occurs at most once, at the first
/// decision boundary, when no model has been deployed yet.
enum class Action { NoOp, Recalibrate, Retrain, Both, TrainInit };

const char* to_string(Action a);
Action action_from_string(const std::string& name);

/// Weighted per-action charge. Retraining carries the dominant burden;
/// combined actions are additive; the initial training inside the decision
/// loop is charged like a retrain.
struct CostTable {
  int noop = 0;
  int recalibrate = 1;
  int retrain = 5;
  int both = 6;
  int train_init = 5;

  int cost(Action a) const;
};

/// Cost of an action under the default table.
int action_cost(Action a);

/// Drift and reliability alarm thresholds driving the dtrc policy.
struct ThresholdConfig {
  double theta_d1 = 0.0; // low/moderate drift boundary
  double theta_d2 = 0.0; // moderate/severe drift boundary, > theta_d1
  double theta_c = 1.0;  // ECE alarm level (calib_fail when ece >= theta_c)
  double theta_a = 0.0;  // AUC alarm level (disc_fail when auc <= theta_a)

  void validate() const;
  friend bool operator==(const ThresholdConfig&, const ThresholdConfig&) = default;
};

/// Drift-first hierarchical decision rule:
///   no model                 -> TrainInit
///   d <= theta_d1            -> NoOp
///   theta_d1 < d <= theta_d2 -> Recalibrate if calib_fail else NoOp
///   d >  theta_d2            -> Both if calib_fail or disc_fail else Retrain
Action dtrc_decide(const ReliabilityState& pre, double drift, const ThresholdConfig& cfg,
                   bool model_exists);

enum class PolicyKind { P0, P1, P2, Dtrc };

PolicyKind policy_from_string(const std::string& name);
const char* to_string(PolicyKind k);

struct PolicySpec {
  PolicyKind kind = PolicyKind::P0;
  std::optional<ThresholdConfig> thresholds; // required for Dtrc

  void validate() const;
};

/// Engine parameters shared by every policy run.
struct EngineConfig {
  int rolling_window = 3; // W: retrain history and drift reference length
  double alpha = 0.5;     // drift combination weight
  int top_k = 50;         // histogram compression
  int ece_bins = 15;
  CostTable costs;
  TrainConfig train;
  DownsideMode downside_mode = DownsideMode::PerComponent;
};

/// Per-evaluation-window log entry. `action` is the decision taken at the
/// boundary after this window realizes (affecting later windows only); the
/// final window has none because nothing follows it.
struct WindowRecord {
  long long window_id = 0;
  ReliabilityState pre_metrics;      // deployed model, this window
  DriftSignal drift;                 // this window vs its reference period
  bool calib_fail = false;
  bool disc_fail = false;
  std::optional<Action> action;
  int cost = 0;
  std::optional<IsotonicCalibrator> fitted_calibrator; // logged when the action fit one
};

/// Full deployment transcript: the boundary-0 action that put the first
/// model in place, then one record per evaluation window.
struct Trajectory {
  std::string policy;
  Action init_action = Action::NoOp;
  int init_cost = 0;
  std::optional<IsotonicCalibrator> init_calibrator; // p1's boundary-0 fit
  std::vector<WindowRecord> records;

  std::vector<ReliabilityState> states() const;
  /// Boundary actions 0..T-1 joined with '|'; the canonical dedup key.
  std::string action_signature() const;
};

struct PolicyOutcome {
  double mean_auc = 0.0;
  double mean_ece = 0.0;
  double mean_brier = 0.0;
  double v_l1 = 0.0;
  double v_l1_downside = 0.0;
  int total_cost = 0;
  std::string action_sequence;
  int n_retrains = 0;        // Retrain + Both actions
  int n_recalibrations = 0;  // Recalibrate + Both actions
  int n_train_inits = 0;
};

/// Produces models for the engine: the built-in logistic learner, or an
/// external-score replay for which training requests are no-ops.
class Learner {
public:
  virtual ~Learner() = default;
  virtual Scorer fit(const WindowedDataset& data,
                     std::span<const std::size_t> window_indices) const = 0;
};

class BuiltinLearner final : public Learner {
public:
  explicit BuiltinLearner(TrainConfig cfg = {}) : cfg_(cfg) {}
  Scorer fit(const WindowedDataset& data,
             std::span<const std::size_t> window_indices) const override;

private:
  TrainConfig cfg_;
};

/// Serves stored per-window probabilities regardless of the requested
/// training windows; retraining a replayed score stream cannot change it,
/// but actions are still logged and charged.
class ExternalLearner final : public Learner {
public:
  explicit ExternalLearner(ExternalScores table);
  Scorer fit(const WindowedDataset& data,
             std::span<const std::size_t> window_indices) const override;

private:
  std::shared_ptr<const ExternalScores> table_;
};

/// Runs the chronological deployment loop. Decision boundaries are
/// b = 0..T-1; the action chosen at boundary b configures the system for
/// window b+1 onward, and no step reads beyond the just-ended window:
///   boundary 0: P0/P1 train on all pre-horizon windows (uncharged setup;
///     P1 additionally recalibrates on the last pre-horizon window), P2
///     retrains on the last W pre-horizon windows, dtrc performs TrainInit
///     on all pre-horizon data;
///   boundary b >= 1 (after window b): the policy sees window b's metrics
///     and drift; Recalibrate fits on window b's scores, Retrain refits on
///     the last W realized windows, Both retrains then recalibrates on
///     window b with the new model's scores.
Trajectory run_deployment(const WindowedDataset& data, const PolicySpec& policy,
                          const EngineConfig& cfg, const Learner& learner);

/// Aggregates a trajectory: metric means, volatility, total cost (boundary-0
/// action included), action counts. Requires at least 2 windows.
PolicyOutcome summarize(const Trajectory& traj,
                        DownsideMode mode = DownsideMode::PerComponent);

} // namespace relctl
