#pragma once

#include "relctl/policy.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace relctl {

/// One evaluated dtrc configuration: thresholds, realized outcome and the
/// canonical action sequence it produced.
struct OperatingPoint {
  ThresholdConfig config;
  PolicyOutcome outcome;
  std::string action_signature;
};

/// Candidate drift thresholds: midpoints between consecutive sorted unique
/// observed drift values, plus one sentinel below the minimum and one above
/// the maximum (min-1 and max+1) so always-off and always-on policies are in
/// the grid. Sorted ascending.
std::vector<double> candidate_drift_thresholds(std::span<const double> drift_values);

/// Combined drift value per evaluation window of a trajectory.
std::vector<double> drift_series(const Trajectory& traj);

/// Reliability alarm levels from a static (p0) run: theta_c is the 0.8
/// quantile of per-window ECE, theta_a the 0.2 quantile of per-window AUC,
/// linear-interpolation convention.
std::pair<double, double> reliability_alarm_thresholds(const Trajectory& p0_trajectory);

/// Evaluates one full dtrc deployment per ordered candidate pair
/// (theta_d1 < theta_d2) with the fixed alarm levels. Runs are independent
/// and may execute on `workers` threads; the result is identical to
/// sequential evaluation and ordered by (theta_d1, theta_d2).
std::vector<OperatingPoint> sweep(const WindowedDataset& data,
                                  std::span<const double> candidates, double theta_c,
                                  double theta_a, const EngineConfig& cfg,
                                  const Learner& learner, int workers = 1);

/// Keeps one point per distinct action signature: the lexicographically
/// smallest (theta_d1, theta_d2). Output ordered by (theta_d1, theta_d2).
std::vector<OperatingPoint> dedup_by_action_signature(std::vector<OperatingPoint> points);

/// Non-dominated points in (total_cost, v_l1), cost-ascending. Along the
/// frontier volatility is strictly decreasing; exact ties on both
/// coordinates keep the smallest (theta_d1, theta_d2).
struct ParetoFrontier {
  std::vector<OperatingPoint> points;
};

ParetoFrontier pareto_frontier(std::span<const OperatingPoint> points);

/// The frontier point minimizing v_l1 subject to total_cost <= budget. When
/// no point fits the budget, falls back to the minimum-cost point and flags
/// it (also warned on the log).
struct KneeResult {
  OperatingPoint point;
  bool within_budget = true;
};

KneeResult knee_select(const ParetoFrontier& frontier, int budget = 15);

/// Writes the operating-point table: one row per point with its thresholds,
/// outcome columns and on_frontier / is_knee flags.
void write_operating_points_csv(std::ostream& out, std::span<const OperatingPoint> points,
                                const ParetoFrontier& frontier, const OperatingPoint* knee);

} // namespace relctl
