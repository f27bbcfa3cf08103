#include "relctl/sweep.hpp"

#include "relctl/error.hpp"
#include "relctl/log.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

namespace relctl {

std::vector<double> candidate_drift_thresholds(std::span<const double> drift_values) {
  if (drift_values.empty()) throw DataError("candidate_drift_thresholds: no drift values");
  std::vector<double> uniq(drift_values.begin(), drift_values.end());
  for (double v : uniq)
    if (!std::isfinite(v)) throw DataError("candidate_drift_thresholds: non-finite drift value");
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

  std::vector<double> out;
  out.reserve(uniq.size() + 1);
  out.push_back(uniq.front() - 1.0); // always-on sentinel: below every observed value
  for (std::size_t i = 1; i < uniq.size(); ++i) out.push_back(0.5 * (uniq[i - 1] + uniq[i]));
  out.push_back(uniq.back() + 1.0);  // always-off sentinel: above every observed value
  return out;
}

std::vector<double> drift_series(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.records.size());
  for (const WindowRecord& r : traj.records) out.push_back(r.drift.combined);
  return out;
}

std::pair<double, double> reliability_alarm_thresholds(const Trajectory& p0_trajectory) {
  if (p0_trajectory.records.size() < 2)
    throw DataError("reliability_alarm_thresholds: need a trajectory with at least 2 windows");
  std::vector<double> eces, aucs;
  for (const WindowRecord& r : p0_trajectory.records) {
    eces.push_back(r.pre_metrics.ece);
    aucs.push_back(r.pre_metrics.auc);
  }
  return {quantile_linear(std::move(eces), 0.8), quantile_linear(std::move(aucs), 0.2)};
}

std::vector<OperatingPoint> sweep(const WindowedDataset& data,
                                  std::span<const double> candidates, double theta_c,
                                  double theta_a, const EngineConfig& cfg,
                                  const Learner& learner, int workers) {
  std::vector<double> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() < 2) throw ConfigError("sweep: need at least 2 distinct candidates");

  std::vector<ThresholdConfig> configs;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    for (std::size_t j = i + 1; j < sorted.size(); ++j)
      configs.push_back(ThresholdConfig{sorted[i], sorted[j], theta_c, theta_a});

  std::vector<OperatingPoint> points(configs.size());
  detail::parallel_for(configs.size(), workers, [&](std::size_t i) {
    PolicySpec spec{PolicyKind::Dtrc, configs[i]};
    const Trajectory traj = run_deployment(data, spec, cfg, learner);
    points[i] = OperatingPoint{configs[i], summarize(traj, cfg.downside_mode),
                               traj.action_signature()};
  });
  return points;
}

namespace {

bool lex_less(const ThresholdConfig& a, const ThresholdConfig& b) {
  if (a.theta_d1 != b.theta_d1) return a.theta_d1 < b.theta_d1;
  return a.theta_d2 < b.theta_d2;
}

} // namespace

std::vector<OperatingPoint> dedup_by_action_signature(std::vector<OperatingPoint> points) {
  std::stable_sort(points.begin(), points.end(),
                   [](const OperatingPoint& a, const OperatingPoint& b) {
                     return lex_less(a.config, b.config);
                   });
  std::set<std::string> seen;
  std::vector<OperatingPoint> out;
  for (auto& p : points)
    if (seen.insert(p.action_signature).second) out.push_back(std::move(p));
  return out;
}

ParetoFrontier pareto_frontier(std::span<const OperatingPoint> points) {
  ParetoFrontier frontier;
  for (const OperatingPoint& p : points) {
    bool dominated = false;
    for (const OperatingPoint& q : points) {
      const bool leq = q.outcome.total_cost <= p.outcome.total_cost &&
                       q.outcome.v_l1 <= p.outcome.v_l1;
      const bool strict = q.outcome.total_cost < p.outcome.total_cost ||
                          q.outcome.v_l1 < p.outcome.v_l1;
      if (leq && strict) {
        dominated = true;
        break;
      }
    }
    if (!dominated) frontier.points.push_back(p);
  }

  std::sort(frontier.points.begin(), frontier.points.end(),
            [](const OperatingPoint& a, const OperatingPoint& b) {
              if (a.outcome.total_cost != b.outcome.total_cost)
                return a.outcome.total_cost < b.outcome.total_cost;
              if (a.outcome.v_l1 != b.outcome.v_l1) return a.outcome.v_l1 < b.outcome.v_l1;
              return lex_less(a.config, b.config);
            });
  // Coordinate ties survive dominance pairwise; keep one representative.
  frontier.points.erase(
      std::unique(frontier.points.begin(), frontier.points.end(),
                  [](const OperatingPoint& a, const OperatingPoint& b) {
                    return a.outcome.total_cost == b.outcome.total_cost &&
                           a.outcome.v_l1 == b.outcome.v_l1;
                  }),
      frontier.points.end());
  return frontier;
}

KneeResult knee_select(const ParetoFrontier& frontier, int budget) {
  if (frontier.points.empty()) throw DataError("knee_select: empty frontier");
  const OperatingPoint* best = nullptr;
  for (const OperatingPoint& p : frontier.points) {
    if (p.outcome.total_cost > budget) continue;
    if (!best || p.outcome.v_l1 < best->outcome.v_l1) best = &p;
  }
  if (best) return KneeResult{*best, true};
  log::warn("knee_select: no frontier point within budget " + std::to_string(budget) +
            "; falling back to the minimum-cost point");
  const auto min_cost =
      std::min_element(frontier.points.begin(), frontier.points.end(),
                       [](const OperatingPoint& a, const OperatingPoint& b) {
                         return a.outcome.total_cost < b.outcome.total_cost;
                       });
  return KneeResult{*min_cost, false};
}

void write_operating_points_csv(std::ostream& out, std::span<const OperatingPoint> points,
                                const ParetoFrontier& frontier, const OperatingPoint* knee) {
  auto on_frontier = [&](const OperatingPoint& p) {
    for (const OperatingPoint& q : frontier.points)
      if (q.config == p.config) return true;
    return false;
  };
  auto is_knee = [&](const OperatingPoint& p) { return knee && knee->config == p.config; };

  out << "theta_d1,theta_d2,theta_c,theta_a,mean_auc,mean_ece,mean_brier,"
         "v_l1,v_l1_downside,total_cost,n_retrains,n_recalibrations,on_frontier,is_knee\n";
  const auto prec = out.precision(17);
  for (const OperatingPoint& p : points) {
    out << p.config.theta_d1 << ',' << p.config.theta_d2 << ',' << p.config.theta_c << ','
        << p.config.theta_a << ',' << p.outcome.mean_auc << ',' << p.outcome.mean_ece << ','
        << p.outcome.mean_brier << ',' << p.outcome.v_l1 << ',' << p.outcome.v_l1_downside
        << ',' << p.outcome.total_cost << ',' << p.outcome.n_retrains << ','
        << p.outcome.n_recalibrations << ',' << (on_frontier(p) ? 1 : 0) << ','
        << (is_knee(p) ? 1 : 0) << '\n';
  }
  out.precision(prec);
}

} // namespace relctl
