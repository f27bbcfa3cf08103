#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace relctl {

/// Per-window reliability of a deployed classifier: discrimination (ROC AUC),
/// calibration error (ECE) and Brier score, each in [0, 1].
struct ReliabilityState {
  double auc = 0.0;
  double ece = 0.0;
  double brier = 0.0;

  friend bool operator==(const ReliabilityState&, const ReliabilityState&) = default;
};

/// Trajectory-level volatility of the reliability state.
struct VolatilitySummary {
  double v_l1 = 0.0;          // mean |step| of (auc, ece) between windows
  double v_l1_downside = 0.0; // degrading steps only; never exceeds v_l1
  std::size_t horizon_t = 0;  // number of windows the summary covers
};

/// How downside volatility classifies a step as degrading.
enum class DownsideMode {
  PerComponent, // AUC drops and ECE rises counted independently (default)
  JointAuc,     // whole step counted iff the AUC change is negative
};

/// ROC AUC as the Mann-Whitney rank statistic: P(score+ > score-) plus half
/// the tie mass. Throws DataError unless both classes are present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Expected calibration error over `n_bins` equal-width probability bins on
/// [0, 1]. Bin b covers [b/n, (b+1)/n), the last bin is closed at 1, empty
/// bins contribute nothing, and per-bin confidence is the mean predicted
/// probability in the bin.
double ece(std::span<const double> probs, std::span<const int> labels, int n_bins = 15);

/// Mean squared difference between predicted probability and outcome.
double brier(std::span<const double> probs, std::span<const int> labels);

/// Mean absolute step of the (auc, ece) state between consecutive windows:
/// (1/(T-1)) * sum_t |A_t - A_{t-1}| + |C_t - C_{t-1}|. Requires T >= 2.
double volatility_l1(std::span<const ReliabilityState> states);

/// Volatility restricted to degrading movements; see DownsideMode.
/// Always <= volatility_l1 on the same trajectory.
double downside_volatility(std::span<const ReliabilityState> states,
                           DownsideMode mode = DownsideMode::PerComponent);

VolatilitySummary summarize_volatility(std::span<const ReliabilityState> states,
                                       DownsideMode mode = DownsideMode::PerComponent);

/// Quantile with the linear-interpolation convention: for sorted x_1..x_n and
/// p in [0,1], h = (n-1)p and q = x[floor(h)] + frac(h) * (x[floor(h)+1] -
/// x[floor(h)]). Used for alarm thresholds and bootstrap percentiles alike.
double quantile_linear(std::vector<double> values, double p);

} // namespace relctl
