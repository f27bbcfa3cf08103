#pragma once

#include <span>
#include <vector>

namespace relctl {

/// Monotone (non-decreasing) map from raw scores to calibrated probabilities.
/// breakpoints are the distinct training scores, plateau_values the fitted
/// probability at each. Evaluation interpolates linearly between breakpoints
/// and clamps outside the training range, so outputs stay in [0, 1] and the
/// score ranking is preserved up to plateau ties.
struct IsotonicCalibrator {
  std::vector<double> breakpoints;
  std::vector<double> plateau_values;

  friend bool operator==(const IsotonicCalibrator&, const IsotonicCalibrator&) = default;
};

/// Least-squares non-decreasing fit of labels on scores (pool-adjacent-
/// violators). Duplicate scores are pre-aggregated to a weighted mean label.
IsotonicCalibrator fit_isotonic(std::span<const double> scores, std::span<const int> labels);

double apply_calibrator_one(const IsotonicCalibrator& cal, double score);
std::vector<double> apply_calibrator(const IsotonicCalibrator& cal,
                                     std::span<const double> scores);

} // namespace relctl
