#include "relctl/calibration.hpp"

#include "relctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace relctl {

IsotonicCalibrator fit_isotonic(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw DataError("fit_isotonic: scores and labels differ in length");
  if (scores.empty()) throw DataError("fit_isotonic: empty input");
  for (double s : scores)
    if (std::isnan(s)) throw DataError("fit_isotonic: NaN score");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Aggregate duplicate scores to (score, mean label, weight).
  std::vector<double> xs, ys, ws;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double label_sum = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      label_sum += labels[order[j]];
      ++j;
    }
    const double w = static_cast<double>(j - i);
    xs.push_back(scores[order[i]]);
    ys.push_back(label_sum / w);
    ws.push_back(w);
    i = j;
  }

  // Weighted PAVA: merge backwards while the last block mean drops.
  struct Block {
    double weight, mean;
    std::size_t count; // aggregated points covered
  };
  std::vector<Block> blocks;
  for (std::size_t p = 0; p < xs.size(); ++p) {
    blocks.push_back({ws[p], ys[p], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean >= blocks.back().mean) {
      const Block top = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      const double w_total = prev.weight + top.weight;
      prev.mean = (prev.weight * prev.mean + top.weight * top.mean) / w_total;
      prev.weight = w_total;
      prev.count += top.count;
    }
  }

  IsotonicCalibrator cal;
  cal.breakpoints = std::move(xs);
  cal.plateau_values.reserve(cal.breakpoints.size());
  for (const Block& b : blocks)
    cal.plateau_values.insert(cal.plateau_values.end(), b.count, b.mean);
  return cal;
}

double apply_calibrator_one(const IsotonicCalibrator& cal, double score) {
  if (cal.breakpoints.empty()) throw InvariantError("apply_calibrator: calibrator not fitted");
  const auto& xs = cal.breakpoints;
  const auto& vs = cal.plateau_values;
  if (score <= xs.front()) return vs.front();
  if (score >= xs.back()) return vs.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), score);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double t = (score - xs[lo]) / (xs[hi] - xs[lo]);
  return vs[lo] + t * (vs[hi] - vs[lo]);
}

std::vector<double> apply_calibrator(const IsotonicCalibrator& cal,
                                     std::span<const double> scores) {
  std::vector<double> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(apply_calibrator_one(cal, s));
  return out;
}

} // namespace relctl
