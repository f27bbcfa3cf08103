#include "relctl/metrics.hpp"

#include "relctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace relctl {

namespace {

void check_paired(std::span<const double> a, std::span<const int> b, const char* op) {
  if (a.size() != b.size())
    throw DataError(std::string(op) + ": scores and labels differ in length (" +
                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  if (a.empty()) throw DataError(std::string(op) + ": empty input");
  for (int y : b)
    if (y != 0 && y != 1)
      throw DataError(std::string(op) + ": labels must be 0 or 1");
}

} // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_paired(scores, labels, "roc_auc");
  const std::size_t n = scores.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Midranks over tie groups, then the Mann-Whitney U statistic. Ties between
  // a positive and a negative contribute 1/2 through the midrank.
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }

  std::size_t n_pos = 0;
  double rank_sum_pos = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (labels[k] == 1) {
      ++n_pos;
      rank_sum_pos += rank[k];
    }
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw DataError("roc_auc: undefined AUC, labels contain a single class");

  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double ece(std::span<const double> probs, std::span<const int> labels, int n_bins) {
  check_paired(probs, labels, "ece");
  if (n_bins < 1) throw DataError("ece: n_bins must be >= 1");
  for (double p : probs)
    if (!(p >= 0.0 && p <= 1.0))
      throw DataError("ece: probability outside [0,1]");

  const std::size_t n = probs.size();
  std::vector<double> sum_p(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<double> sum_y(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<std::size_t> count(static_cast<std::size_t>(n_bins), 0);

  for (std::size_t k = 0; k < n; ++k) {
    auto b = static_cast<std::size_t>(probs[k] * n_bins);
    if (b >= static_cast<std::size_t>(n_bins)) b = static_cast<std::size_t>(n_bins) - 1;
    sum_p[b] += probs[k];
    sum_y[b] += labels[k];
    ++count[b];
  }

  double out = 0.0;
  for (std::size_t b = 0; b < static_cast<std::size_t>(n_bins); ++b) {
    if (count[b] == 0) continue;
    const double nb = static_cast<double>(count[b]);
    out += (nb / static_cast<double>(n)) * std::fabs(sum_y[b] / nb - sum_p[b] / nb);
  }
  return out;
}

double brier(std::span<const double> probs, std::span<const int> labels) {
  check_paired(probs, labels, "brier");
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double d = probs[k] - labels[k];
    acc += d * d;
  }
  return acc / static_cast<double>(probs.size());
}

double volatility_l1(std::span<const ReliabilityState> states) {
  const std::size_t t = states.size();
  if (t < 2) throw DataError("volatility_l1: need at least 2 windows, got " + std::to_string(t));
  double acc = 0.0;
  for (std::size_t k = 1; k < t; ++k)
    acc += std::fabs(states[k].auc - states[k - 1].auc) +
           std::fabs(states[k].ece - states[k - 1].ece);
  return acc / static_cast<double>(t - 1);
}

double downside_volatility(std::span<const ReliabilityState> states, DownsideMode mode) {
  const std::size_t t = states.size();
  if (t < 2)
    throw DataError("downside_volatility: need at least 2 windows, got " + std::to_string(t));
  double acc = 0.0;
  for (std::size_t k = 1; k < t; ++k) {
    const double da = states[k].auc - states[k - 1].auc;
    const double dc = states[k].ece - states[k - 1].ece;
    if (mode == DownsideMode::PerComponent) {
      acc += std::max(0.0, -da) + std::max(0.0, dc);
    } else {
      if (da < 0.0) acc += std::fabs(da) + std::fabs(dc);
    }
  }
  return acc / static_cast<double>(t - 1);
}

VolatilitySummary summarize_volatility(std::span<const ReliabilityState> states,
                                       DownsideMode mode) {
  return VolatilitySummary{volatility_l1(states), downside_volatility(states, mode),
                           states.size()};
}

double quantile_linear(std::vector<double> values, double p) {
  if (values.empty()) throw DataError("quantile_linear: empty input");
  if (!(p >= 0.0 && p <= 1.0)) throw DataError("quantile_linear: p outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

} // namespace relctl
