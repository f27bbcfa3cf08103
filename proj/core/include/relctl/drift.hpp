#pragma once

#include "relctl/dataset.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>

namespace relctl {

/// Reserved key that absorbs categories beyond the top-k cut.
inline constexpr const char* kOtherCategory = "__OTHER__";

/// Distributional change between a reference period and an evaluation
/// window. ks_mean averages the per-numeric-feature KS statistic, jsd_mean
/// the per-categorical-feature Jensen-Shannon divergence on compressed
/// histograms. A component is absent when the schema has no feature of that
/// kind; combined then falls back to the remaining component.
struct DriftSignal {
  std::optional<double> ks_mean;
  std::optional<double> jsd_mean;
  double combined = 0.0;
  double alpha = 0.5;

  friend bool operator==(const DriftSignal&, const DriftSignal&) = default;
};

/// Probability histogram over at most k named categories plus kOtherCategory.
struct CompressedHistogram {
  std::map<std::string, double> probs;
};

/// Two-sample Kolmogorov-Smirnov statistic: the sup over observed values of
/// the empirical-CDF gap. Inputs must be non-empty and free of NaN (drop
/// missing values first).
double ks_statistic(std::span<const double> sample_a, std::span<const double> sample_b);

/// Keeps the k most frequent categories (ties broken by lexicographic order)
/// and pools everything else into kOtherCategory, normalized to total mass 1.
CompressedHistogram compress_histogram(const std::map<std::string, double>& counts, int k = 50);

/// Jensen-Shannon divergence with base-2 logarithms, so the value lies in
/// [0, 1]. Histograms are aligned on the union of keys with zero fill; each
/// must sum to 1 within 1e-9.
double jsd(const CompressedHistogram& h_a, const CompressedHistogram& h_b);

/// Combined drift between a reference slice and an evaluation slice:
/// alpha * ks_mean + (1 - alpha) * jsd_mean. Per-side histograms are
/// compressed independently before the JSD. Features empty on either side
/// are skipped with a warning; a fully absent component drops out of the
/// combination (also warned).
DriftSignal drift_signal(const WindowSlice& reference, const WindowSlice& evaluation,
                         double alpha = 0.5, int k = 50);

} // namespace relctl
