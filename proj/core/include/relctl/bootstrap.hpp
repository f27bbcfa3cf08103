#pragma once

#include "relctl/metrics.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>

namespace relctl {

/// Percentile confidence interval for one volatility metric. Percentile
/// intervals need not contain the point estimate; lower <= upper always.
struct BootstrapResult {
  std::string metric;
  double point_estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int n_replicates = 0;
  double level = 0.95;
  std::uint64_t seed = 0;
};

/// Block bootstrap over whole windows: each replicate draws T window states
/// with replacement (mt19937_64(seed), raw draw modulo T) and keeps the draw
/// order as its temporal order; both volatility metrics are recomputed per
/// replicate and bounds taken at the (1-level)/2 and 1-(1-level)/2 empirical
/// percentiles (linear interpolation). (auc, ece) pairs are resampled
/// jointly, preserving within-window dependence.
std::pair<BootstrapResult, BootstrapResult> block_bootstrap(
    std::span<const ReliabilityState> trajectory, int n_replicates = 1000, double level = 0.95,
    std::uint64_t seed = 42, DownsideMode mode = DownsideMode::PerComponent);

} // namespace relctl
