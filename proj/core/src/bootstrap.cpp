#include "relctl/bootstrap.hpp"

#include "relctl/error.hpp"
#include "relctl/rng.hpp"

#include <vector>

namespace relctl {

std::pair<BootstrapResult, BootstrapResult> block_bootstrap(
    std::span<const ReliabilityState> trajectory, int n_replicates, double level,
    std::uint64_t seed, DownsideMode mode) {
  const std::size_t t = trajectory.size();
  if (t < 2) throw DataError("block_bootstrap: need at least 2 windows");
  if (n_replicates < 1) throw ConfigError("block_bootstrap: need at least 1 replicate");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("block_bootstrap: level outside (0,1)");

  // Indices are drawn up-front so replicates are independent of evaluation
  // order; replicate r uses draws [r*t, (r+1)*t).
  Rng rng(seed);
  std::vector<std::size_t> draws(static_cast<std::size_t>(n_replicates) * t);
  for (auto& d : draws) d = rng.index(t);

  std::vector<double> v(static_cast<std::size_t>(n_replicates));
  std::vector<double> v_down(static_cast<std::size_t>(n_replicates));
  std::vector<ReliabilityState> replicate(t);
  for (int r = 0; r < n_replicates; ++r) {
    for (std::size_t k = 0; k < t; ++k)
      replicate[k] = trajectory[draws[static_cast<std::size_t>(r) * t + k]];
    v[r] = volatility_l1(replicate);
    v_down[r] = downside_volatility(replicate, mode);
  }

  const double lo_p = 0.5 * (1.0 - level);
  const double hi_p = 1.0 - lo_p;
  auto make = [&](const char* name, double point, std::vector<double> samples) {
    BootstrapResult res;
    res.metric = name;
    res.point_estimate = point;
    res.lower = quantile_linear(samples, lo_p);
    res.upper = quantile_linear(std::move(samples), hi_p);
    res.n_replicates = n_replicates;
    res.level = level;
    res.seed = seed;
    return res;
  };
  return {make("v_l1", volatility_l1(trajectory), std::move(v)),
          make("v_l1_downside", downside_volatility(trajectory, mode), std::move(v_down))};
}

} // namespace relctl
