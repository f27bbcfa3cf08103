#include "relctl/drift.hpp"

#include "relctl/error.hpp"
#include "relctl/log.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace relctl {

double ks_statistic(std::span<const double> sample_a, std::span<const double> sample_b) {
  if (sample_a.empty() || sample_b.empty()) throw DataError("ks_statistic: empty sample");

  std::vector<double> a(sample_a.begin(), sample_a.end());
  std::vector<double> b(sample_b.begin(), sample_b.end());
  for (double v : a)
    if (std::isnan(v)) throw DataError("ks_statistic: NaN in sample; drop missing values first");
  for (double v : b)
    if (std::isnan(v)) throw DataError("ks_statistic: NaN in sample; drop missing values first");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double sup = 0.0;
  // Walk the pooled order; evaluate the CDF gap just after each distinct value.
  while (ia < a.size() && ib < b.size()) {
    const double v = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] == v) ++ia;
    while (ib < b.size() && b[ib] == v) ++ib;
    sup = std::max(sup, std::fabs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }
  // Once one side is exhausted the gap only shrinks back to zero.
  return sup;
}

CompressedHistogram compress_histogram(const std::map<std::string, double>& counts, int k) {
  if (k < 0) throw ConfigError("compress_histogram: k must be >= 0");
  double total = 0.0;
  for (const auto& [name, c] : counts) {
    if (c < 0.0) throw DataError("compress_histogram: negative count for category " + name);
    total += c;
  }
  if (!(total > 0.0)) throw DataError("compress_histogram: total count is zero");

  // Rank by count descending, lexicographic on ties; deterministic cut.
  std::vector<const std::pair<const std::string, double>*> order;
  order.reserve(counts.size());
  for (const auto& kv : counts) order.push_back(&kv);
  std::sort(order.begin(), order.end(), [](const auto* x, const auto* y) {
    if (x->second != y->second) return x->second > y->second;
    return x->first < y->first;
  });

  CompressedHistogram h;
  double other = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i < static_cast<std::size_t>(k))
      h.probs[order[i]->first] = order[i]->second / total;
    else
      other += order[i]->second;
  }
  if (other > 0.0) h.probs[kOtherCategory] = other / total;
  return h;
}

namespace {

void check_normalized(const CompressedHistogram& h, const char* side) {
  double mass = 0.0;
  for (const auto& [name, p] : h.probs) {
    if (p < 0.0) throw DataError(std::string("jsd: negative probability in ") + side);
    mass += p;
  }
  if (std::fabs(mass - 1.0) > 1e-9)
    throw DataError(std::string("jsd: histogram ") + side + " not normalized (mass " +
                    std::to_string(mass) + ")");
}

} // namespace

double jsd(const CompressedHistogram& h_a, const CompressedHistogram& h_b) {
  check_normalized(h_a, "a");
  check_normalized(h_b, "b");

  auto prob = [](const CompressedHistogram& h, const std::string& key) {
    auto it = h.probs.find(key);
    return it == h.probs.end() ? 0.0 : it->second;
  };

  double acc = 0.0;
  auto add_side = [&](const CompressedHistogram& self, const CompressedHistogram& other) {
    for (const auto& [key, p] : self.probs) {
      if (p <= 0.0) continue;
      const double m = 0.5 * (p + prob(other, key));
      acc += 0.5 * p * std::log2(p / m);
    }
  };
  add_side(h_a, h_b);
  add_side(h_b, h_a);
  // Guard the [0,1] range against rounding at the extremes.
  return std::min(1.0, std::max(0.0, acc));
}

namespace {

std::vector<double> gather_numeric(const WindowSlice& s, std::size_t feature) {
  std::vector<double> out;
  out.reserve(s.rows());
  for (const Window* w : s.windows)
    for (double v : w->numeric[feature])
      if (!std::isnan(v)) out.push_back(v);
  return out;
}

std::map<std::string, double> gather_counts(const WindowSlice& s, std::size_t feature) {
  std::map<std::string, double> counts;
  for (const Window* w : s.windows)
    for (const std::string& c : w->categorical[feature]) counts[c] += 1.0;
  return counts;
}

} // namespace

DriftSignal drift_signal(const WindowSlice& reference, const WindowSlice& evaluation,
                         double alpha, int k) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("drift_signal: alpha outside [0,1]");
  if (reference.schema == nullptr || evaluation.schema == nullptr ||
      reference.schema != evaluation.schema)
    throw InvariantError("drift_signal: slices must share one schema");
  const DatasetSchema& schema = *reference.schema;

  DriftSignal sig;
  sig.alpha = alpha;

  double ks_sum = 0.0;
  std::size_t ks_n = 0;
  for (std::size_t f = 0; f < schema.numeric_features.size(); ++f) {
    const auto ref = gather_numeric(reference, f);
    const auto eva = gather_numeric(evaluation, f);
    if (ref.empty() || eva.empty()) {
      log::warn("drift: numeric feature '" + schema.numeric_features[f] +
                "' empty on one side; skipped");
      continue;
    }
    ks_sum += ks_statistic(ref, eva);
    ++ks_n;
  }
  if (ks_n > 0) sig.ks_mean = ks_sum / static_cast<double>(ks_n);

  double jsd_sum = 0.0;
  std::size_t jsd_n = 0;
  for (std::size_t f = 0; f < schema.categorical_features.size(); ++f) {
    const auto ref_counts = gather_counts(reference, f);
    const auto eva_counts = gather_counts(evaluation, f);
    if (ref_counts.empty() || eva_counts.empty()) {
      log::warn("drift: categorical feature '" + schema.categorical_features[f] +
                "' empty on one side; skipped");
      continue;
    }
    jsd_sum += jsd(compress_histogram(ref_counts, k), compress_histogram(eva_counts, k));
    ++jsd_n;
  }
  if (jsd_n > 0) sig.jsd_mean = jsd_sum / static_cast<double>(jsd_n);

  if (sig.ks_mean && sig.jsd_mean) {
    sig.combined = alpha * *sig.ks_mean + (1.0 - alpha) * *sig.jsd_mean;
  } else if (sig.ks_mean) {
    log::warn("drift: no categorical component; combined signal uses KS alone");
    sig.combined = *sig.ks_mean;
  } else if (sig.jsd_mean) {
    log::warn("drift: no numeric component; combined signal uses JSD alone");
    sig.combined = *sig.jsd_mean;
  } else {
    throw DataError("drift_signal: no usable features on both sides");
  }
  return sig;
}

} // namespace relctl
