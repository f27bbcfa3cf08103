#include "relctl/dataset.hpp"

#include "relctl/error.hpp"
#include "relctl/rng.hpp"
#include "text_util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace relctl {

using nlohmann::json;

void WindowedDataset::validate() const {
  if (windows.empty()) throw DataError("dataset: no windows");
  if (n_history > windows.size()) throw InvariantError("dataset: n_history exceeds window count");
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const Window& w = windows[i];
    if (w.rows() == 0) throw DataError("dataset: window " + std::to_string(w.id) + " is empty");
    if (i > 0 && windows[i - 1].id >= w.id)
      throw DataError("dataset: window ids not strictly increasing at " + std::to_string(w.id));
    if (w.numeric.size() != schema.numeric_features.size() ||
        w.categorical.size() != schema.categorical_features.size())
      throw InvariantError("dataset: window " + std::to_string(w.id) + " does not match schema");
    for (const auto& col : w.numeric)
      if (col.size() != w.rows())
        throw InvariantError("dataset: ragged numeric column in window " + std::to_string(w.id));
    for (const auto& col : w.categorical)
      if (col.size() != w.rows())
        throw InvariantError("dataset: ragged categorical column in window " + std::to_string(w.id));
    for (int y : w.labels)
      if (y != 0 && y != 1)
        throw DataError("dataset: non-binary label in window " + std::to_string(w.id));
  }
}

std::size_t WindowSlice::rows() const {
  std::size_t n = 0;
  for (const Window* w : windows) n += w->rows();
  return n;
}

std::vector<int> WindowSlice::concat_labels() const {
  std::vector<int> out;
  out.reserve(rows());
  for (const Window* w : windows) out.insert(out.end(), w->labels.begin(), w->labels.end());
  return out;
}

WindowSlice slice_of(const WindowedDataset& data, std::size_t first, std::size_t count) {
  if (first + count > data.windows.size())
    throw InvariantError("slice_of: window range out of bounds");
  WindowSlice s;
  s.schema = &data.schema;
  for (std::size_t i = first; i < first + count; ++i) s.windows.push_back(&data.windows[i]);
  return s;
}

WindowSlice slice_single(const WindowedDataset& data, std::size_t index) {
  return slice_of(data, index, 1);
}

WindowSlice partition_reference(const WindowedDataset& data, std::size_t t, int w) {
  if (t < 1 || t > data.n_eval())
    throw DataError("partition_reference: evaluation window index out of range: " + std::to_string(t));
  if (w < 1) throw ConfigError("partition_reference: reference length must be >= 1");
  const std::size_t g = data.eval_global_index(t); // window being evaluated
  if (g == 0) throw DataError("partition_reference: no data precedes window " +
                              std::to_string(data.windows[g].id));
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(w), g);
  return slice_of(data, g - take, take);
}

// ---------------------------------------------------------------------------
// Synthetic generator
// ---------------------------------------------------------------------------

void SyntheticConfig::validate() const {
  if (n_history < 1) throw ConfigError("synthetic: n_history must be >= 1");
  if (n_windows < 1) throw ConfigError("synthetic: n_windows must be >= 1");
  if (rows_per_window < 1) throw ConfigError("synthetic: rows_per_window must be >= 1");
  if (n_numeric < 0 || n_categories < 2)
    throw ConfigError("synthetic: need n_numeric >= 0 and n_categories >= 2");
  if (!(base_rate > 0.0 && base_rate < 1.0))
    throw ConfigError("synthetic: base_rate must lie strictly inside (0,1)");
  const auto total = static_cast<std::size_t>(total_windows());
  for (const auto* sched : {&mean_shift, &cat_tilt, &coef_shift}) {
    if (!sched->empty() && sched->size() != total)
      throw ConfigError("synthetic: schedule length " + std::to_string(sched->size()) +
                        " does not match total window count " + std::to_string(total));
  }
  for (double v : cat_tilt)
    if (!(v >= 0.0 && v < 1.0)) throw ConfigError("synthetic: cat_tilt values must lie in [0,1)");
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double schedule_at(const std::vector<double>& sched, std::size_t g) {
  return sched.empty() ? 0.0 : sched[g];
}

std::vector<double> base_coefficients(int n_numeric) {
  static constexpr double pattern[] = {0.9, -0.6, 0.4, -0.3, 0.5};
  std::vector<double> beta(static_cast<std::size_t>(n_numeric));
  for (int f = 0; f < n_numeric; ++f) beta[f] = pattern[f % 5];
  return beta;
}

std::vector<double> category_coefficients(int n_categories) {
  std::vector<double> gamma(static_cast<std::size_t>(n_categories));
  for (int c = 0; c < n_categories; ++c)
    gamma[c] = -0.4 + 0.8 * static_cast<double>(c) / static_cast<double>(n_categories - 1);
  return gamma;
}

std::vector<double> base_category_probs(int n_categories) {
  std::vector<double> p(static_cast<std::size_t>(n_categories));
  double mass = 0.0;
  for (int c = 0; c < n_categories; ++c) {
    p[c] = std::pow(0.75, c);
    mass += p[c];
  }
  for (double& v : p) v /= mass;
  return p;
}

// Intercept such that the unshifted population positive rate hits base_rate,
// found by bisection on a fixed calibration sample.
double calibrate_intercept(const SyntheticConfig& cfg, const std::vector<double>& beta,
                           const std::vector<double>& gamma, const std::vector<double>& cat_probs) {
  Rng rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
  constexpr int kSample = 20000;
  std::vector<double> signal(kSample);
  for (int i = 0; i < kSample; ++i) {
    double s = 0.0;
    for (int f = 0; f < cfg.n_numeric; ++f) s += beta[f] * rng.normal();
    double u = rng.uniform01(), acc = 0.0;
    int cat = cfg.n_categories - 1;
    for (int c = 0; c < cfg.n_categories; ++c) {
      acc += cat_probs[c];
      if (u < acc) { cat = c; break; }
    }
    s += gamma[cat];
    signal[i] = s;
  }
  double lo = -12.0, hi = 12.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    double rate = 0.0;
    for (double s : signal) rate += sigmoid(mid + s);
    rate /= kSample;
    (rate < cfg.base_rate ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

WindowedDataset generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();

  WindowedDataset data;
  for (int f = 0; f < cfg.n_numeric; ++f)
    data.schema.numeric_features.push_back("x" + std::to_string(f));
  data.schema.categorical_features.push_back("segment");
  data.schema.label_column = "label";
  data.schema.time_column = "window";
  data.n_history = static_cast<std::size_t>(cfg.n_history);

  const auto beta = base_coefficients(cfg.n_numeric);
  const auto gamma = category_coefficients(cfg.n_categories);
  const auto cat_probs = base_category_probs(cfg.n_categories);
  const double intercept = calibrate_intercept(cfg, beta, gamma, cat_probs);

  Rng rng(cfg.seed);
  const int total = cfg.total_windows();
  for (int g = 0; g < total; ++g) {
    Window w;
    w.id = g + 1;
    w.numeric.assign(static_cast<std::size_t>(cfg.n_numeric), {});
    for (auto& col : w.numeric) col.reserve(static_cast<std::size_t>(cfg.rows_per_window));
    w.categorical.assign(1, {});
    w.categorical[0].reserve(static_cast<std::size_t>(cfg.rows_per_window));
    w.labels.reserve(static_cast<std::size_t>(cfg.rows_per_window));

    const double mean_off = schedule_at(cfg.mean_shift, g);
    const double tilt = schedule_at(cfg.cat_tilt, g);
    const double coef_off = schedule_at(cfg.coef_shift, g);

    std::vector<double> probs = cat_probs;
    for (int c = 0; c < cfg.n_categories; ++c)
      probs[c] = (1.0 - tilt) * cat_probs[c] + (c == 0 ? tilt : 0.0);

    for (int r = 0; r < cfg.rows_per_window; ++r) {
      double z = intercept;
      for (int f = 0; f < cfg.n_numeric; ++f) {
        const double x = mean_off + rng.normal();
        w.numeric[f].push_back(x);
        z += (beta[f] + coef_off) * x;
      }
      const double u = rng.uniform01();
      double acc = 0.0;
      int cat = cfg.n_categories - 1;
      for (int c = 0; c < cfg.n_categories; ++c) {
        acc += probs[c];
        if (u < acc) { cat = c; break; }
      }
      w.categorical[0].push_back("c" + std::to_string(cat));
      z += gamma[cat];
      w.labels.push_back(rng.uniform01() < sigmoid(z) ? 1 : 0);
    }
    data.windows.push_back(std::move(w));
  }

  data.validate();
  return data;
}

SyntheticConfig load_synthetic_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("synthetic config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("synthetic config: invalid JSON in " + path + ": " + e.what());
  }
  SyntheticConfig cfg;
  try {
    if (j.contains("n_history")) cfg.n_history = j.at("n_history").get<int>();
    if (j.contains("n_windows")) cfg.n_windows = j.at("n_windows").get<int>();
    if (j.contains("rows_per_window")) cfg.rows_per_window = j.at("rows_per_window").get<int>();
    if (j.contains("n_numeric")) cfg.n_numeric = j.at("n_numeric").get<int>();
    if (j.contains("n_categories")) cfg.n_categories = j.at("n_categories").get<int>();
    if (j.contains("base_rate")) cfg.base_rate = j.at("base_rate").get<double>();
    if (j.contains("mean_shift")) cfg.mean_shift = j.at("mean_shift").get<std::vector<double>>();
    if (j.contains("cat_tilt")) cfg.cat_tilt = j.at("cat_tilt").get<std::vector<double>>();
    if (j.contains("coef_shift")) cfg.coef_shift = j.at("coef_shift").get<std::vector<double>>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError("synthetic config: bad field in " + path + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

namespace {

enum class ColumnRole { Numeric, Categorical, Label, Date, WindowId, Ignore };

struct CsvPlan {
  DatasetSchema schema;
  std::map<std::string, ColumnRole> roles;
  std::string time_column;
  bool window_mode = false; // integer window column instead of a date
};

CsvPlan read_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("schema: cannot open " + path);
  // ordered_json keeps the file's column order, which fixes feature order in
  // the design matrix and makes save/load round-trips exact.
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("schema: invalid JSON in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("schema: expected a JSON object of column -> role");

  CsvPlan plan;
  int n_label = 0, n_time = 0;
  for (const auto& [name, v] : j.items()) {
    if (!v.is_string()) throw ConfigError("schema: role of column '" + name + "' must be a string");
    const std::string role = v.get<std::string>();
    if (role == "numeric") {
      plan.roles[name] = ColumnRole::Numeric;
      plan.schema.numeric_features.push_back(name);
    } else if (role == "categorical") {
      plan.roles[name] = ColumnRole::Categorical;
      plan.schema.categorical_features.push_back(name);
    } else if (role == "label") {
      plan.roles[name] = ColumnRole::Label;
      plan.schema.label_column = name;
      ++n_label;
    } else if (role == "date") {
      plan.roles[name] = ColumnRole::Date;
      plan.time_column = name;
      plan.window_mode = false;
      ++n_time;
    } else if (role == "window") {
      plan.roles[name] = ColumnRole::WindowId;
      plan.time_column = name;
      plan.window_mode = true;
      ++n_time;
    } else if (role == "ignore") {
      plan.roles[name] = ColumnRole::Ignore;
    } else {
      throw ConfigError("schema: unknown role '" + role + "' for column '" + name + "'");
    }
  }
  if (n_label != 1) throw ConfigError("schema: exactly one column must have role 'label'");
  if (n_time != 1)
    throw ConfigError("schema: exactly one column must have role 'date' or 'window'");
  plan.schema.time_column = plan.time_column;
  return plan;
}

} // namespace

WindowedDataset load_csv(const std::string& csv_path, const std::string& schema_path,
                         const std::string& cutoff) {
  const CsvPlan plan = read_schema_file(schema_path);

  detail::Date cutoff_date{};
  long long cutoff_window = 0;
  if (plan.window_mode) {
    if (!detail::parse_ll(cutoff, cutoff_window))
      throw ConfigError("cutoff: expected an integer window id, got '" + cutoff + "'");
  } else {
    if (!detail::parse_iso_date(cutoff, cutoff_date))
      throw ConfigError("cutoff: expected an ISO-8601 date, got '" + cutoff + "'");
  }

  std::ifstream in(csv_path);
  if (!in) throw DataError("csv: cannot open " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: empty file " + csv_path);
  const auto header = detail::split_csv_line(line);

  std::map<std::string, std::size_t> col_index;
  for (std::size_t i = 0; i < header.size(); ++i) col_index[header[i]] = i;
  for (const auto& [name, role] : plan.roles) {
    if (role == ColumnRole::Ignore) continue;
    if (!col_index.count(name)) throw DataError("csv: column '" + name + "' missing from header");
  }

  const std::size_t n_num = plan.schema.numeric_features.size();
  const std::size_t n_cat = plan.schema.categorical_features.size();
  std::vector<std::size_t> num_idx(n_num), cat_idx(n_cat);
  for (std::size_t f = 0; f < n_num; ++f) num_idx[f] = col_index[plan.schema.numeric_features[f]];
  for (std::size_t f = 0; f < n_cat; ++f) cat_idx[f] = col_index[plan.schema.categorical_features[f]];
  const std::size_t label_idx = col_index[plan.schema.label_column];
  const std::size_t time_idx = col_index[plan.time_column];

  struct Bucket {
    Window w;
    bool any_pre = false, any_post = false;
  };
  std::map<long long, Bucket> buckets;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError("csv: row " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(header.size()));

    long long key = 0;
    bool pre_cutoff = false;
    if (plan.window_mode) {
      if (!detail::parse_ll(fields[time_idx], key))
        throw DataError("csv: row " + std::to_string(line_no) + ": unparseable window id '" +
                        fields[time_idx] + "'");
      pre_cutoff = key < cutoff_window;
    } else {
      detail::Date d;
      if (!detail::parse_iso_date(fields[time_idx], d))
        throw DataError("csv: row " + std::to_string(line_no) + ": unparseable date '" +
                        fields[time_idx] + "'");
      key = d.year;
      pre_cutoff = d < cutoff_date;
    }

    long long label_v = 0;
    if (!detail::parse_ll(fields[label_idx], label_v) || (label_v != 0 && label_v != 1))
      throw DataError("csv: row " + std::to_string(line_no) + ": non-binary label '" +
                      fields[label_idx] + "'");

    auto& bucket = buckets[key];
    Window& w = bucket.w;
    if (w.numeric.empty() && w.categorical.empty()) {
      w.id = key;
      w.numeric.assign(n_num, {});
      w.categorical.assign(n_cat, {});
    }
    for (std::size_t f = 0; f < n_num; ++f) {
      const std::string& s = fields[num_idx[f]];
      if (s.empty()) {
        w.numeric[f].push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        double v;
        if (!detail::parse_double(s, v))
          throw DataError("csv: row " + std::to_string(line_no) + ": unparseable numeric value '" +
                          s + "' in column " + plan.schema.numeric_features[f]);
        w.numeric[f].push_back(v);
      }
    }
    for (std::size_t f = 0; f < n_cat; ++f) {
      const std::string& s = fields[cat_idx[f]];
      w.categorical[f].push_back(s.empty() ? kMissingCategory : s);
    }
    w.labels.push_back(static_cast<int>(label_v));
    (pre_cutoff ? bucket.any_pre : bucket.any_post) = true;
  }

  if (buckets.empty()) throw DataError("csv: no data rows in " + csv_path);

  WindowedDataset data;
  data.schema = plan.schema;
  std::size_t n_history = 0;
  for (auto& [key, bucket] : buckets) {
    if (bucket.any_pre && bucket.any_post)
      throw ConfigError("cutoff: window " + std::to_string(key) +
                        " straddles the cutoff; choose a window boundary");
    if (bucket.any_pre) ++n_history;
    data.windows.push_back(std::move(bucket.w));
  }
  data.n_history = n_history;
  if (data.n_eval() == 0) throw DataError("csv: no evaluation windows at or after the cutoff");
  data.validate();
  return data;
}

void save_csv(const WindowedDataset& data, const std::string& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw DataError("csv: cannot write " + csv_path);
  out << data.schema.time_column << "," << data.schema.label_column;
  for (const auto& n : data.schema.numeric_features) out << "," << n;
  for (const auto& n : data.schema.categorical_features) out << "," << n;
  out << "\n";
  out.precision(17);
  for (const Window& w : data.windows) {
    for (std::size_t r = 0; r < w.rows(); ++r) {
      out << w.id << "," << w.labels[r];
      for (const auto& col : w.numeric) {
        out << ",";
        if (!std::isnan(col[r])) out << col[r];
      }
      for (const auto& col : w.categorical) {
        out << ",";
        if (col[r] != kMissingCategory) out << col[r];
      }
      out << "\n";
    }
  }
}

void save_schema(const WindowedDataset& data, const std::string& schema_path) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  j[data.schema.time_column] = "window";
  j[data.schema.label_column] = "label";
  for (const auto& n : data.schema.numeric_features) j[n] = "numeric";
  for (const auto& n : data.schema.categorical_features) j[n] = "categorical";
  std::ofstream out(schema_path);
  if (!out) throw DataError("schema: cannot write " + schema_path);
  out << j.dump(2) << "\n";
}

} // namespace relctl
