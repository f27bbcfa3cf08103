#include "relctl/predictor.hpp"

#include "relctl/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace relctl {

std::size_t Preprocessor::n_columns() const {
  std::size_t n = medians.size();
  for (const auto& v : vocabs) n += v.width();
  return n;
}

DesignMatrix Preprocessor::transform(const WindowSlice& rows) const {
  if (rows.schema == nullptr) throw InvariantError("transform: slice without schema");
  if (rows.schema->numeric_features.size() != medians.size() ||
      rows.schema->categorical_features.size() != vocabs.size())
    throw InvariantError("transform: slice schema does not match fitted preprocessor");

  DesignMatrix m;
  m.n_rows = rows.rows();
  m.n_cols = n_columns();
  m.values.assign(m.n_rows * m.n_cols, 0.0);

  std::vector<std::map<std::string, std::size_t>> index(vocabs.size());
  for (std::size_t f = 0; f < vocabs.size(); ++f)
    for (std::size_t i = 0; i < vocabs[f].categories.size(); ++i)
      index[f][vocabs[f].categories[i]] = i;

  std::size_t r0 = 0;
  for (const Window* w : rows.windows) {
    for (std::size_t r = 0; r < w->rows(); ++r) {
      double* row = m.values.data() + (r0 + r) * m.n_cols;
      std::size_t c = 0;
      for (std::size_t f = 0; f < medians.size(); ++f) {
        const double v = w->numeric[f][r];
        row[c++] = std::isnan(v) ? medians[f] : v;
      }
      for (std::size_t f = 0; f < vocabs.size(); ++f) {
        const Vocabulary& voc = vocabs[f];
        const auto it = index[f].find(w->categorical[f][r]);
        if (it != index[f].end()) {
          row[c + it->second] = 1.0;
        } else if (voc.has_other) {
          row[c + voc.categories.size()] = 1.0;
        }
        c += voc.width();
      }
    }
    r0 += w->rows();
  }
  return m;
}

Preprocessor fit_preprocessor(const WindowSlice& rows, int vocab_cap) {
  if (rows.schema == nullptr || rows.rows() == 0)
    throw DataError("fit_preprocessor: empty training rows");
  if (vocab_cap < 1) throw ConfigError("fit_preprocessor: vocab_cap must be >= 1");
  const DatasetSchema& schema = *rows.schema;

  Preprocessor pre;
  for (std::size_t f = 0; f < schema.numeric_features.size(); ++f) {
    std::vector<double> vals;
    vals.reserve(rows.rows());
    for (const Window* w : rows.windows)
      for (double v : w->numeric[f])
        if (!std::isnan(v)) vals.push_back(v);
    if (vals.empty())
      throw DataError("fit_preprocessor: feature '" + schema.numeric_features[f] +
                      "' has no observed value in training rows");
    std::sort(vals.begin(), vals.end());
    const std::size_t n = vals.size();
    pre.medians.push_back(n % 2 == 1 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]));
  }

  for (std::size_t f = 0; f < schema.categorical_features.size(); ++f) {
    std::map<std::string, std::size_t> counts;
    for (const Window* w : rows.windows)
      for (const std::string& c : w->categorical[f]) ++counts[c];

    std::vector<const std::pair<const std::string, std::size_t>*> order;
    order.reserve(counts.size());
    for (const auto& kv : counts) order.push_back(&kv);
    std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
      if (a->second != b->second) return a->second > b->second;
      return a->first < b->first;
    });

    Preprocessor::Vocabulary voc;
    const std::size_t keep = std::min<std::size_t>(order.size(), static_cast<std::size_t>(vocab_cap));
    for (std::size_t i = 0; i < keep; ++i) voc.categories.push_back(order[i]->first);
    voc.has_other = order.size() > keep;
    pre.vocabs.push_back(std::move(voc));
  }
  return pre;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double dot_row(const DesignMatrix& x, std::size_t r, std::span<const double> w, double b) {
  const double* row = x.values.data() + r * x.n_cols;
  double z = b;
  for (std::size_t c = 0; c < x.n_cols; ++c) z += row[c] * w[c];
  return z;
}

} // namespace

double logistic_loss(const DesignMatrix& x, std::span<const int> y,
                     std::span<const double> weights, double bias, double l2) {
  if (x.n_rows != y.size() || weights.size() != x.n_cols)
    throw InvariantError("logistic_loss: shape mismatch");
  double loss = 0.0;
  for (std::size_t r = 0; r < x.n_rows; ++r) {
    const double z = dot_row(x, r, weights, bias);
    // log(1 + e^z) - y z, written to stay finite for large |z|
    loss += (z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - y[r] * z;
  }
  loss /= static_cast<double>(x.n_rows);
  double penalty = 0.0;
  for (double w : weights) penalty += w * w;
  return loss + 0.5 * l2 * penalty;
}

void logistic_gradient(const DesignMatrix& x, std::span<const int> y,
                       std::span<const double> weights, double bias, double l2,
                       std::span<double> grad_weights, double& grad_bias) {
  if (x.n_rows != y.size() || weights.size() != x.n_cols || grad_weights.size() != x.n_cols)
    throw InvariantError("logistic_gradient: shape mismatch");
  std::fill(grad_weights.begin(), grad_weights.end(), 0.0);
  grad_bias = 0.0;
  for (std::size_t r = 0; r < x.n_rows; ++r) {
    const double resid = sigmoid(dot_row(x, r, weights, bias)) - y[r];
    const double* row = x.values.data() + r * x.n_cols;
    for (std::size_t c = 0; c < x.n_cols; ++c) grad_weights[c] += resid * row[c];
    grad_bias += resid;
  }
  const double inv_n = 1.0 / static_cast<double>(x.n_rows);
  for (std::size_t c = 0; c < x.n_cols; ++c)
    grad_weights[c] = grad_weights[c] * inv_n + l2 * weights[c];
  grad_bias *= inv_n;
}

LogisticModel train_builtin(const WindowSlice& rows, const TrainConfig& cfg) {
  if (cfg.epochs < 0) throw ConfigError("train_builtin: epochs must be >= 0");
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("train_builtin: learning_rate must be > 0");

  LogisticModel model;
  model.config = cfg;
  model.preprocessor = fit_preprocessor(rows, cfg.vocab_cap);

  DesignMatrix x = model.preprocessor.transform(rows);
  const std::vector<int> y = rows.concat_labels();
  std::size_t n_pos = 0;
  for (int v : y) n_pos += static_cast<std::size_t>(v);
  if (n_pos == 0 || n_pos == y.size())
    throw DataError("train_builtin: training labels contain a single class");

  // Standardize columns for a well-conditioned descent; fold the affine map
  // back into the weights afterwards so prediction works on the raw design.
  std::vector<double> mean(x.n_cols, 0.0), scale(x.n_cols, 1.0);
  for (std::size_t r = 0; r < x.n_rows; ++r)
    for (std::size_t c = 0; c < x.n_cols; ++c) mean[c] += x.at(r, c);
  for (double& m : mean) m /= static_cast<double>(x.n_rows);
  std::vector<double> var(x.n_cols, 0.0);
  for (std::size_t r = 0; r < x.n_rows; ++r)
    for (std::size_t c = 0; c < x.n_cols; ++c) {
      const double d = x.at(r, c) - mean[c];
      var[c] += d * d;
    }
  for (std::size_t c = 0; c < x.n_cols; ++c) {
    const double sd = std::sqrt(var[c] / static_cast<double>(x.n_rows));
    scale[c] = sd > 0.0 ? sd : 1.0;
  }
  for (std::size_t r = 0; r < x.n_rows; ++r)
    for (std::size_t c = 0; c < x.n_cols; ++c)
      x.values[r * x.n_cols + c] = (x.at(r, c) - mean[c]) / scale[c];

  std::vector<double> w(x.n_cols, 0.0);
  double b = 0.0;
  double lr = cfg.learning_rate;
  double loss = logistic_loss(x, y, w, b, cfg.l2);
  std::vector<double> grad(x.n_cols, 0.0);
  std::vector<double> w_try(x.n_cols, 0.0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double gb = 0.0;
    logistic_gradient(x, y, w, b, cfg.l2, grad, gb);
    // Backtrack the step until the loss does not increase.
    for (;;) {
      for (std::size_t c = 0; c < x.n_cols; ++c) w_try[c] = w[c] - lr * grad[c];
      const double b_try = b - lr * gb;
      const double loss_try = logistic_loss(x, y, w_try, b_try, cfg.l2);
      if (loss_try <= loss + 1e-12) {
        w.swap(w_try);
        b = b_try;
        loss = loss_try;
        break;
      }
      lr *= 0.5;
      if (lr < 1e-12) break;
    }
    if (lr < 1e-12) break;
  }

  // Fold standardization into the stored parameters.
  model.weights.assign(x.n_cols, 0.0);
  model.bias = b;
  for (std::size_t c = 0; c < x.n_cols; ++c) {
    model.weights[c] = w[c] / scale[c];
    model.bias -= w[c] * mean[c] / scale[c];
  }
  return model;
}

std::vector<double> LogisticModel::predict(const WindowSlice& rows) const {
  const DesignMatrix x = preprocessor.transform(rows);
  std::vector<double> out;
  out.reserve(x.n_rows);
  for (std::size_t r = 0; r < x.n_rows; ++r)
    out.push_back(sigmoid(dot_row(x, r, weights, bias)));
  return out;
}

ExternalScores load_external_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("external scores: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("external scores: empty file " + path);
  {
    const auto header = detail::split_csv_line(line);
    if (header.size() != 3 || header[0] != "window_id" || header[1] != "row_index" ||
        header[2] != "probability")
      throw DataError("external scores: expected header 'window_id,row_index,probability'");
  }

  std::map<long long, std::map<long long, double>> sparse;
  std::size_t line_no = 1;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 3)
      throw DataError("external scores: line " + std::to_string(line_no) + ": expected 3 fields");
    long long wid = 0, ridx = 0;
    double p = 0.0;
    if (!detail::parse_ll(fields[0], wid) || !detail::parse_ll(fields[1], ridx) ||
        !detail::parse_double(fields[2], p))
      throw DataError("external scores: line " + std::to_string(line_no) + ": unparseable record");
    if (!(p >= 0.0 && p <= 1.0))
      throw DataError("external scores: line " + std::to_string(line_no) +
                      ": probability outside [0,1]: " + fields[2]);
    if (ridx < 0)
      throw DataError("external scores: line " + std::to_string(line_no) + ": negative row_index");
    if (!sparse[wid].emplace(ridx, p).second)
      throw DataError("external scores: line " + std::to_string(line_no) +
                      ": duplicate row_index " + fields[1] + " in window " + fields[0]);
    any = true;
  }
  if (!any) throw DataError("external scores: no data rows in " + path);

  ExternalScores table;
  long long prev_id = 0;
  bool first = true;
  for (const auto& [wid, rows] : sparse) {
    if (!first && wid != prev_id + 1)
      throw DataError("external scores: window ids not contiguous between " +
                      std::to_string(prev_id) + " and " + std::to_string(wid));
    prev_id = wid;
    first = false;
    std::vector<double> probs(rows.size());
    for (const auto& [ridx, p] : rows) {
      if (ridx >= static_cast<long long>(rows.size()))
        throw DataError("external scores: window " + std::to_string(wid) +
                        " is missing row indices below " + std::to_string(ridx));
      probs[static_cast<std::size_t>(ridx)] = p;
    }
    table.by_window[wid] = std::move(probs);
  }
  return table;
}

Scorer Scorer::builtin(LogisticModel model) {
  Scorer s;
  s.impl_ = std::make_shared<const LogisticModel>(std::move(model));
  return s;
}

Scorer Scorer::external(std::shared_ptr<const ExternalScores> table) {
  if (!table) throw InvariantError("Scorer::external: null table");
  Scorer s;
  s.impl_ = std::move(table);
  return s;
}

bool Scorer::is_external() const {
  return std::holds_alternative<std::shared_ptr<const ExternalScores>>(impl_);
}

std::vector<double> Scorer::window_scores(const WindowedDataset& data,
                                          std::size_t window_index) const {
  if (window_index >= data.windows.size())
    throw InvariantError("window_scores: window index out of range");
  const Window& w = data.windows[window_index];
  if (const auto* model = std::get_if<std::shared_ptr<const LogisticModel>>(&impl_)) {
    WindowSlice s;
    s.schema = &data.schema;
    s.windows.push_back(&w);
    return (*model)->predict(s);
  }
  const auto& table = std::get<std::shared_ptr<const ExternalScores>>(impl_);
  const auto it = table->by_window.find(w.id);
  if (it == table->by_window.end())
    throw DataError("external scores: no scores for window " + std::to_string(w.id));
  if (it->second.size() != w.rows())
    throw DataError("external scores: window " + std::to_string(w.id) + " has " +
                    std::to_string(it->second.size()) + " scores for " +
                    std::to_string(w.rows()) + " rows");
  return it->second;
}

} // namespace relctl
