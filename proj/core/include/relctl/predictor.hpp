#pragma once

#include "relctl/dataset.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace relctl {

/// Row-major design matrix.
struct DesignMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * n_cols + c]; }
};

/// Fitted feature pipeline: median imputation for numeric features, one-hot
/// encoding for categorical features. Vocabularies are fit on training rows
/// only; a category beyond the frequency cap maps to a trailing OTHER
/// indicator, and a category never seen in training maps to all zeros (or to
/// OTHER when the cap produced one).
struct Preprocessor {
  struct Vocabulary {
    std::vector<std::string> categories; // indicator column order
    bool has_other = false;
    std::size_t width() const { return categories.size() + (has_other ? 1 : 0); }
  };

  std::vector<double> medians;        // per numeric feature
  std::vector<Vocabulary> vocabs;     // per categorical feature

  std::size_t n_columns() const;
  DesignMatrix transform(const WindowSlice& rows) const;
};

/// Fits medians and vocabularies on the given rows. vocab_cap bounds the
/// number of named categories per feature (most frequent first, lexicographic
/// tie-break). Throws DataError when a numeric feature has no observed value.
Preprocessor fit_preprocessor(const WindowSlice& rows, int vocab_cap = 200);

struct TrainConfig {
  int epochs = 400;
  double learning_rate = 0.5;
  double l2 = 1e-4;
  std::uint64_t seed = 42;
  int vocab_cap = 200;
};

/// L2-regularized logistic regression fit by full-batch gradient descent on
/// the standardized design; stored weights are folded back to the raw scale.
struct LogisticModel {
  Preprocessor preprocessor;
  std::vector<double> weights;
  double bias = 0.0;
  TrainConfig config;

  std::vector<double> predict(const WindowSlice& rows) const;
};

/// Trains the built-in learner on the slice. Deterministic for a fixed seed
/// and data; training loss is non-increasing (the step size backtracks when
/// a step would increase it). Throws DataError on single-class labels.
LogisticModel train_builtin(const WindowSlice& rows, const TrainConfig& cfg = {});

/// Mean logistic loss with L2 penalty on the weights (bias unpenalized), and
/// its analytic gradient. Exposed for verification against finite differences.
double logistic_loss(const DesignMatrix& x, std::span<const int> y,
                     std::span<const double> weights, double bias, double l2);
void logistic_gradient(const DesignMatrix& x, std::span<const int> y,
                       std::span<const double> weights, double bias, double l2,
                       std::span<double> grad_weights, double& grad_bias);

/// Stored per-window probabilities produced by an external model, keyed by
/// window id and row-aligned with the window's chronological row order.
struct ExternalScores {
  std::map<long long, std::vector<double>> by_window;
};

/// Reads the external-score CSV (`window_id,row_index,probability`). Windows
/// must be contiguous and complete; probabilities outside [0,1] fail with the
/// offending line number.
ExternalScores load_external_scores(const std::string& path);

/// A deployable probability source: either a trained LogisticModel or an
/// ExternalScores table replayed window by window. Immutable and cheap to
/// copy; safe to share across threads.
class Scorer {
public:
  static Scorer builtin(LogisticModel model);
  static Scorer external(std::shared_ptr<const ExternalScores> table);

  /// Raw (uncalibrated) probabilities for one window of the dataset.
  std::vector<double> window_scores(const WindowedDataset& data, std::size_t window_index) const;

  bool is_external() const;

private:
  std::variant<std::shared_ptr<const LogisticModel>, std::shared_ptr<const ExternalScores>> impl_;
};

} // namespace relctl
