#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace relctl {

/// Reserved category for missing categorical values, assigned at load time.
inline constexpr const char* kMissingCategory = "__MISSING__";

struct DatasetSchema {
  std::vector<std::string> numeric_features;
  std::vector<std::string> categorical_features;
  std::string label_column = "label";
  std::string time_column = "window"; // date or integer window column in CSV form
};

/// One chronological cohort. Feature storage is columnar; numeric missing
/// values are NaN, categorical missing values hold kMissingCategory.
struct Window {
  long long id = 0; // calendar year or integer index
  std::vector<std::vector<double>> numeric;          // [feature][row]
  std::vector<std::vector<std::string>> categorical; // [feature][row]
  std::vector<int> labels;                           // 0/1

  std::size_t rows() const { return labels.size(); }
};

/// Chronologically ordered windows with the first `n_history` preceding the
/// deployment horizon. Evaluation windows are indexed 1..n_eval() in protocol
/// order throughout the library.
struct WindowedDataset {
  DatasetSchema schema;
  std::vector<Window> windows;
  std::size_t n_history = 0;

  std::size_t n_eval() const { return windows.size() - n_history; }
  /// Global index of evaluation window t (1-based).
  std::size_t eval_global_index(std::size_t t) const { return n_history + t - 1; }
  const Window& eval_window(std::size_t t) const { return windows[eval_global_index(t)]; }

  /// Checks ordering, uniqueness, binary labels and non-empty windows.
  void validate() const;
};

/// A contiguous run of windows viewed as one sample (reference periods,
/// training slices). Non-owning.
struct WindowSlice {
  const DatasetSchema* schema = nullptr;
  std::vector<const Window*> windows;

  std::size_t rows() const;
  std::vector<int> concat_labels() const;
};

WindowSlice slice_of(const WindowedDataset& data, std::size_t first, std::size_t count);
WindowSlice slice_single(const WindowedDataset& data, std::size_t index);

/// Reference period for evaluation window t (1-based): the min(w, available)
/// windows immediately preceding it, history included. Throws DataError when
/// nothing precedes t.
WindowSlice partition_reference(const WindowedDataset& data, std::size_t t, int w = 3);

/// Seeded generator of drifting binary-outcome data. Windows are indexed
/// 1..n_history+n_windows; the first n_history form the pre-horizon period.
///
/// Numeric features are unit-variance Gaussians whose means move by
/// mean_shift[g] in window g. One categorical feature has base probabilities
/// tilted toward the first category by cat_tilt[g]. Labels follow a logistic
/// model whose coefficients are all offset by coef_shift[g], so nonzero
/// entries produce genuine concept drift. The intercept is calibrated so the
/// unshifted positive rate matches base_rate.
struct SyntheticConfig {
  int n_history = 3;
  int n_windows = 9; // evaluation windows
  int rows_per_window = 2000;
  int n_numeric = 3;
  int n_categories = 6;
  double base_rate = 0.2;
  std::vector<double> mean_shift; // length n_history+n_windows, or empty for zeros
  std::vector<double> cat_tilt;   // same
  std::vector<double> coef_shift; // same
  std::uint64_t seed = 42;

  int total_windows() const { return n_history + n_windows; }
  void validate() const;
};

WindowedDataset generate_synthetic(const SyntheticConfig& cfg);

/// Reads a SyntheticConfig from a JSON file with the struct's field names.
SyntheticConfig load_synthetic_config(const std::string& path);

/// Loads a CSV with a sidecar schema JSON mapping each column to one of
/// "numeric", "categorical", "label", "date", "window" or "ignore".
///
/// With a "date" column (ISO-8601) windows are calendar years and `cutoff`
/// is a date: rows strictly before it form the pre-horizon history. A year
/// straddling the cutoff is a config error. With a "window" column (integer
/// ids) `cutoff` is an integer and ids below it are history.
WindowedDataset load_csv(const std::string& csv_path, const std::string& schema_path,
                         const std::string& cutoff);

/// Writes the dataset back to CSV (integer window column) plus, via
/// save_schema, a sidecar that load_csv round-trips exactly.
void save_csv(const WindowedDataset& data, const std::string& csv_path);
void save_schema(const WindowedDataset& data, const std::string& schema_path);

} // namespace relctl
