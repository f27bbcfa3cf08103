#pragma once

#include "relctl/dataset.hpp"

#include <string>
#include <vector>

namespace fixtures {

// Builds a one-window dataset from columns; ids start at 1.
inline relctl::WindowedDataset single_window(
    std::vector<std::string> numeric_names,
    std::vector<std::vector<double>> numeric_cols,
    std::vector<std::string> categorical_names,
    std::vector<std::vector<std::string>> categorical_cols, std::vector<int> labels) {
  relctl::WindowedDataset d;
  d.schema.numeric_features = std::move(numeric_names);
  d.schema.categorical_features = std::move(categorical_names);
  d.n_history = 0;
  relctl::Window w;
  w.id = 1;
  w.numeric = std::move(numeric_cols);
  w.categorical = std::move(categorical_cols);
  w.labels = std::move(labels);
  d.windows.push_back(std::move(w));
  return d;
}

inline relctl::WindowSlice whole(const relctl::WindowedDataset& d) {
  relctl::WindowSlice s;
  s.schema = &d.schema;
  for (const auto& w : d.windows) s.windows.push_back(&w);
  return s;
}

} // namespace fixtures
