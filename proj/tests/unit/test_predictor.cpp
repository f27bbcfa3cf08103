#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relctl/error.hpp"
#include "relctl/metrics.hpp"
#include "relctl/predictor.hpp"
#include "relctl/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "../support/fixtures.hpp"

using namespace relctl;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/relctl_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

} // namespace

TEST_CASE("fit_preprocessor: median imputation from training rows only") {
  auto d = fixtures::single_window({"x"}, {{1.0, 3.0, kNan}}, {}, {}, {0, 1, 0});
  const auto pre = fit_preprocessor(fixtures::whole(d));
  REQUIRE(pre.medians.size() == 1);
  CHECK(pre.medians[0] == doctest::Approx(2.0));
  const auto m = pre.transform(fixtures::whole(d));
  CHECK(m.at(2, 0) == doctest::Approx(2.0)); // missing entry imputed
  CHECK(m.at(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("fit_preprocessor: one-hot with unseen category mapping to zeros") {
  auto train = fixtures::single_window({}, {}, {"c"}, {{"a", "b", "a"}}, {0, 1, 0});
  const auto pre = fit_preprocessor(fixtures::whole(train));
  REQUIRE(pre.vocabs.size() == 1);
  CHECK(pre.vocabs[0].categories.size() == 2);
  CHECK_FALSE(pre.vocabs[0].has_other);
  CHECK(pre.n_columns() == 2);

  auto test = fixtures::single_window({}, {}, {"c"}, {{"c"}}, {0});
  const auto m = pre.transform(fixtures::whole(test));
  CHECK(m.at(0, 0) == doctest::Approx(0.0));
  CHECK(m.at(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("fit_preprocessor: all-numeric schema has no indicator columns") {
  auto d = fixtures::single_window({"x", "y"}, {{1.0, 2.0}, {3.0, 4.0}}, {}, {}, {0, 1});
  const auto pre = fit_preprocessor(fixtures::whole(d));
  CHECK(pre.n_columns() == 2);
  CHECK(pre.vocabs.empty());
}

TEST_CASE("fit_preprocessor: capped vocabulary adds an OTHER column") {
  std::vector<std::string> cats;
  for (int i = 0; i < 30; ++i)
    for (int rep = 0; rep < 30 - i; ++rep) cats.push_back("cat" + std::to_string(i));
  auto d = fixtures::single_window({}, {}, {"c"},
                                   {cats}, std::vector<int>(cats.size(), 0));
  d.windows[0].labels[0] = 1;
  const auto pre = fit_preprocessor(fixtures::whole(d), 10);
  REQUIRE(pre.vocabs.size() == 1);
  CHECK(pre.vocabs[0].categories.size() == 10);
  CHECK(pre.vocabs[0].has_other);
  CHECK(pre.n_columns() == 11);
  CHECK(pre.vocabs[0].categories[0] == "cat0"); // most frequent first

  // A capped-out category sets only the OTHER indicator.
  auto probe = fixtures::single_window({}, {}, {"c"}, {{"cat29"}}, {0});
  const auto m = pre.transform(fixtures::whole(probe));
  for (std::size_t c = 0; c < 10; ++c) CHECK(m.at(0, c) == doctest::Approx(0.0));
  CHECK(m.at(0, 10) == doctest::Approx(1.0));
}

TEST_CASE("fit_preprocessor: feature with no observed value names itself") {
  auto d = fixtures::single_window({"bad"}, {{kNan, kNan}}, {}, {}, {0, 1});
  CHECK_THROWS_WITH_AS((void)fit_preprocessor(fixtures::whole(d)),
                       doctest::Contains("bad"), DataError);
}

TEST_CASE("fit_preprocessor: transform is idempotent in effect") {
  auto d = fixtures::single_window({"x"}, {{1.0, kNan, 5.0}}, {"c"}, {{"a", "b", "a"}},
                                   {0, 1, 1});
  const auto pre = fit_preprocessor(fixtures::whole(d));
  const auto m1 = pre.transform(fixtures::whole(d));
  const auto m2 = pre.transform(fixtures::whole(d));
  CHECK(m1.values == m2.values);
}

TEST_CASE("train_builtin: zero epochs scores 0.5 everywhere") {
  auto d = fixtures::single_window({"x"}, {{-1.0, 1.0, 2.0}}, {}, {}, {0, 1, 1});
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto model = train_builtin(fixtures::whole(d), cfg);
  for (double p : model.predict(fixtures::whole(d))) CHECK(p == doctest::Approx(0.5));
}

TEST_CASE("train_builtin: deterministic for fixed seed and data") {
  auto d = fixtures::single_window({"x", "y"},
                                   {{-1.0, 0.4, 1.0, 2.0, -0.3}, {0.0, 1.0, -1.0, 0.5, 0.2}},
                                   {"c"}, {{"a", "b", "a", "b", "a"}}, {0, 1, 1, 1, 0});
  const auto m1 = train_builtin(fixtures::whole(d));
  const auto m2 = train_builtin(fixtures::whole(d));
  CHECK(m1.weights == m2.weights); // bitwise
  CHECK(m1.bias == m2.bias);
}

TEST_CASE("train_builtin: separable data reaches training AUC 1") {
  std::vector<double> x0, x1;
  std::vector<int> y;
  Rng rng(3);
  for (int i = 0; i < 60; ++i) {
    const bool pos = i % 2 == 0;
    x0.push_back((pos ? 2.0 : -2.0) + rng.normal() * 0.1);
    x1.push_back((pos ? 1.0 : -1.0) + rng.normal() * 0.1);
    y.push_back(pos ? 1 : 0);
  }
  auto d = fixtures::single_window({"x0", "x1"}, {x0, x1}, {}, {}, y);
  const auto model = train_builtin(fixtures::whole(d));
  CHECK(roc_auc(model.predict(fixtures::whole(d)), y) == doctest::Approx(1.0));
}

TEST_CASE("train_builtin: increasing a positively weighted feature raises the probability") {
  std::vector<double> x;
  std::vector<int> y;
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const double v = rng.normal();
    x.push_back(v);
    y.push_back(rng.uniform01() < 1.0 / (1.0 + std::exp(-2.0 * v)) ? 1 : 0);
  }
  auto d = fixtures::single_window({"x"}, {x}, {}, {}, y);
  const auto model = train_builtin(fixtures::whole(d));
  REQUIRE(model.weights.size() == 1);
  CHECK(model.weights[0] > 0.0);

  auto lo = fixtures::single_window({"x"}, {{0.0}}, {}, {}, {0});
  auto hi = fixtures::single_window({"x"}, {{1.0}}, {}, {}, {0});
  CHECK(model.predict(fixtures::whole(hi))[0] > model.predict(fixtures::whole(lo))[0]);
}

TEST_CASE("train_builtin: single-class labels are an error") {
  auto d = fixtures::single_window({"x"}, {{1.0, 2.0}}, {}, {}, {1, 1});
  CHECK_THROWS_AS((void)train_builtin(fixtures::whole(d)), DataError);
}

TEST_CASE("train_builtin: training loss is non-increasing over epochs") {
  Rng rng(21);
  std::vector<double> x0, x1;
  std::vector<int> y;
  for (int i = 0; i < 80; ++i) {
    x0.push_back(rng.normal() * 3.0);
    x1.push_back(rng.normal());
    y.push_back(rng.uniform01() < 0.4 ? 1 : 0);
  }
  y[0] = 1;
  y[1] = 0;
  auto d = fixtures::single_window({"x0", "x1"}, {x0, x1}, {}, {}, y);

  double prev_loss = std::numeric_limits<double>::infinity();
  for (int epochs : {0, 5, 20, 80, 200}) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    const auto model = train_builtin(fixtures::whole(d), cfg);
    const auto design = model.preprocessor.transform(fixtures::whole(d));
    const double loss = logistic_loss(design, y, model.weights, model.bias, 0.0);
    CHECK(loss <= prev_loss + 1e-9);
    prev_loss = loss;
  }
}

TEST_CASE("logistic_gradient: matches central finite differences") {
  Rng rng(314);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 5 + rng.index(20);
    const std::size_t k = 1 + rng.index(4);
    DesignMatrix x;
    x.n_rows = n;
    x.n_cols = k;
    x.values.resize(n * k);
    for (auto& v : x.values) v = rng.normal();
    std::vector<int> y(n);
    for (auto& v : y) v = rng.uniform01() < 0.5 ? 1 : 0;
    std::vector<double> w(k);
    for (auto& v : w) v = rng.normal() * 0.5;
    const double b = rng.normal() * 0.5;
    const double l2 = 0.01;

    std::vector<double> grad(k);
    double gb = 0.0;
    logistic_gradient(x, y, w, b, l2, grad, gb);

    const double eps = 1e-6;
    for (std::size_t c = 0; c < k; ++c) {
      auto w_hi = w, w_lo = w;
      w_hi[c] += eps;
      w_lo[c] -= eps;
      const double fd = (logistic_loss(x, y, w_hi, b, l2) - logistic_loss(x, y, w_lo, b, l2)) /
                        (2.0 * eps);
      CHECK(std::fabs(grad[c] - fd) / std::max(1e-8, std::fabs(fd)) < 1e-5);
    }
    const double fd_b =
        (logistic_loss(x, y, w, b + eps, l2) - logistic_loss(x, y, w, b - eps, l2)) / (2.0 * eps);
    CHECK(std::fabs(gb - fd_b) / std::max(1e-8, std::fabs(fd_b)) < 1e-5);
  }
}

TEST_CASE("external scores: round-trip and window lookup") {
  const std::string path = write_temp("scores_ok.csv",
                                      "window_id,row_index,probability\n"
                                      "1,0,0.25\n1,1,0.75\n2,0,0.5\n2,1,0.125\n");
  const auto table = load_external_scores(path);
  REQUIRE(table.by_window.size() == 2);
  CHECK(table.by_window.at(1) == std::vector<double>{0.25, 0.75});

  WindowedDataset d;
  d.schema.numeric_features = {"x"};
  d.n_history = 1;
  for (int i = 0; i < 2; ++i) {
    Window w;
    w.id = i + 1;
    w.numeric = {{0.0, 1.0}};
    w.labels = {0, 1};
    d.windows.push_back(std::move(w));
  }
  const auto scorer = Scorer::external(std::make_shared<const ExternalScores>(table));
  CHECK(scorer.window_scores(d, 0) == std::vector<double>{0.25, 0.75});
  CHECK(scorer.window_scores(d, 1) == std::vector<double>{0.5, 0.125});
  std::remove(path.c_str());
}

TEST_CASE("external scores: probability out of range cites the line") {
  const std::string path = write_temp("scores_range.csv",
                                      "window_id,row_index,probability\n"
                                      "1,0,0.5\n1,1,0.5\n1,2,0.5\n1,3,0.5\n1,4,0.5\n1,5,1.2\n");
  CHECK_THROWS_WITH_AS((void)load_external_scores(path), doctest::Contains("line 7"), DataError);
  std::remove(path.c_str());
}

TEST_CASE("external scores: structural errors") {
  const std::string empty = write_temp("scores_empty.csv", "window_id,row_index,probability\n");
  CHECK_THROWS_AS((void)load_external_scores(empty), DataError);
  std::remove(empty.c_str());

  const std::string gap = write_temp("scores_gap.csv",
                                     "window_id,row_index,probability\n1,0,0.5\n3,0,0.5\n");
  CHECK_THROWS_WITH_AS((void)load_external_scores(gap), doctest::Contains("contiguous"),
                       DataError);
  std::remove(gap.c_str());

  const std::string sparse = write_temp("scores_sparse.csv",
                                        "window_id,row_index,probability\n1,0,0.5\n1,2,0.5\n");
  CHECK_THROWS_AS((void)load_external_scores(sparse), DataError);
  std::remove(sparse.c_str());
}

TEST_CASE("external scores: missing window at scoring time identifies the window") {
  const std::string path = write_temp("scores_missing.csv",
                                      "window_id,row_index,probability\n1,0,0.5\n1,1,0.25\n");
  const auto table = load_external_scores(path);
  WindowedDataset d;
  d.schema.numeric_features = {"x"};
  d.n_history = 1;
  for (int i = 0; i < 2; ++i) {
    Window w;
    w.id = i + 1;
    w.numeric = {{0.0, 1.0}};
    w.labels = {0, 1};
    d.windows.push_back(std::move(w));
  }
  const auto scorer = Scorer::external(std::make_shared<const ExternalScores>(table));
  CHECK_THROWS_WITH_AS((void)scorer.window_scores(d, 1), doctest::Contains("window 2"),
                       DataError);
  std::remove(path.c_str());
}

TEST_CASE("scorer outputs always lie in [0,1]") {
  Rng rng(67);
  std::vector<double> x;
  std::vector<int> y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(rng.normal() * 100.0);
    y.push_back(rng.uniform01() < 0.5 ? 1 : 0);
  }
  y[0] = 0;
  y[1] = 1;
  auto d = fixtures::single_window({"x"}, {x}, {}, {}, y);
  const auto model = train_builtin(fixtures::whole(d));
  auto probe = fixtures::single_window({"x"}, {{-1e9, 1e9, 0.0}}, {}, {}, {0, 1, 0});
  for (double p : model.predict(fixtures::whole(probe))) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}
