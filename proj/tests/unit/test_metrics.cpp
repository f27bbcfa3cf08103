#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relctl/error.hpp"
#include "relctl/metrics.hpp"
#include "relctl/rng.hpp"

#include "../support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace relctl;

TEST_CASE("roc_auc: perfect separation") {
  const std::vector<double> s{0.9, 0.8, 0.2, 0.1};
  const std::vector<int> y{1, 1, 0, 0};
  CHECK(roc_auc(s, y) == doctest::Approx(1.0));
}

TEST_CASE("roc_auc: all-tied scores give 0.5") {
  const std::vector<double> s{0.3, 0.3, 0.3, 0.3, 0.3};
  const std::vector<int> y{1, 0, 1, 0, 1};
  CHECK(roc_auc(s, y) == doctest::Approx(0.5));
}

TEST_CASE("roc_auc: four-point value from pair enumeration") {
  const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  const std::vector<int> y{0, 0, 1, 1};
  // pairs: (.35 vs .1) win, (.35 vs .4) loss, (.8 vs .1) win, (.8 vs .4) win
  CHECK(roc_auc(s, y) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(roc_auc(s, y) == doctest::Approx(oracles::auc_pair_enumeration(s, y)).epsilon(1e-12));
}

TEST_CASE("roc_auc: single-class labels are an explicit error") {
  const std::vector<double> s{0.1, 0.2};
  CHECK_THROWS_AS((void)roc_auc(s, std::vector<int>{1, 1}), DataError);
  CHECK_THROWS_AS((void)roc_auc(s, std::vector<int>{0, 0}), DataError);
  CHECK_THROWS_AS((void)roc_auc({}, {}), DataError);
}

TEST_CASE("roc_auc: matches pair enumeration on random instances with ties") {
  Rng rng(2024);
  for (int rep = 0; rep < 250; ++rep) {
    const std::size_t n = 2 + rng.index(98);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (auto& v : s) v = std::floor(rng.uniform01() * 20.0) / 20.0; // coarse grid forces ties
    bool has0 = false, has1 = false;
    for (auto& v : y) {
      v = rng.uniform01() < 0.4 ? 1 : 0;
      (v ? has1 : has0) = true;
    }
    if (!has0 || !has1) continue;
    CHECK(roc_auc(s, y) ==
          doctest::Approx(oracles::auc_pair_enumeration(s, y)).epsilon(1e-12));
  }
}

TEST_CASE("roc_auc: invariant under strictly increasing transforms") {
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng.index(60);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (auto& v : s) v = rng.normal();
    bool has0 = false, has1 = false;
    for (auto& v : y) {
      v = rng.uniform01() < 0.5 ? 1 : 0;
      (v ? has1 : has0) = true;
    }
    if (!has0 || !has1) continue;
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = std::exp(0.7 * s[i]) + 3.0; // strictly increasing
    CHECK(roc_auc(s, y) == doctest::Approx(roc_auc(t, y)).epsilon(1e-12));
  }
}

TEST_CASE("roc_auc: flipping labels complements the statistic for tie-free scores") {
  Rng rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 4 + rng.index(40);
    std::vector<double> s(n);
    std::vector<int> y(n), y_flipped(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<double>(i) + rng.uniform01() * 0.5;
    bool has0 = false, has1 = false;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.uniform01() < 0.5 ? 1 : 0;
      y_flipped[i] = 1 - y[i];
      (y[i] ? has1 : has0) = true;
    }
    if (!has0 || !has1) continue;
    CHECK(roc_auc(s, y) + roc_auc(s, y_flipped) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ece: calibrated constant probability") {
  const std::vector<double> p{0.5, 0.5, 0.5, 0.5};
  const std::vector<int> y{1, 0, 1, 0};
  CHECK(ece(p, y) == doctest::Approx(0.0));
}

TEST_CASE("ece: maximal miscalibration") {
  const std::vector<double> p{1.0, 1.0, 1.0};
  const std::vector<int> y{0, 0, 0};
  CHECK(ece(p, y) == doctest::Approx(1.0));
}

TEST_CASE("ece: two-bin hand evaluation") {
  // 15 bins: the 0.1s land in one bin (gap |0.5-0.1|=0.4, weight 1/2), the
  // 0.9s in another (gap |1.0-0.9|=0.1, weight 1/2) -> 0.25.
  const std::vector<double> p{0.1, 0.1, 0.9, 0.9};
  const std::vector<int> y{0, 1, 1, 1};
  CHECK(ece(p, y) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("ece: probability 1.0 lands in the top bin") {
  const std::vector<double> p{1.0, 1.0};
  const std::vector<int> y{1, 1};
  CHECK(ece(p, y) == doctest::Approx(0.0));
}

TEST_CASE("ece: zero when every bin's mean label equals its mean probability") {
  // bin [0.2, 0.2667): probs 0.25 with 1/4 positives; bin [0.7333, 0.8): 0.75
  // with 3/4 positives.
  const std::vector<double> p{0.25, 0.25, 0.25, 0.25, 0.75, 0.75, 0.75, 0.75};
  const std::vector<int> y{1, 0, 0, 0, 1, 1, 1, 0};
  CHECK(ece(p, y) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("ece: errors") {
  CHECK_THROWS_AS((void)ece({}, {}), DataError);
  CHECK_THROWS_AS((void)ece(std::vector<double>{0.5}, std::vector<int>{1}, 0), DataError);
  CHECK_THROWS_AS((void)ece(std::vector<double>{1.5}, std::vector<int>{1}), DataError);
}

TEST_CASE("brier: exact and constant-half cases") {
  CHECK(brier(std::vector<double>{0.0, 1.0}, std::vector<int>{0, 1}) == doctest::Approx(0.0));
  CHECK(brier(std::vector<double>{0.5, 0.5, 0.5}, std::vector<int>{0, 1, 0}) ==
        doctest::Approx(0.25));
  CHECK(brier(std::vector<double>{0.2, 0.7}, std::vector<int>{0, 1}) ==
        doctest::Approx(0.065).epsilon(1e-12));
  CHECK_THROWS_AS((void)brier({}, {}), DataError);
}

TEST_CASE("brier: constant probability decomposition") {
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const double p = rng.uniform01();
    const std::size_t n = 1 + rng.index(30);
    std::vector<double> probs(n, p);
    std::vector<int> y(n);
    double direct = 0.0;
    for (auto& v : y) {
      v = rng.uniform01() < 0.3 ? 1 : 0;
      direct += (p - v) * (p - v);
    }
    CHECK(brier(probs, y) == doctest::Approx(direct / static_cast<double>(n)).epsilon(1e-12));
  }
}

TEST_CASE("volatility_l1: constant trajectory is zero") {
  const std::vector<ReliabilityState> states(5, ReliabilityState{0.7, 0.05, 0.2});
  CHECK(volatility_l1(states) == doctest::Approx(0.0));
}

TEST_CASE("volatility_l1: two-window direct evaluation") {
  const std::vector<ReliabilityState> states{{0.6, 0.10, 0.0}, {0.7, 0.12, 0.0}};
  CHECK(volatility_l1(states) == doctest::Approx(0.12).epsilon(1e-12));
}

TEST_CASE("volatility_l1: reproduces the published rolling-retrain aggregate on a fixture") {
  // Nine-window fixture whose per-step moves are |dA|=0.020862, |dC|=0.01,
  // so the mean step is exactly the published 0.030862.
  std::vector<ReliabilityState> states;
  double a = 0.66, c = 0.03;
  states.push_back({a, c, 0.0});
  for (int k = 1; k < 9; ++k) {
    a += (k % 2 == 1 ? 0.020862 : -0.020862);
    c += (k % 2 == 1 ? -0.01 : 0.01);
    states.push_back({a, c, 0.0});
  }
  CHECK(volatility_l1(states) == doctest::Approx(0.030862).epsilon(1e-12));
}

TEST_CASE("volatility_l1: equals the independent component-loop oracle") {
  Rng rng(99);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t t = 2 + rng.index(15);
    std::vector<ReliabilityState> states(t);
    for (auto& s : states) s = {rng.uniform01(), rng.uniform01() * 0.3, rng.uniform01()};
    CHECK(volatility_l1(states) ==
          doctest::Approx(oracles::vl1_component_loop(states)).epsilon(1e-12));
  }
}

TEST_CASE("volatility_l1: fewer than two windows is an error") {
  CHECK_THROWS_AS((void)volatility_l1(std::vector<ReliabilityState>{{0.5, 0.1, 0.2}}), DataError);
}

TEST_CASE("downside_volatility: strictly improving trajectory is zero") {
  const std::vector<ReliabilityState> states{{0.60, 0.10, 0.0}, {0.65, 0.08, 0.0},
                                             {0.70, 0.05, 0.0}};
  CHECK(downside_volatility(states, DownsideMode::PerComponent) == doctest::Approx(0.0));
  CHECK(downside_volatility(states, DownsideMode::JointAuc) == doctest::Approx(0.0));
}

TEST_CASE("downside_volatility: degradation counted in both modes") {
  const std::vector<ReliabilityState> states{{0.7, 0.1, 0.0}, {0.6, 0.1, 0.0}};
  CHECK(downside_volatility(states, DownsideMode::PerComponent) == doctest::Approx(0.1));
  CHECK(downside_volatility(states, DownsideMode::JointAuc) == doctest::Approx(0.1));
}

TEST_CASE("downside_volatility: modes diverge when AUC improves but ECE worsens") {
  const std::vector<ReliabilityState> states{{0.6, 0.10, 0.0}, {0.7, 0.15, 0.0}};
  CHECK(downside_volatility(states, DownsideMode::PerComponent) ==
        doctest::Approx(0.05).epsilon(1e-12));
  CHECK(downside_volatility(states, DownsideMode::JointAuc) == doctest::Approx(0.0));
}

TEST_CASE("downside_volatility: never exceeds total volatility") {
  Rng rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t t = 2 + rng.index(12);
    std::vector<ReliabilityState> states(t);
    for (auto& s : states) s = {rng.uniform01(), rng.uniform01() * 0.4, 0.0};
    const double v = volatility_l1(states);
    CHECK(downside_volatility(states, DownsideMode::PerComponent) <= v + 1e-15);
    CHECK(downside_volatility(states, DownsideMode::JointAuc) <= v + 1e-15);
  }
}

TEST_CASE("downside_volatility: equality when every step degrades both components") {
  std::vector<ReliabilityState> states;
  double a = 0.9, c = 0.01;
  for (int k = 0; k < 6; ++k) {
    states.push_back({a, c, 0.0});
    a -= 0.03;
    c += 0.02;
  }
  CHECK(downside_volatility(states, DownsideMode::PerComponent) ==
        doctest::Approx(volatility_l1(states)).epsilon(1e-12));
  CHECK(downside_volatility(states, DownsideMode::JointAuc) ==
        doctest::Approx(volatility_l1(states)).epsilon(1e-12));
}

TEST_CASE("quantile_linear: interpolation convention") {
  std::vector<double> v{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09};
  // h = 0.8 * 8 = 6.4 -> 0.07 + 0.4 * 0.01
  CHECK(quantile_linear(v, 0.8) == doctest::Approx(0.074).epsilon(1e-12));
  CHECK(quantile_linear(std::vector<double>{3.0, 3.0, 3.0}, 0.8) == doctest::Approx(3.0));
  CHECK(quantile_linear(std::vector<double>{1.0, 2.0}, 0.0) == doctest::Approx(1.0));
  CHECK(quantile_linear(std::vector<double>{1.0, 2.0}, 1.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS((void)quantile_linear({}, 0.5), DataError);
}
