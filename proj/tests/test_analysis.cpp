/* Copyright 2026 The gmprune Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "gmprune/analysis.hpp"
#include "oracles.hpp"

using namespace gmprune;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Index grid_index_of(const KdeCurve& c, double x) {
  for (Index i = 0; i < c.grid.size(); ++i) {
    if (c.grid[i] == x) return i;
  }
  return -1;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("norm stats of (1, 2, 3)") {
  const auto s = norm_stats(vec({1, 2, 3}), "l");
  CHECK(s.layer == "l");
  CHECK(s.v1 == 1.0);
  CHECK(s.v2 == 3.0);
  CHECK(s.mean == 2.0);
  CHECK(s.std == 1.0);
  CHECK(s.span == 2.0);
}

TEST_CASE("norm stats of a single filter") {
  FilterMatrixd m(1, 4);
  m << 1, -1, 1, -1;
  const auto s = compute_norm_stats(m, NormKind::kL2);
  CHECK(s.norms.size() == 1);
  CHECK(s.v1 == 2.0);
  CHECK(s.std == 0.0);
  CHECK(s.span == 0.0);
}

TEST_CASE("norm stats match a two-pass reference") {
  std::mt19937_64 rng(200);
  const auto m = oracle::random_matrix(rng, 200, 27);
  for (bool l1 : {false, true}) {
    const auto norms = oracle::norms(oracle::to_rows(m), l1);
    double mean = 0;
    for (double x : norms) mean += x;
    mean /= static_cast<double>(norms.size());
    double ss = 0;
    for (double x : norms) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(norms.size() - 1));

    const auto s = compute_norm_stats(m, l1 ? NormKind::kL1 : NormKind::kL2);
    CHECK(s.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(s.std == doctest::Approx(sd).epsilon(1e-12));
    CHECK(s.v1 == doctest::Approx(*std::min_element(norms.begin(), norms.end())).epsilon(1e-14));
    CHECK(s.v2 == doctest::Approx(*std::max_element(norms.begin(), norms.end())).epsilon(1e-14));
    CHECK(s.v1 <= s.mean);
    CHECK(s.mean <= s.v2);
  }
}

TEST_CASE("norm stats ignore ordering") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd v(40);
    for (Index i = 0; i < v.size(); ++i) v[i] = u(rng);
    Eigen::VectorXd w = v;
    std::shuffle(w.data(), w.data() + w.size(), rng);
    const auto a = norm_stats(v);
    const auto b = norm_stats(w);
    CHECK(a.v1 == b.v1);
    CHECK(a.v2 == b.v2);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-13));
    CHECK(a.std == doctest::Approx(b.std).epsilon(1e-12));
  }
}

TEST_CASE("type-7 quantiles") {
  const auto v = vec({4, 1, 3, 2});
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  CHECK(quantile(v, 0.5) == 2.5);
  CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
  CHECK(quantile(vec({7}), 0.3) == 7.0);
}

TEST_CASE("Silverman bandwidth") {
  const auto v = vec({1, 2, 3, 4, 5});
  // std = sqrt(2.5), IQR = 2 so IQR/1.34 is the smaller spread.
  CHECK(silverman_bandwidth(v) ==
        doctest::Approx(0.9 * (2.0 / 1.34) * std::pow(5.0, -0.2)));
  CHECK(silverman_bandwidth(vec({2, 2, 2})) == doctest::Approx(3e-3));
  // Zero IQR but nonzero spread falls back to the standard deviation.
  const auto spiky = vec({0, 0, 0, 0, 0, 0, 0, 0, 10});
  const double sd = norm_stats(spiky).std;
  CHECK(silverman_bandwidth(spiky) ==
        doctest::Approx(0.9 * sd * std::pow(9.0, -0.2)));
}

TEST_CASE("single sample with unit bandwidth") {
  const auto c = kde_estimate(vec({0}), 601, 1.0);
  CHECK(c.bandwidth == 1.0);
  CHECK(c.grid[0] == -3.0);
  CHECK(c.grid[600] == 3.0);
  const Index mid = grid_index_of(c, 0.0);
  REQUIRE(mid >= 0);
  CHECK(std::abs(c.density[mid] - 1.0 / std::sqrt(2.0 * std::numbers::pi)) <= 1e-9);
  CHECK(gaussian_kde_at(vec({0}), 1.0, 0.0) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-15));
}

TEST_CASE("two symmetric samples give a symmetric density") {
  const auto c = kde_estimate(vec({-1, 1}), 401, 1.0);
  const Index n = c.grid.size();
  for (Index i = 0; i < n; ++i) {
    CHECK(std::abs(c.grid[i] + c.grid[n - 1 - i]) <= 1e-12);
    CHECK(std::abs(c.density[i] - c.density[n - 1 - i]) <= 1e-12);
  }
}

TEST_CASE("KDE of 500 samples integrates to about one") {
  std::mt19937_64 rng(500);
  std::lognormal_distribution<double> d(0.0, 0.5);
  Eigen::VectorXd v(500);
  for (Index i = 0; i < v.size(); ++i) v[i] = d(rng);
  const auto c = kde_estimate(v, 512);
  CHECK(c.bandwidth > 0.0);
  CHECK(c.density.minCoeff() >= 0.0);
  for (Index i = 1; i < c.grid.size(); ++i) REQUIRE(c.grid[i] > c.grid[i - 1]);
  const double area = trapezoid(c.grid, c.density);
  CHECK(area >= 0.98);
  CHECK(area <= 1.02);
}

TEST_CASE("KDE shifts with its samples") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Eigen::VectorXd v(60);
  for (Index i = 0; i < v.size(); ++i) v[i] = u(rng);
  const auto base = kde_estimate(v, 256);
  for (double shift : {0.5, 3.0, -0.05}) {
    const Eigen::VectorXd moved = v.array() + shift;
    const auto c = kde_estimate(moved, 256, base.bandwidth);
    for (Index i = 0; i < c.grid.size(); ++i) {
      REQUIRE(std::abs(c.grid[i] - (base.grid[i] + shift)) <= 1e-12);
      REQUIRE(std::abs(c.density[i] - base.density[i]) <= 1e-12);
    }
  }
}

TEST_CASE("KDE argument checks") {
  try {
    kde_estimate(Eigen::VectorXd(0), 10);
    FAIL("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyInput);
  }
  CHECK_THROWS_AS(kde_estimate(vec({1}), 1), std::invalid_argument);
  CHECK_THROWS_AS(kde_estimate(vec({1}), 10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(kde_estimate(vec({1}), 10, -1.0), std::invalid_argument);
}

TEST_CASE("requirement flags") {
  const auto equal = check_requirements(norm_stats(vec({0.9, 0.9, 0.9, 0.9})));
  CHECK(equal.small_deviation);
  CHECK(equal.large_minimum);
  CHECK(equal.deviation_ratio == 0.0);
  CHECK(equal.minimum_ratio == 1.0);

  const auto tiny = check_requirements(norm_stats(vec({1e-6, 1.0})));
  CHECK(tiny.minimum_ratio == doctest::Approx(1e-6));
  CHECK_FALSE(tiny.large_minimum);

  const auto zero = check_requirements(norm_stats(vec({0, 0})));
  CHECK(zero.deviation_ratio == 0.0);
  CHECK(zero.minimum_ratio == 0.0);
}

TEST_CASE("requirement flags are strict at the thresholds") {
  // std 1, mean 4, min/max 0.6 are all exact in binary.
  const auto s = norm_stats(vec({3, 4, 5}));
  REQUIRE(s.std == 1.0);
  const auto at = check_requirements(s, 0.25, 0.6);
  CHECK(at.deviation_ratio == 0.25);
  CHECK(at.minimum_ratio == 0.6);
  CHECK_FALSE(at.small_deviation);
  CHECK_FALSE(at.large_minimum);
  const auto past = check_requirements(s, 0.26, 0.59);
  CHECK(past.small_deviation);
  CHECK(past.large_minimum);

  const auto edge = check_requirements(norm_stats(vec({0.3, 1.0})));
  CHECK(edge.minimum_ratio == 0.3);
  CHECK_FALSE(edge.large_minimum);
}

}  // TEST_SUITE
