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

#include "gmprune/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gmprune/error.hpp"

namespace gmprune {

NormStats norm_stats(const Eigen::VectorXd& norms, std::string layer) {
  if (norms.size() == 0) {
    throw Error(ErrorCode::kEmptyInput, "no norms for layer '" + layer + "'");
  }
  NormStats s;
  s.layer = std::move(layer);
  s.norms = norms;
  s.v1 = norms.minCoeff();
  s.v2 = norms.maxCoeff();
  s.mean = norms.mean();
  const Index n = norms.size();
  if (n > 1) {
    s.std = std::sqrt((norms.array() - s.mean).square().sum() /
                      static_cast<double>(n - 1));
  }
  // The mean of equal values can round one ulp outside [v1, v2].
  s.mean = std::clamp(s.mean, s.v1, s.v2);
  s.span = s.v2 - s.v1;
  return s;
}

double quantile(const Eigen::VectorXd& values, double q) {
  if (values.size() == 0) {
    throw Error(ErrorCode::kEmptyInput, "quantile of an empty vector");
  }
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double silverman_bandwidth(const Eigen::VectorXd& samples) {
  const NormStats s = norm_stats(samples);
  const double iqr_scale = (quantile(samples, 0.75) - quantile(samples, 0.25)) / 1.34;
  double spread = 0.0;
  if (s.std > 0.0 && iqr_scale > 0.0) {
    spread = std::min(s.std, iqr_scale);
  } else {
    spread = std::max(s.std, iqr_scale);
  }
  if (spread <= 0.0) return 1e-3 * (1.0 + std::abs(s.mean));
  return 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

double gaussian_kde_at(const Eigen::VectorXd& samples, double bandwidth,
                       double x) {
  const double norm = 1.0 / (static_cast<double>(samples.size()) * bandwidth *
                             std::sqrt(2.0 * std::numbers::pi));
  double acc = 0.0;
  for (Index i = 0; i < samples.size(); ++i) {
    const double u = (x - samples[i]) / bandwidth;
    acc += std::exp(-0.5 * u * u);
  }
  return acc * norm;
}

KdeCurve kde_estimate(const Eigen::VectorXd& samples, int grid_points,
                      std::optional<double> bandwidth) {
  if (samples.size() == 0) {
    throw Error(ErrorCode::kEmptyInput, "KDE of an empty sample");
  }
  if (grid_points < 2) {
    throw std::invalid_argument("kde_estimate: grid_points must be >= 2");
  }
  if (bandwidth && !(*bandwidth > 0.0)) {
    throw std::invalid_argument("kde_estimate: bandwidth must be positive");
  }
  KdeCurve curve;
  curve.bandwidth = bandwidth ? *bandwidth : silverman_bandwidth(samples);
  const double lo = samples.minCoeff() - 3.0 * curve.bandwidth;
  const double hi = samples.maxCoeff() + 3.0 * curve.bandwidth;
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  curve.grid.resize(grid_points);
  curve.density.resize(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    curve.grid[i] = lo + step * static_cast<double>(i);
    curve.density[i] = gaussian_kde_at(samples, curve.bandwidth, curve.grid[i]);
  }
  return curve;
}

double trapezoid(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  double acc = 0.0;
  for (Index i = 1; i < x.size(); ++i) {
    acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  }
  return acc;
}

RequirementReport check_requirements(const NormStats& stats,
                                     double deviation_threshold,
                                     double minimum_threshold) {
  RequirementReport r;
  r.layer = stats.layer;
  if (stats.mean != 0.0 && stats.v2 != 0.0) {
    r.deviation_ratio = stats.std / stats.mean;
    r.minimum_ratio = stats.v1 / stats.v2;
  }
  r.small_deviation = r.deviation_ratio < deviation_threshold;
  r.large_minimum = r.minimum_ratio > minimum_threshold;
  return r;
}

}  // namespace gmprune
