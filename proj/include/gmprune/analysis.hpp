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

#ifndef GMPRUNE_ANALYSIS_HPP_
#define GMPRUNE_ANALYSIS_HPP_

#include <optional>
#include <string>

#include "gmprune/criteria.hpp"
#include "gmprune/types.hpp"

namespace gmprune {

inline constexpr double kDefaultDeviationThreshold = 0.25;
inline constexpr double kDefaultMinimumThreshold = 0.3;

struct NormStats {
  std::string layer;
  Eigen::VectorXd norms;
  double v1 = 0.0;  // minimum norm
  double v2 = 0.0;  // maximum norm
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1), 0 when n == 1
  double span = 0.0;
};

struct KdeCurve {
  Eigen::VectorXd grid;
  Eigen::VectorXd density;
  double bandwidth = 0.0;
};

// Whether a layer meets the two preconditions under which the
// smaller-norm-less-important criterion is reliable.
struct RequirementReport {
  std::string layer;
  bool small_deviation = false;
  bool large_minimum = false;
  double deviation_ratio = 0.0;  // std / mean
  double minimum_ratio = 0.0;    // v1 / v2
};

NormStats norm_stats(const Eigen::VectorXd& norms, std::string layer = {});

template <typename Derived>
NormStats compute_norm_stats(const Eigen::MatrixBase<Derived>& filters,
                             NormKind p, std::string layer = {}) {
  return norm_stats(filter_norm(filters, p), std::move(layer));
}

// Linear-interpolation ("type 7") quantile, q in [0, 1].
double quantile(const Eigen::VectorXd& values, double q);

// Silverman's rule of thumb, 0.9 * min(std, IQR / 1.34) * n^(-1/5). A zero
// spread measure is skipped; if both are zero the bandwidth falls back to
// 1e-3 * (1 + |mean|).
double silverman_bandwidth(const Eigen::VectorXd& samples);

double gaussian_kde_at(const Eigen::VectorXd& samples, double bandwidth,
                       double x);

// Gaussian KDE sampled on grid_points equally spaced points covering
// [min - 3h, max + 3h]. Throws EmptyInput.
KdeCurve kde_estimate(const Eigen::VectorXd& samples, int grid_points,
                      std::optional<double> bandwidth = std::nullopt);

double trapezoid(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Flags use strict inequalities: small_deviation iff std/mean < deviation
// threshold, large_minimum iff v1/v2 > minimum threshold. A zero mean or
// zero maximum makes both ratios 0.
RequirementReport check_requirements(
    const NormStats& stats,
    double deviation_threshold = kDefaultDeviationThreshold,
    double minimum_threshold = kDefaultMinimumThreshold);

}  // namespace gmprune

#endif  // GMPRUNE_ANALYSIS_HPP_
