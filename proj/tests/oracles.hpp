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

// Reference implementations used only by tests. They are written with plain
// loops over std::vector and share no code with the library paths they check.

#ifndef GMPRUNE_TESTS_ORACLES_HPP_
#define GMPRUNE_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "gmprune/types.hpp"

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline Rows to_rows(const gmprune::FilterMatrixd& m) {
  Rows rows(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) rows[r].push_back(m(r, c));
  }
  return rows;
}

enum class Metric { kL2, kL1, kCosine };

inline double dist(const std::vector<double>& a, const std::vector<double>& b,
                   Metric metric) {
  if (metric == Metric::kCosine) {
    if (a == b) return 0.0;
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      dot += a[i] * b[i];
      na += a[i] * a[i];
      nb += b[i] * b[i];
    }
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
  }
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += metric == Metric::kL2 ? d * d : std::abs(d);
  }
  return metric == Metric::kL2 ? std::sqrt(acc) : acc;
}

// O(n^2 d) distance sums over every other row.
inline std::vector<double> distance_sums(const Rows& rows, Metric metric) {
  std::vector<double> g(rows.size(), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (i != j) g[i] += dist(rows[i], rows[j], metric);
    }
  }
  return g;
}

inline std::vector<double> norms(const Rows& rows, bool l1) {
  std::vector<double> out;
  for (const auto& r : rows) {
    double acc = 0;
    for (double v : r) acc += l1 ? std::abs(v) : v * v;
    out.push_back(l1 ? acc : std::sqrt(acc));
  }
  return out;
}

// Sort (score, index) pairs; take `count`; return ascending indices.
inline std::vector<Eigen::Index> smallest(const std::vector<double>& scores,
                                          std::size_t count) {
  std::vector<std::pair<double, Eigen::Index>> pairs;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    pairs.emplace_back(scores[i], static_cast<Eigen::Index>(i));
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(pairs[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

// Norm selection, then GM over the survivors.
inline std::vector<Eigen::Index> mix(const Rows& rows, std::size_t norm_count,
                                     std::size_t gm_count, bool l1,
                                     Metric metric) {
  std::vector<Eigen::Index> picked = smallest(norms(rows, l1), norm_count);
  Rows rest;
  std::vector<Eigen::Index> map;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!std::binary_search(picked.begin(), picked.end(),
                            static_cast<Eigen::Index>(i))) {
      rest.push_back(rows[i]);
      map.push_back(static_cast<Eigen::Index>(i));
    }
  }
  for (Eigen::Index local : smallest(distance_sums(rest, metric), gm_count)) {
    picked.push_back(map[local]);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

inline gmprune::FilterMatrixd random_matrix(std::mt19937_64& rng,
                                            Eigen::Index rows,
                                            Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  gmprune::FilterMatrixd m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = normal(rng);
  return m;
}

// Direct 3x3 zero-padded convolution over an 8x8 map. in[c][y][x].
using Volume = std::vector<std::vector<std::vector<double>>>;

inline Volume conv3x3(const Volume& in, const gmprune::FilterMatrixd& w) {
  const std::size_t cin = in.size();
  Volume out(static_cast<std::size_t>(w.rows()),
             std::vector<std::vector<double>>(8, std::vector<double>(8, 0.0)));
  for (Eigen::Index o = 0; o < w.rows(); ++o) {
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        double acc = 0;
        for (std::size_t c = 0; c < cin; ++c) {
          for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
              const int sy = y + ky - 1, sx = x + kx - 1;
              if (sy < 0 || sy >= 8 || sx < 0 || sx >= 8) continue;
              acc += w(o, static_cast<Eigen::Index>(c * 9 + ky * 3 + kx)) *
                     in[c][sy][sx];
            }
          }
        }
        out[o][y][x] = acc;
      }
    }
  }
  return out;
}

inline void relu(Volume& v) {
  for (auto& plane : v)
    for (auto& row : plane)
      for (double& x : row) x = std::max(0.0, x);
}

}  // namespace oracle

#endif  // GMPRUNE_TESTS_ORACLES_HPP_
