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

#include "gmprune/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gmprune {

std::string_view DistanceKindName(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::kL2: return "l2";
    case DistanceKind::kL1: return "l1";
    case DistanceKind::kCosine: return "cosine";
  }
  return "l2";
}

std::string_view NormKindName(NormKind kind) {
  return kind == NormKind::kL1 ? "l1" : "l2";
}

std::string_view CriterionName(Criterion criterion) {
  switch (criterion) {
    case Criterion::kNormL1: return "l1";
    case Criterion::kNormL2: return "l2";
    case Criterion::kGM: return "gm";
    case Criterion::kMix: return "mix";
  }
  return "gm";
}

std::optional<DistanceKind> ParseDistanceKind(std::string_view s) {
  if (s == "l2") return DistanceKind::kL2;
  if (s == "l1") return DistanceKind::kL1;
  if (s == "cosine") return DistanceKind::kCosine;
  return std::nullopt;
}

std::optional<NormKind> ParseNormKind(std::string_view s) {
  if (s == "l1") return NormKind::kL1;
  if (s == "l2") return NormKind::kL2;
  return std::nullopt;
}

NoConvergenceError::NoConvergenceError(GmPoint best, int max_iters)
    : Error(ErrorCode::kNoConvergence,
            "Weiszfeld iteration did not converge within " +
                std::to_string(max_iters) + " iterations"),
      best_(std::move(best)) {}

IndexList smallest_k(const Eigen::VectorXd& scores, Index count) {
  if (count < 0 || count > scores.size()) {
    throw Error(ErrorCode::kCountOutOfRange,
                "requested " + std::to_string(count) + " of " +
                    std::to_string(scores.size()) + " filters");
  }
  IndexList order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (scores[a] != scores[b]) return scores[a] < scores[b];
    return a < b;
  });
  order.resize(static_cast<std::size_t>(count));
  std::sort(order.begin(), order.end());
  return order;
}

namespace detail {
namespace {

bool is_zero_row(const FilterMatrixd& m, Index r) {
  return (m.row(r).array() == 0.0).all();
}

double pair_distance(const FilterMatrixd& m, Index i, Index j,
                     DistanceKind kind, const Eigen::VectorXd& norms) {
  switch (kind) {
    case DistanceKind::kL2: return (m.row(i) - m.row(j)).norm();
    case DistanceKind::kL1: return (m.row(i) - m.row(j)).cwiseAbs().sum();
    case DistanceKind::kCosine: {
      if (m.row(i) == m.row(j)) return 0.0;
      const double sim = m.row(i).dot(m.row(j)) / (norms[i] * norms[j]);
      return std::clamp(1.0 - sim, 0.0, 2.0);
    }
  }
  return 0.0;
}

void check_count(Index count, Index available) {
  if (count < 0 || count > available) {
    throw Error(ErrorCode::kCountOutOfRange,
                "requested " + std::to_string(count) + " of " +
                    std::to_string(available) + " filters");
  }
}

}  // namespace

Eigen::VectorXd filter_norm(const FilterMatrixd& m, NormKind p) {
  if (p == NormKind::kL1) return m.cwiseAbs().rowwise().sum();
  return m.rowwise().norm();
}

Eigen::MatrixXd distance_matrix(const FilterMatrixd& m, DistanceKind kind,
                                ZeroFilterPolicy policy) {
  const Index n = m.rows();
  Eigen::VectorXd norms;
  std::vector<bool> zero(static_cast<std::size_t>(n), false);
  if (kind == DistanceKind::kCosine) {
    norms = m.rowwise().norm();
    for (Index r = 0; r < n; ++r) {
      zero[r] = is_zero_row(m, r);
      if (zero[r] && policy == ZeroFilterPolicy::kThrow) {
        throw ZeroVectorCosineError(r);
      }
    }
  }
  // Upper triangle only, mirrored, so symmetry and the zero diagonal are exact.
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double v = (kind == DistanceKind::kCosine && (zero[i] || zero[j]))
                           ? 2.0
                           : pair_distance(m, i, j, kind, norms);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

Eigen::VectorXd distance_sum(const FilterMatrixd& m, DistanceKind kind,
                             SelfTerm self, ZeroFilterPolicy policy) {
  const Eigen::MatrixXd d = distance_matrix(m, kind, policy);
  const Index n = m.rows();
  Eigen::VectorXd g(n);
  // Sequential summation in column order keeps the result bit-stable.
  for (Index j = 0; j < n; ++j) {
    double acc = 0.0;
    for (Index k = 0; k < n; ++k) {
      if (k == j && self == SelfTerm::kExclude) continue;
      acc += d(j, k);
    }
    g[j] = acc;
  }
  return g;
}

SelectionResult select_gm(const FilterMatrixd& m, Index count,
                          DistanceKind kind, ZeroFilterPolicy policy) {
  check_count(count, m.rows());
  SelectionResult result;
  result.criterion = Criterion::kGM;
  result.distance = kind;
  result.scores = distance_sum(m, kind, SelfTerm::kInclude, policy);
  result.indices = smallest_k(result.scores, count);
  return result;
}

SelectionResult select_norm(const FilterMatrixd& m, Index count, NormKind p) {
  check_count(count, m.rows());
  SelectionResult result;
  result.criterion = p == NormKind::kL1 ? Criterion::kNormL1 : Criterion::kNormL2;
  result.scores = filter_norm(m, p);
  result.indices = smallest_k(result.scores, count);
  return result;
}

SelectionResult select_mix(const FilterMatrixd& m, Index norm_count,
                           Index gm_count, NormKind p, DistanceKind kind,
                           ZeroFilterPolicy policy) {
  if (norm_count < 0 || gm_count < 0) {
    throw Error(ErrorCode::kCountOutOfRange, "negative selection count");
  }
  check_count(norm_count + gm_count, m.rows());

  SelectionResult result = select_norm(m, norm_count, p);
  result.criterion = Criterion::kMix;
  result.distance = kind;
  if (gm_count == 0) return result;

  IndexList survivors;
  survivors.reserve(static_cast<std::size_t>(m.rows() - norm_count));
  for (Index r = 0, k = 0; r < m.rows(); ++r) {
    if (k < norm_count && result.indices[k] == r) {
      ++k;
    } else {
      survivors.push_back(r);
    }
  }
  const FilterMatrixd rest = m(survivors, Eigen::all);
  const Eigen::VectorXd g =
      distance_sum(rest, kind, SelfTerm::kInclude, policy);
  for (Index local : smallest_k(g, gm_count)) {
    result.indices.push_back(survivors[local]);
  }
  std::sort(result.indices.begin(), result.indices.end());
  return result;
}

double gm_objective(const FilterMatrixd& m, const Eigen::VectorXd& x) {
  double f = 0.0;
  for (Index i = 0; i < m.rows(); ++i) {
    f += (m.row(i).transpose() - x).norm();
  }
  return f;
}

namespace {

// Exact optimality test for a data point: row r minimises the sum of
// distances iff |sum over distinct rows of unit vectors from them to r| is at
// most the multiplicity of r.
bool data_point_is_optimal(const FilterMatrixd& m, Index r) {
  Eigen::VectorXd pull = Eigen::VectorXd::Zero(m.cols());
  double multiplicity = 0.0;
  for (Index i = 0; i < m.rows(); ++i) {
    const Eigen::VectorXd diff = (m.row(r) - m.row(i)).transpose();
    const double dist = diff.norm();
    if (dist == 0.0) {
      multiplicity += 1.0;
    } else {
      pull += diff / dist;
    }
  }
  return pull.norm() <= multiplicity;
}

Index nearest_row_l2(const FilterMatrixd& m, const Eigen::VectorXd& x,
                     double* dist_out) {
  Index best = 0;
  double best_dist = (m.row(0).transpose() - x).norm();
  for (Index i = 1; i < m.rows(); ++i) {
    const double dist = (m.row(i).transpose() - x).norm();
    if (dist < best_dist) {
      best = i;
      best_dist = dist;
    }
  }
  if (dist_out) *dist_out = best_dist;
  return best;
}

}  // namespace

GmPoint weiszfeld_gm(const FilterMatrixd& m, double tol, int max_iters) {
  if (m.rows() < 1) {
    throw Error(ErrorCode::kEmptyInput, "geometric median of zero rows");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("weiszfeld_gm: tolerance must be positive");
  }

  GmPoint point;
  point.coords = m.colwise().mean().transpose();
  point.objective = gm_objective(m, point.coords);
  point.trajectory.push_back(point.objective);

  auto accept = [&](Eigen::VectorXd x, double f) {
    point.coords = std::move(x);
    point.objective = f;
    point.trajectory.push_back(f);
  };

  for (int it = 1; it <= max_iters; ++it) {
    point.iterations = it;
    Eigen::VectorXd x = point.coords;

    double dist = 0.0;
    const Index nearest = nearest_row_l2(m, x, &dist);
    if (dist == 0.0) {
      if (data_point_is_optimal(m, nearest)) return point;
      x[0] += 1e-12 * (1.0 + x.norm());
    }

    Eigen::VectorXd numer = Eigen::VectorXd::Zero(m.cols());
    double denom = 0.0;
    for (Index i = 0; i < m.rows(); ++i) {
      const double di = (m.row(i).transpose() - x).norm();
      if (di == 0.0) continue;
      numer += m.row(i).transpose() / di;
      denom += 1.0 / di;
    }
    Eigen::VectorXd next = numer / denom;
    double f_next = gm_objective(m, next);

    // Snap to a data point once it satisfies the optimality condition.
    const Index candidate = nearest_row_l2(m, next, nullptr);
    if (data_point_is_optimal(m, candidate)) {
      const Eigen::VectorXd row = m.row(candidate).transpose();
      const double f_row = gm_objective(m, row);
      if (f_row <= point.objective) {
        accept(row, f_row);
        return point;
      }
    }

    if (f_next > point.objective) return point;  // rounding-level stall
    const double step = (next - point.coords).norm();
    accept(std::move(next), f_next);
    if (step <= tol) return point;
  }
  throw NoConvergenceError(std::move(point), max_iters);
}

Index nearest_to_point(const FilterMatrixd& m, const Eigen::VectorXd& x,
                       DistanceKind kind) {
  if (x.size() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "point has " + std::to_string(x.size()) +
                    " coordinates, filters have " + std::to_string(m.cols()));
  }
  if (m.rows() < 1) {
    throw Error(ErrorCode::kEmptyInput, "no filters to search");
  }
  double x_norm = x.norm();
  if (kind == DistanceKind::kCosine && x_norm == 0.0) {
    throw ZeroVectorCosineError(-1);
  }
  Index best = 0;
  double best_dist = 0.0;
  for (Index i = 0; i < m.rows(); ++i) {
    double dist = 0.0;
    switch (kind) {
      case DistanceKind::kL2:
        dist = (m.row(i).transpose() - x).norm();
        break;
      case DistanceKind::kL1:
        dist = (m.row(i).transpose() - x).cwiseAbs().sum();
        break;
      case DistanceKind::kCosine: {
        const double n = m.row(i).norm();
        if (n == 0.0) throw ZeroVectorCosineError(i);
        dist = std::clamp(1.0 - m.row(i).dot(x) / (n * x_norm), 0.0, 2.0);
        break;
      }
    }
    if (i == 0 || dist < best_dist) {
      best = i;
      best_dist = dist;
    }
  }
  return best;
}

}  // namespace detail
}  // namespace gmprune
