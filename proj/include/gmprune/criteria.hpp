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

#ifndef GMPRUNE_CRITERIA_HPP_
#define GMPRUNE_CRITERIA_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gmprune/error.hpp"
#include "gmprune/types.hpp"

namespace gmprune {

enum class DistanceKind { kL2, kL1, kCosine };
enum class NormKind { kL1, kL2 };
enum class Criterion { kNormL1, kNormL2, kGM, kMix };

// How the cosine metric treats an all-zero filter. Standalone queries throw;
// the pruning schedule places such a filter at the maximal distance 2.0 from
// every other filter, since zeroized filters are its own output.
enum class ZeroFilterPolicy { kThrow, kMaxDistance };

// Whether the distance sum includes the j' == j term. The self-distance is
// exactly zero in every metric, so both settings give bitwise equal sums.
enum class SelfTerm { kInclude, kExclude };

std::string_view DistanceKindName(DistanceKind kind);
std::string_view NormKindName(NormKind kind);
std::string_view CriterionName(Criterion criterion);
std::optional<DistanceKind> ParseDistanceKind(std::string_view s);
std::optional<NormKind> ParseNormKind(std::string_view s);

struct SelectionResult {
  IndexList indices;  // ascending
  // One score per row, always for the named criterion: distance sums g for
  // GM, norms for NormL1/NormL2 and for Mix (its only full-population stage).
  Eigen::VectorXd scores;
  Criterion criterion = Criterion::kGM;
  std::optional<DistanceKind> distance;
};

struct GmPoint {
  Eigen::VectorXd coords;
  int iterations = 0;
  double objective = 0.0;          // sum of Euclidean distances to all rows
  std::vector<double> trajectory;  // objective per accepted iterate
};

class NoConvergenceError : public Error {
 public:
  NoConvergenceError(GmPoint best, int max_iters);
  const GmPoint& best() const noexcept { return best_; }

 private:
  GmPoint best_;
};

namespace detail {

Eigen::VectorXd filter_norm(const FilterMatrixd& m, NormKind p);
Eigen::MatrixXd distance_matrix(const FilterMatrixd& m, DistanceKind kind,
                                ZeroFilterPolicy policy);
Eigen::VectorXd distance_sum(const FilterMatrixd& m, DistanceKind kind,
                             SelfTerm self, ZeroFilterPolicy policy);
SelectionResult select_gm(const FilterMatrixd& m, Index count,
                          DistanceKind kind, ZeroFilterPolicy policy);
SelectionResult select_norm(const FilterMatrixd& m, Index count, NormKind p);
SelectionResult select_mix(const FilterMatrixd& m, Index norm_count,
                           Index gm_count, NormKind p, DistanceKind kind,
                           ZeroFilterPolicy policy);
GmPoint weiszfeld_gm(const FilterMatrixd& m, double tol, int max_iters);
Index nearest_to_point(const FilterMatrixd& m, const Eigen::VectorXd& x,
                       DistanceKind kind);
double gm_objective(const FilterMatrixd& m, const Eigen::VectorXd& x);

}  // namespace detail

// Indices of the `count` smallest scores, ordered by (score, index) so the
// lowest index wins ties, returned ascending. Throws CountOutOfRange.
IndexList smallest_k(const Eigen::VectorXd& scores, Index count);

// All criterion math runs in double precision regardless of the input scalar.

template <typename Derived>
Eigen::VectorXd filter_norm(const Eigen::MatrixBase<Derived>& m, NormKind p) {
  return detail::filter_norm(m.template cast<double>(), p);
}

template <typename Derived>
Eigen::MatrixXd distance_matrix(
    const Eigen::MatrixBase<Derived>& m, DistanceKind kind,
    ZeroFilterPolicy policy = ZeroFilterPolicy::kThrow) {
  return detail::distance_matrix(m.template cast<double>(), kind, policy);
}

// g[j] = sum over j' of D[j][j'].
template <typename Derived>
Eigen::VectorXd distance_sum(
    const Eigen::MatrixBase<Derived>& m, DistanceKind kind,
    SelfTerm self = SelfTerm::kInclude,
    ZeroFilterPolicy policy = ZeroFilterPolicy::kThrow) {
  return detail::distance_sum(m.template cast<double>(), kind, self, policy);
}

template <typename Derived>
SelectionResult select_gm(const Eigen::MatrixBase<Derived>& m, Index count,
                          DistanceKind kind,
                          ZeroFilterPolicy policy = ZeroFilterPolicy::kThrow) {
  return detail::select_gm(m.template cast<double>(), count, kind, policy);
}

template <typename Derived>
SelectionResult select_norm(const Eigen::MatrixBase<Derived>& m, Index count,
                            NormKind p) {
  return detail::select_norm(m.template cast<double>(), count, p);
}

// Norm selection over all rows first, then GM selection among the survivors
// with g recomputed over the survivors only.
template <typename Derived>
SelectionResult select_mix(const Eigen::MatrixBase<Derived>& m,
                           Index norm_count, Index gm_count, NormKind p,
                           DistanceKind kind,
                           ZeroFilterPolicy policy = ZeroFilterPolicy::kThrow) {
  return detail::select_mix(m.template cast<double>(), norm_count, gm_count, p,
                            kind, policy);
}

// Weiszfeld iteration for the continuous geometric median of the rows,
// started from the centroid. Data points are tested against the exact
// optimality condition, so a median that coincides with a row is returned
// exactly. An iterate that lands on a non-optimal row is shifted by
// 1e-12 * (1 + |x|) along the first coordinate. Throws NoConvergence with
// the best iterate when max_iters is exhausted.
template <typename Derived>
GmPoint weiszfeld_gm(const Eigen::MatrixBase<Derived>& m, double tol = 1e-10,
                     int max_iters = 10000) {
  return detail::weiszfeld_gm(m.template cast<double>(), tol, max_iters);
}

// Row closest to x; ties go to the lowest index.
template <typename Derived, typename VecDerived>
Index nearest_to_point(const Eigen::MatrixBase<Derived>& m,
                       const Eigen::MatrixBase<VecDerived>& x,
                       DistanceKind kind) {
  return detail::nearest_to_point(m.template cast<double>(),
                                  x.template cast<double>(), kind);
}

template <typename Derived, typename VecDerived>
double gm_objective(const Eigen::MatrixBase<Derived>& m,
                    const Eigen::MatrixBase<VecDerived>& x) {
  return detail::gm_objective(m.template cast<double>(),
                              x.template cast<double>());
}

}  // namespace gmprune

#endif  // GMPRUNE_CRITERIA_HPP_
