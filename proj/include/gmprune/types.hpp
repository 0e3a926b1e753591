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

#ifndef GMPRUNE_TYPES_HPP_
#define GMPRUNE_TYPES_HPP_

#include <Eigen/Dense>

#include <vector>

namespace gmprune {

// One layer's filters, one filter per row. Row j is the flattened
// (in_channel, ky, kx) weight block that produces output channel j.
template <typename Scalar>
using FilterMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using FilterMatrixd = FilterMatrix<double>;
using FilterMatrixf = FilterMatrix<float>;

using Index = Eigen::Index;
using IndexList = std::vector<Index>;

}  // namespace gmprune

#endif  // GMPRUNE_TYPES_HPP_
