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

#ifndef GMPRUNE_FIXTURES_HPP_
#define GMPRUNE_FIXTURES_HPP_

#include <cstdint>

#include "gmprune/flops.hpp"
#include "gmprune/model_io.hpp"

namespace gmprune::fixtures {

// CIFAR ResNet-20: a 3->16 stem, three stages of three basic blocks at 16/32/64
// channels on 32x32/16x16/8x8 maps, and a 64->10 classifier. Stage-entry
// blocks join through a 1x1 projection conv, which is not prunable and
// neither is the classifier.
GraphSpec resnet20_cifar();

// The toy network as a sequential chain: conv1 -> conv2 -> fc (pooling is
// implicit, fc sees 1x1 maps). fc is not prunable.
GraphSpec toy_chain(int conv1_channels = 8, int conv2_channels = 8);

// Three layers (conv 3->8 k3, conv 8->16 k3, dense 16->4) of standard normal
// float-representable weights drawn from Lcg64(seed).
ModelBundle random_bundle(std::uint64_t seed);

// One layer "collinear" holding three 1-D filters 0, 1 and 2.
ModelBundle collinear_bundle();

// Every conv/dense node of resnet20_cifar() with random filter directions and
// log-uniform filter norms in [0.05, 1], except the last conv of the last
// stage ("s3.b3.conv_b"), whose filters all have unit norm.
ModelBundle resnet20_bundle(std::uint64_t seed);

}  // namespace gmprune::fixtures

#endif  // GMPRUNE_FIXTURES_HPP_
