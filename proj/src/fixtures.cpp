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

#include "gmprune/fixtures.hpp"

#include <cmath>
#include <string>

#include "gmprune/toytrain.hpp"

namespace gmprune::fixtures {
namespace {

GraphNode conv(std::string name, std::int64_t in, std::int64_t out,
               std::int64_t kernel, std::int64_t hw, std::string input,
               bool prunable) {
  GraphNode n;
  n.name = std::move(name);
  n.kind = NodeKind::kConv2d;
  n.in_channels = in;
  n.out_channels = out;
  n.kernel = kernel;
  n.out_h = hw;
  n.out_w = hw;
  if (!input.empty()) n.inputs.push_back(std::move(input));
  n.prunable = prunable;
  return n;
}

FilterMatrixd random_filters(Lcg64& rng, Index rows, Index cols) {
  FilterMatrixd w(rows, cols);
  for (Index k = 0; k < w.size(); ++k) {
    w.data()[k] = static_cast<float>(rng.normal());
  }
  return w;
}

}  // namespace

GraphSpec resnet20_cifar() {
  GraphSpec g;
  g.nodes.push_back(conv("conv_stem", 3, 16, 3, 32, "", true));
  std::string prev = "conv_stem";
  std::int64_t channels = 16;
  const std::int64_t widths[] = {16, 32, 64};
  const std::int64_t sides[] = {32, 16, 8};
  for (int s = 0; s < 3; ++s) {
    for (int b = 0; b < 3; ++b) {
      const std::string block =
          "s" + std::to_string(s + 1) + ".b" + std::to_string(b + 1);
      const std::int64_t out = widths[s];
      const std::int64_t hw = sides[s];
      g.nodes.push_back(conv(block + ".conv_a", channels, out, 3, hw, prev, true));
      g.nodes.push_back(conv(block + ".conv_b", out, out, 3, hw, block + ".conv_a", true));
      std::string shortcut = prev;
      if (channels != out) {
        shortcut = block + ".shortcut";
        g.nodes.push_back(conv(shortcut, channels, out, 1, hw, prev, false));
      }
      GraphNode add;
      add.name = block + ".add";
      add.kind = NodeKind::kAdd;
      add.in_channels = out;
      add.out_channels = out;
      add.out_h = hw;
      add.out_w = hw;
      add.inputs = {block + ".conv_b", shortcut};
      g.nodes.push_back(std::move(add));
      prev = block + ".add";
      channels = out;
    }
  }
  GraphNode fc;
  fc.name = "fc";
  fc.kind = NodeKind::kDense;
  fc.in_channels = 64;
  fc.out_channels = 10;
  fc.inputs = {prev};
  g.nodes.push_back(std::move(fc));
  return g;
}

GraphSpec toy_chain(int conv1_channels, int conv2_channels) {
  GraphSpec g;
  g.nodes.push_back(conv("conv1", kImageChannels, conv1_channels, kToyKernel,
                         kImageSide, "", true));
  g.nodes.push_back(conv("conv2", conv1_channels, conv2_channels, kToyKernel,
                         kImageSide, "conv1", true));
  GraphNode fc;
  fc.name = "fc";
  fc.kind = NodeKind::kDense;
  fc.in_channels = conv2_channels;
  fc.out_channels = kNumClasses;
  fc.inputs = {"conv2"};
  g.nodes.push_back(std::move(fc));
  return g;
}

ModelBundle random_bundle(std::uint64_t seed) {
  Lcg64 rng(seed);
  ModelBundle b;
  b.add_layer("conv1", LayerKind::kConv2d, 3, 3, random_filters(rng, 8, 27));
  b.add_layer("conv2", LayerKind::kConv2d, 8, 3, random_filters(rng, 16, 72));
  b.add_layer("fc", LayerKind::kDense, 16, 1, random_filters(rng, 4, 16));
  return b;
}

ModelBundle collinear_bundle() {
  ModelBundle b;
  FilterMatrixd w(3, 1);
  w << 0.0, 1.0, 2.0;
  b.add_layer("collinear", LayerKind::kConv2d, 1, 1, w);
  return b;
}

ModelBundle resnet20_bundle(std::uint64_t seed) {
  Lcg64 rng(seed);
  ModelBundle b;
  for (const auto& node : resnet20_cifar().nodes) {
    if (node.kind == NodeKind::kAdd) continue;
    const Index cols = node.in_channels * node.kernel * node.kernel;
    FilterMatrixd w = random_filters(rng, node.out_channels, cols);
    const bool uniform = node.name == "s3.b3.conv_b";
    for (Index r = 0; r < w.rows(); ++r) {
      const double target =
          uniform ? 1.0 : std::exp(std::log(0.05) * (1.0 - rng.uniform()));
      w.row(r) *= target / w.row(r).norm();
      for (Index c = 0; c < cols; ++c) w(r, c) = static_cast<float>(w(r, c));
    }
    b.add_layer(node.name,
                node.kind == NodeKind::kDense ? LayerKind::kDense
                                              : LayerKind::kConv2d,
                node.in_channels, node.kernel, std::move(w));
  }
  return b;
}

}  // namespace gmprune::fixtures
