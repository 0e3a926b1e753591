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

#ifndef GMPRUNE_FLOPS_HPP_
#define GMPRUNE_FLOPS_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace gmprune {

enum class NodeKind { kConv2d, kDense, kAdd };

std::string_view NodeKindName(NodeKind kind);

struct GraphNode {
  std::string name;
  NodeKind kind = NodeKind::kConv2d;
  std::int64_t out_channels = 0;
  std::int64_t in_channels = 0;
  std::int64_t kernel = 1;
  std::int64_t out_h = 1;
  std::int64_t out_w = 1;
  std::vector<std::string> inputs;
  bool prunable = false;
};

// Topologically ordered network description.
struct GraphSpec {
  std::vector<GraphNode> nodes;

  // Throws GraphValidation.
  std::size_t index_of(const std::string& name) const;
};

// Checks topological order, arity (add: 2 inputs of equal width; conv/dense:
// at most 1), producer/consumer channel agreement and positive sizes.
// Throws GraphValidation.
void validate_graph(const GraphSpec& graph);

// Number of filters removed from a layer of `channels` filters at `rate`:
// floor(channels * rate). Shared by the pruning schedule so that accounting
// and actual masks agree.
std::int64_t pruned_filter_count(std::int64_t channels, double rate);

// Per-node pruning rate, indexed like GraphSpec::nodes. Non-prunable nodes
// are pinned at zero.
struct PruneRates {
  std::vector<double> rates;

  static PruneRates uniform(const GraphSpec& graph, double rate);
};

// kFloor counts whole filters (floor(N * P) pruned), which matches the shapes
// of an extracted compact model. kFractional keeps N * (1 - P) channels as a
// real number, the idealised (1 - P_i)(1 - P_{i+1}) accounting.
enum class ChannelRounding { kFloor, kFractional };

struct NodeFlops {
  std::string name;
  double baseline_macs = 0.0;
  double pruned_macs = 0.0;
  double kept_out = 0.0;  // effective output channels after pruning
  double kept_in = 0.0;   // effective input channels after pruning
};

struct FlopsReport {
  std::vector<NodeFlops> nodes;
  double baseline_total = 0.0;
  double pruned_total = 0.0;
  double reduction_percent = 0.0;
};

// 1 MAC counted as 1 FLOP; conv: out * in * k^2 * out_h * out_w, dense:
// out * in, add: 0.
FlopsReport flops_baseline(const GraphSpec& graph);

// Conv/dense nodes keep out - floor(out * P) outputs. A node's effective
// input width is the kept width of its producing conv/dense node; inputs
// coming from an add node (a shortcut join) carry full width.
FlopsReport flops_pruned(const GraphSpec& graph, const PruneRates& rates,
                         ChannelRounding rounding = ChannelRounding::kFloor);

}  // namespace gmprune

#endif  // GMPRUNE_FLOPS_HPP_
