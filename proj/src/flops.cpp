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

#include "gmprune/flops.hpp"

#include <cmath>
#include <set>
#include <string_view>

#include "gmprune/error.hpp"

namespace gmprune {
namespace {

[[noreturn]] void fail(const std::string& message) {
  throw Error(ErrorCode::kGraphValidation, message);
}

double node_macs(const GraphNode& node, double in, double out) {
  switch (node.kind) {
    case NodeKind::kConv2d:
      return out * in * static_cast<double>(node.kernel * node.kernel) *
             static_cast<double>(node.out_h * node.out_w);
    case NodeKind::kDense:
      return out * in;
    case NodeKind::kAdd:
      return 0.0;
  }
  return 0.0;
}

}  // namespace

std::string_view NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kConv2d: return "conv2d";
    case NodeKind::kDense: return "dense";
    case NodeKind::kAdd: return "add";
  }
  return "conv2d";
}

std::size_t GraphSpec::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].name == name) return i;
  }
  fail("unknown node '" + name + "'");
}

void validate_graph(const GraphSpec& graph) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const GraphNode& node = graph.nodes[i];
    const std::string where = "node '" + node.name + "'";
    if (node.name.empty()) fail("node " + std::to_string(i) + " has no name");
    if (node.out_channels <= 0 || node.in_channels <= 0 || node.kernel <= 0 ||
        node.out_h <= 0 || node.out_w <= 0) {
      fail(where + ": sizes must be positive");
    }
    for (const auto& input : node.inputs) {
      if (!seen.count(input)) {
        fail(where + ": input '" + input + "' is not an earlier node");
      }
    }
    if (node.kind == NodeKind::kAdd) {
      if (node.inputs.size() != 2) fail(where + ": add needs exactly 2 inputs");
      if (node.prunable) fail(where + ": add nodes cannot be prunable");
      for (const auto& input : node.inputs) {
        if (graph.nodes[graph.index_of(input)].out_channels != node.out_channels) {
          fail(where + ": add inputs must match its out_channels");
        }
      }
    } else {
      if (node.inputs.size() > 1) fail(where + ": expects at most one input");
      if (node.kind == NodeKind::kDense && node.kernel != 1) {
        fail(where + ": dense nodes must have kernel 1");
      }
      if (node.inputs.size() == 1 &&
          graph.nodes[graph.index_of(node.inputs[0])].out_channels !=
              node.in_channels) {
        fail(where + ": in_channels disagrees with producer '" +
             node.inputs[0] + "'");
      }
    }
    if (!seen.insert(node.name).second) fail("duplicate " + where);
  }
}

std::int64_t pruned_filter_count(std::int64_t channels, double rate) {
  // The guard absorbs products such as 100 * 0.29 = 28.999999999999996.
  return static_cast<std::int64_t>(
      std::floor(static_cast<double>(channels) * rate + 1e-9));
}

PruneRates PruneRates::uniform(const GraphSpec& graph, double rate) {
  PruneRates r;
  r.rates.reserve(graph.nodes.size());
  for (const auto& node : graph.nodes) {
    r.rates.push_back(node.prunable ? rate : 0.0);
  }
  return r;
}

FlopsReport flops_baseline(const GraphSpec& graph) {
  return flops_pruned(graph, PruneRates{std::vector<double>(graph.nodes.size(), 0.0)});
}

FlopsReport flops_pruned(const GraphSpec& graph, const PruneRates& rates,
                         ChannelRounding rounding) {
  validate_graph(graph);
  if (rates.rates.size() != graph.nodes.size()) {
    fail("rate vector has " + std::to_string(rates.rates.size()) +
         " entries for " + std::to_string(graph.nodes.size()) + " nodes");
  }

  FlopsReport report;
  std::vector<double> kept(graph.nodes.size(), 0.0);
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const GraphNode& node = graph.nodes[i];
    const double rate = rates.rates[i];
    if (!(rate >= 0.0 && rate < 1.0)) {
      fail("node '" + node.name + "': rate must lie in [0, 1)");
    }
    if (!node.prunable && rate != 0.0) {
      fail("node '" + node.name + "' is not prunable but has a nonzero rate");
    }

    NodeFlops nf;
    nf.name = node.name;
    const auto full_out = static_cast<double>(node.out_channels);
    if (node.kind == NodeKind::kAdd) {
      nf.kept_out = full_out;
      nf.kept_in = full_out;
    } else {
      nf.kept_out =
          rounding == ChannelRounding::kFloor
              ? static_cast<double>(node.out_channels -
                                    pruned_filter_count(node.out_channels, rate))
              : full_out * (1.0 - rate);
      nf.kept_in = static_cast<double>(node.in_channels);
      if (!node.inputs.empty()) {
        const std::size_t src = graph.index_of(node.inputs[0]);
        if (graph.nodes[src].kind != NodeKind::kAdd) nf.kept_in = kept[src];
      }
    }
    kept[i] = nf.kept_out;
    nf.baseline_macs = node_macs(node, static_cast<double>(node.in_channels), full_out);
    nf.pruned_macs = node_macs(node, nf.kept_in, nf.kept_out);
    report.baseline_total += nf.baseline_macs;
    report.pruned_total += nf.pruned_macs;
    report.nodes.push_back(std::move(nf));
  }
  report.reduction_percent =
      report.baseline_total > 0.0
          ? 100.0 * (1.0 - report.pruned_total / report.baseline_total)
          : 0.0;
  return report;
}

}  // namespace gmprune
