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

#include "gmprune/pruner.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

#include "gmprune/error.hpp"

namespace gmprune {

void validate_config(const PruneConfig& cfg) {
  if (!(cfg.rate >= 0.0 && cfg.rate < 1.0)) {
    throw std::invalid_argument("pruning rate must lie in [0, 1)");
  }
  if (cfg.interval < 1) throw std::invalid_argument("interval must be >= 1");
  if (!(cfg.mix_norm_fraction >= 0.0 && cfg.mix_norm_fraction <= 1.0)) {
    throw std::invalid_argument("mix_norm_fraction must lie in [0, 1]");
  }
  if (cfg.epoch_max < 0) throw std::invalid_argument("epoch_max must be >= 0");
}

const IndexList* MaskState::find(const std::string& layer) const {
  for (const auto& m : layers) {
    if (m.layer == layer) return &m.indices;
  }
  return nullptr;
}

bool operator==(const LayerMask& a, const LayerMask& b) {
  return a.layer == b.layer && a.indices == b.indices;
}

bool operator==(const MaskState& a, const MaskState& b) {
  return a.layers == b.layers && a.epoch == b.epoch;
}

std::size_t mask_churn(const MaskState& before, const MaskState& after) {
  static const IndexList kEmpty;
  std::set<std::string> names;
  for (const auto& m : before.layers) names.insert(m.layer);
  for (const auto& m : after.layers) names.insert(m.layer);
  std::size_t churn = 0;
  for (const auto& name : names) {
    const IndexList* a = before.find(name);
    const IndexList* b = after.find(name);
    IndexList diff;
    std::set_symmetric_difference(a ? a->begin() : kEmpty.begin(),
                                  a ? a->end() : kEmpty.end(),
                                  b ? b->begin() : kEmpty.begin(),
                                  b ? b->end() : kEmpty.end(),
                                  std::back_inserter(diff));
    churn += diff.size();
  }
  return churn;
}

SelectionResult select_filters(const FilterMatrixd& weights,
                               const PruneConfig& cfg) {
  const Index count = pruned_filter_count(weights.rows(), cfg.rate);
  constexpr auto kPolicy = ZeroFilterPolicy::kMaxDistance;
  switch (cfg.criterion) {
    case Criterion::kNormL1:
      return select_norm(weights, count, NormKind::kL1);
    case Criterion::kNormL2:
      return select_norm(weights, count, NormKind::kL2);
    case Criterion::kGM:
      return select_gm(weights, count, cfg.distance, kPolicy);
    case Criterion::kMix: {
      const Index norm_count = pruned_filter_count(
          weights.rows(), cfg.rate * cfg.mix_norm_fraction);
      return select_mix(weights, std::min(norm_count, count),
                        count - std::min(norm_count, count), cfg.mix_norm,
                        cfg.distance, kPolicy);
    }
  }
  throw std::logic_error("unhandled criterion");
}

void zeroize(FilterMatrixd& weights, const IndexList& rows) {
  for (Index r : rows) weights.row(r).setZero();
}

PruneStepResult prune_step(const ModelBundle& bundle, const PruneConfig& cfg,
                           int epoch) {
  validate_config(cfg);
  PruneStepResult result{bundle, MaskState{}};
  result.masks.epoch = epoch;
  for (std::size_t i = 0; i < bundle.layers.size(); ++i) {
    const std::string& name = bundle.layers[i].name;
    if (cfg.frozen_layers.count(name)) continue;
    LayerMask mask{name, {}};
    if (cfg.rate > 0.0) {
      mask.indices = select_filters(bundle.tensors[i], cfg).indices;
      zeroize(result.bundle.tensors[i], mask.indices);
    }
    result.masks.layers.push_back(std::move(mask));
  }
  return result;
}

ScheduleResult run_schedule(ModelBundle bundle, const PruneConfig& cfg,
                            const Trainer& trainer, const EpochHook& hook) {
  validate_config(cfg);
  ScheduleResult result{std::move(bundle), MaskState{}, {}};
  for (int epoch = 1; epoch <= cfg.epoch_max; ++epoch) {
    EpochRecord record;
    record.epoch = epoch;
    try {
      record.loss = trainer(result.bundle, epoch);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kTrainerFailure,
                  "epoch " + std::to_string(epoch) + ": " + e.what());
    }
    if (epoch % cfg.interval == 0) {
      PruneStepResult step = prune_step(result.bundle, cfg, epoch);
      record.pruned = true;
      record.churn = mask_churn(result.masks, step.masks);
      result.bundle = std::move(step.bundle);
      result.masks = std::move(step.masks);
    }
    for (const auto& m : result.masks.layers) {
      record.masked_filters += m.indices.size();
    }
    result.history.push_back(record);
    if (hook) hook(epoch, result.bundle, result.masks);
  }
  return result;
}

ModelBundle extract_compact(const ModelBundle& bundle, const MaskState& masks,
                            const GraphSpec& graph) {
  validate_graph(graph);
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const GraphNode& node = graph.nodes[i];
    const bool chained = i == 0 ? node.inputs.empty()
                                : node.inputs.size() == 1 &&
                                      node.inputs[0] == graph.nodes[i - 1].name;
    if (node.kind == NodeKind::kAdd || !chained) {
      throw Error(ErrorCode::kNonSequentialGraph,
                  "node '" + node.name + "' breaks the sequential chain");
    }
  }
  if (graph.nodes.size() != bundle.layers.size()) {
    throw Error(ErrorCode::kMaskShapeMismatch,
                "graph and bundle describe different layer counts");
  }

  std::vector<std::size_t> order;  // bundle layer index per graph node
  for (const auto& node : graph.nodes) {
    std::size_t li = 0;
    try {
      li = bundle.layer_index(node.name);
    } catch (const Error&) {
      throw Error(ErrorCode::kMaskShapeMismatch,
                  "graph node '" + node.name + "' has no bundle layer");
    }
    const LayerSpec& spec = bundle.layers[li];
    if (spec.out_channels != node.out_channels ||
        spec.in_channels != node.in_channels) {
      throw Error(ErrorCode::kMaskShapeMismatch,
                  "layer '" + node.name + "' disagrees with the graph");
    }
    order.push_back(li);
  }
  for (const auto& m : masks.layers) {
    const std::size_t li = [&] {
      try {
        return bundle.layer_index(m.layer);
      } catch (const Error&) {
        throw Error(ErrorCode::kMaskShapeMismatch,
                    "mask names unknown layer '" + m.layer + "'");
      }
    }();
    for (std::size_t k = 0; k < m.indices.size(); ++k) {
      const Index r = m.indices[k];
      if (r < 0 || r >= bundle.layers[li].out_channels ||
          (k > 0 && r <= m.indices[k - 1])) {
        throw Error(ErrorCode::kMaskShapeMismatch,
                    "mask for '" + m.layer + "' is not a sorted set of rows");
      }
    }
  }

  ModelBundle out;
  out.format_version = bundle.format_version;
  IndexList kept_inputs;  // surviving input channels of the current layer
  for (std::size_t step = 0; step < order.size(); ++step) {
    const LayerSpec& spec = bundle.layers[order[step]];
    const FilterMatrixd& w = bundle.tensors[order[step]];

    IndexList kept_rows;
    const IndexList* removed = masks.find(spec.name);
    for (Index r = 0; r < spec.out_channels; ++r) {
      if (!removed || !std::binary_search(removed->begin(), removed->end(), r)) {
        kept_rows.push_back(r);
      }
    }
    if (step == 0) {
      kept_inputs.resize(static_cast<std::size_t>(spec.in_channels));
      for (Index c = 0; c < spec.in_channels; ++c) kept_inputs[c] = c;
    }
    const Index k2 = spec.kernel * spec.kernel;
    IndexList kept_cols;
    for (Index c : kept_inputs) {
      for (Index t = 0; t < k2; ++t) kept_cols.push_back(c * k2 + t);
    }
    FilterMatrixd compact = w(kept_rows, kept_cols);
    out.add_layer(spec.name, spec.kind,
                  static_cast<std::int64_t>(kept_inputs.size()), spec.kernel,
                  std::move(compact));
    kept_inputs = std::move(kept_rows);
  }
  return out;
}

}  // namespace gmprune
