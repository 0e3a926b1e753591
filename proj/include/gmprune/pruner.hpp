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

#ifndef GMPRUNE_PRUNER_HPP_
#define GMPRUNE_PRUNER_HPP_

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "gmprune/criteria.hpp"
#include "gmprune/flops.hpp"
#include "gmprune/model_io.hpp"

namespace gmprune {

struct PruneConfig {
  double rate = 0.0;  // uniform over every prunable layer, in [0, 1)
  int interval = 1;   // prune after every `interval`-th epoch
  Criterion criterion = Criterion::kGM;
  DistanceKind distance = DistanceKind::kL2;
  // Mix sends floor(N * rate * mix_norm_fraction) filters through the norm
  // criterion and the rest of floor(N * rate) through GM. 0.75 reproduces a
  // 30% + 10% split of a 40% rate.
  double mix_norm_fraction = 0.75;
  NormKind mix_norm = NormKind::kL2;
  int epoch_max = 1;
  std::set<std::string> frozen_layers;  // never pruned
};

// Throws std::invalid_argument.
void validate_config(const PruneConfig& cfg);

struct LayerMask {
  std::string layer;
  IndexList indices;  // ascending
};

// The currently zeroized filters of every prunable layer.
struct MaskState {
  std::vector<LayerMask> layers;
  int epoch = 0;  // epoch of the last update, 0 before any pruning

  const IndexList* find(const std::string& layer) const;
};

bool operator==(const LayerMask& a, const LayerMask& b);
bool operator==(const MaskState& a, const MaskState& b);

// Sum over layers of the symmetric difference between two mask states.
std::size_t mask_churn(const MaskState& before, const MaskState& after);

// Applies cfg.criterion to one layer's current weights. The cosine metric
// treats all-zero filters as maximally distant rather than failing.
SelectionResult select_filters(const FilterMatrixd& weights,
                               const PruneConfig& cfg);

void zeroize(FilterMatrixd& weights, const IndexList& rows);

struct PruneStepResult {
  ModelBundle bundle;
  MaskState masks;
};

// Fresh selection on every prunable layer followed by zeroization. Earlier
// masks are not consulted, so a filter that training has revived can leave
// the pruned set.
PruneStepResult prune_step(const ModelBundle& bundle, const PruneConfig& cfg,
                           int epoch = 0);

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  bool pruned = false;
  std::size_t churn = 0;
  std::size_t masked_filters = 0;
};

// Trains the bundle in place for one epoch and returns a loss.
using Trainer = std::function<double(ModelBundle&, int epoch)>;
// Called at the end of every epoch, after any pruning step.
using EpochHook =
    std::function<void(int epoch, const ModelBundle&, const MaskState&)>;

struct ScheduleResult {
  ModelBundle bundle;
  MaskState masks;
  std::vector<EpochRecord> history;
};

// For epoch = 1..epoch_max: train, then prune when epoch % interval == 0.
// Trainer exceptions are rethrown as TrainerFailure naming the epoch.
ScheduleResult run_schedule(ModelBundle bundle, const PruneConfig& cfg,
                            const Trainer& trainer, const EpochHook& hook = {});

// Removes masked filters and the matching input channels of the next layer.
// Only pure chains are accepted: no add nodes, each node fed by its
// predecessor. Throws NonSequentialGraph or MaskShapeMismatch.
ModelBundle extract_compact(const ModelBundle& bundle, const MaskState& masks,
                            const GraphSpec& graph);

}  // namespace gmprune

#endif  // GMPRUNE_PRUNER_HPP_
