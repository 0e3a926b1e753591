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

#ifndef GMPRUNE_JSON_IO_HPP_
#define GMPRUNE_JSON_IO_HPP_

#include <filesystem>
#include <string>

#include "gmprune/analysis.hpp"
#include "gmprune/criteria.hpp"
#include "gmprune/flops.hpp"
#include "gmprune/pruner.hpp"
#include "gmprune/toytrain.hpp"
#include "json.hpp"

namespace gmprune {

using Json = nlohmann::ordered_json;

// {layer, criterion, distance, indices[], scores[]}; distance is null for
// the pure norm criteria.
Json to_json(const SelectionResult& r, const std::string& layer);

// {epoch, layers: [{layer, indices[]}]}
Json to_json(const MaskState& masks);
// Accepts a MaskState object or any object holding one under "masks".
// Throws ManifestParse.
MaskState mask_state_from_json(const Json& j);

Json to_json(const std::vector<EpochRecord>& history);
Json to_json(const FlopsReport& report);
Json to_json(const NormStats& stats);
Json to_json(const RequirementReport& report);
Json to_json(const TrainReport& report);

// {nodes: [{name, kind, out_channels, in_channels, kernel, out_h, out_w,
//           inputs[], prunable}]}
Json to_json(const GraphSpec& graph);
// Throws GraphValidation on schema or topology errors.
GraphSpec graph_from_json(const Json& j);

// Throw IoFailure / ManifestParse / GraphValidation.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const Json& j, const std::filesystem::path& path);
GraphSpec load_graph(const std::filesystem::path& path);

}  // namespace gmprune

#endif  // GMPRUNE_JSON_IO_HPP_
