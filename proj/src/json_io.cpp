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

#include "gmprune/json_io.hpp"

#include <fstream>

#include "gmprune/error.hpp"

namespace gmprune {
namespace {

Json to_array(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

NodeKind parse_node_kind(const std::string& s) {
  if (s == "conv2d") return NodeKind::kConv2d;
  if (s == "dense") return NodeKind::kDense;
  if (s == "add") return NodeKind::kAdd;
  throw Error(ErrorCode::kGraphValidation, "unknown node kind '" + s + "'");
}

}  // namespace

Json to_json(const SelectionResult& r, const std::string& layer) {
  Json j;
  j["layer"] = layer;
  j["criterion"] = std::string(CriterionName(r.criterion));
  j["distance"] = r.distance ? Json(std::string(DistanceKindName(*r.distance)))
                             : Json(nullptr);
  j["indices"] = r.indices;
  j["scores"] = to_array(r.scores);
  return j;
}

Json to_json(const MaskState& masks) {
  Json j;
  j["epoch"] = masks.epoch;
  j["layers"] = Json::array();
  for (const auto& m : masks.layers) {
    Json l;
    l["layer"] = m.layer;
    l["indices"] = m.indices;
    j["layers"].push_back(std::move(l));
  }
  return j;
}

MaskState mask_state_from_json(const Json& j) {
  const Json& src = (j.is_object() && j.contains("masks")) ? j.at("masks") : j;
  MaskState masks;
  try {
    masks.epoch = src.value("epoch", 0);
    for (const auto& l : src.at("layers")) {
      LayerMask m;
      m.layer = l.at("layer").get<std::string>();
      m.indices = l.at("indices").get<IndexList>();
      masks.layers.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kManifestParse,
                std::string("malformed mask state: ") + e.what());
  }
  return masks;
}

Json to_json(const std::vector<EpochRecord>& history) {
  Json a = Json::array();
  for (const auto& r : history) {
    Json j;
    j["epoch"] = r.epoch;
    j["loss"] = r.loss;
    j["pruned"] = r.pruned;
    j["churn"] = r.churn;
    j["masked_filters"] = r.masked_filters;
    a.push_back(std::move(j));
  }
  return a;
}

Json to_json(const FlopsReport& report) {
  Json j;
  j["nodes"] = Json::array();
  for (const auto& n : report.nodes) {
    Json node;
    node["name"] = n.name;
    node["baseline_macs"] = n.baseline_macs;
    node["pruned_macs"] = n.pruned_macs;
    node["kept_in"] = n.kept_in;
    node["kept_out"] = n.kept_out;
    j["nodes"].push_back(std::move(node));
  }
  j["baseline_total"] = report.baseline_total;
  j["pruned_total"] = report.pruned_total;
  j["reduction_percent"] = report.reduction_percent;
  return j;
}

Json to_json(const NormStats& stats) {
  Json j;
  j["layer"] = stats.layer;
  j["count"] = stats.norms.size();
  j["v1"] = stats.v1;
  j["v2"] = stats.v2;
  j["mean"] = stats.mean;
  j["std"] = stats.std;
  j["span"] = stats.span;
  return j;
}

Json to_json(const RequirementReport& report) {
  Json j;
  j["layer"] = report.layer;
  j["small_deviation"] = report.small_deviation;
  j["large_minimum"] = report.large_minimum;
  j["deviation_ratio"] = report.deviation_ratio;
  j["minimum_ratio"] = report.minimum_ratio;
  return j;
}

Json to_json(const TrainReport& report) {
  Json a = Json::array();
  for (const auto& e : report.epochs) {
    Json j;
    j["epoch"] = e.epoch;
    j["loss"] = e.loss;
    j["train_accuracy"] = e.train_accuracy;
    j["eval_accuracy"] = e.eval_accuracy;
    a.push_back(std::move(j));
  }
  return a;
}

Json to_json(const GraphSpec& graph) {
  Json j;
  j["nodes"] = Json::array();
  for (const auto& n : graph.nodes) {
    Json node;
    node["name"] = n.name;
    node["kind"] = std::string(NodeKindName(n.kind));
    node["out_channels"] = n.out_channels;
    node["in_channels"] = n.in_channels;
    node["kernel"] = n.kernel;
    node["out_h"] = n.out_h;
    node["out_w"] = n.out_w;
    node["inputs"] = n.inputs;
    node["prunable"] = n.prunable;
    j["nodes"].push_back(std::move(node));
  }
  return j;
}

GraphSpec graph_from_json(const Json& j) {
  GraphSpec graph;
  try {
    for (const auto& n : j.at("nodes")) {
      GraphNode node;
      node.name = n.at("name").get<std::string>();
      node.kind = parse_node_kind(n.at("kind").get<std::string>());
      node.out_channels = n.at("out_channels").get<std::int64_t>();
      node.in_channels = n.at("in_channels").get<std::int64_t>();
      node.kernel = n.value("kernel", std::int64_t{1});
      node.out_h = n.value("out_h", std::int64_t{1});
      node.out_w = n.value("out_w", std::int64_t{1});
      node.inputs = n.value("inputs", std::vector<std::string>{});
      node.prunable = n.value("prunable", false);
      graph.nodes.push_back(std::move(node));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kGraphValidation,
                std::string("malformed graph: ") + e.what());
  }
  validate_graph(graph);
  return graph;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoFailure, "cannot open '" + path.string() + "'");
  }
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kManifestParse,
                "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoFailure,
                "cannot open '" + path.string() + "' for writing");
  }
  out << j.dump(2) << '\n';
  if (!out) {
    throw Error(ErrorCode::kIoFailure, "write failed on '" + path.string() + "'");
  }
}

GraphSpec load_graph(const std::filesystem::path& path) {
  return graph_from_json(read_json_file(path));
}

}  // namespace gmprune
