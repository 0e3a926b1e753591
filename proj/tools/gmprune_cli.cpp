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

// gmprune: filter analysis, selection, soft pruning, FLOPs accounting and
// compact-model extraction from the command line. JSON goes to stdout,
// diagnostics to stderr. Exit codes: 0 success, 1 domain error, 2 usage.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gmprune/analysis.hpp"
#include "gmprune/criteria.hpp"
#include "gmprune/error.hpp"
#include "gmprune/fixtures.hpp"
#include "gmprune/flops.hpp"
#include "gmprune/json_io.hpp"
#include "gmprune/model_io.hpp"
#include "gmprune/pruner.hpp"
#include "gmprune/toytrain.hpp"

namespace {

using namespace gmprune;

const std::map<std::string, Criterion> kCriteria = {
    {"l1", Criterion::kNormL1},
    {"l2", Criterion::kNormL2},
    {"gm", Criterion::kGM},
    {"mix", Criterion::kMix}};
const std::map<std::string, DistanceKind> kDistances = {
    {"l1", DistanceKind::kL1},
    {"l2", DistanceKind::kL2},
    {"cosine", DistanceKind::kCosine}};
const std::map<std::string, NormKind> kNorms = {{"l1", NormKind::kL1},
                                                {"l2", NormKind::kL2}};
const std::map<std::string, ChannelRounding> kRoundings = {
    {"floor", ChannelRounding::kFloor},
    {"fractional", ChannelRounding::kFractional}};

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open '" + path + "'");
  out << std::setprecision(17);
  return out;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string in;
  NormKind norm = NormKind::kL2;
  double deviation_threshold = kDefaultDeviationThreshold;
  double minimum_threshold = kDefaultMinimumThreshold;
  int grid_points = 256;
  std::optional<double> bandwidth;
  std::string kde_csv;
  std::string norms_csv;
};

void cmd_analyze(const AnalyzeArgs& a) {
  const ModelBundle bundle = load_bundle(a.in);
  Json out;
  out["norm"] = std::string(NormKindName(a.norm));
  out["deviation_threshold"] = a.deviation_threshold;
  out["minimum_threshold"] = a.minimum_threshold;
  out["layers"] = Json::array();

  std::optional<std::ofstream> kde, norms;
  if (!a.kde_csv.empty()) {
    kde = open_output(a.kde_csv);
    *kde << "layer,grid,density\n";
  }
  if (!a.norms_csv.empty()) {
    norms = open_output(a.norms_csv);
    *norms << "layer,norm\n";
  }
  for (std::size_t i = 0; i < bundle.layers.size(); ++i) {
    const std::string& name = bundle.layers[i].name;
    const NormStats stats = compute_norm_stats(bundle.tensors[i], a.norm, name);
    Json layer;
    layer["stats"] = to_json(stats);
    layer["requirements"] = to_json(
        check_requirements(stats, a.deviation_threshold, a.minimum_threshold));
    const KdeCurve curve = kde_estimate(stats.norms, a.grid_points, a.bandwidth);
    layer["kde_bandwidth"] = curve.bandwidth;
    out["layers"].push_back(std::move(layer));
    if (kde) {
      for (Index k = 0; k < curve.grid.size(); ++k) {
        *kde << name << ',' << curve.grid[k] << ',' << curve.density[k] << '\n';
      }
    }
    if (norms) {
      for (Index k = 0; k < stats.norms.size(); ++k) {
        *norms << name << ',' << stats.norms[k] << '\n';
      }
    }
  }
  emit(out);
}

// ----------------------------------------------------------------- select

struct SelectArgs {
  std::string in;
  std::string layer;
  Criterion criterion = Criterion::kGM;
  DistanceKind distance = DistanceKind::kL2;
  NormKind mix_norm = NormKind::kL2;
  double mix_norm_fraction = 0.75;
  Index count = 0;
};

void cmd_select(const SelectArgs& a) {
  const ModelBundle bundle = load_bundle(a.in);
  const FilterMatrixd& w = bundle.tensor(a.layer);
  SelectionResult r;
  switch (a.criterion) {
    case Criterion::kNormL1: r = select_norm(w, a.count, NormKind::kL1); break;
    case Criterion::kNormL2: r = select_norm(w, a.count, NormKind::kL2); break;
    case Criterion::kGM: r = select_gm(w, a.count, a.distance); break;
    case Criterion::kMix: {
      const Index norm_count = pruned_filter_count(a.count, a.mix_norm_fraction);
      r = select_mix(w, norm_count, a.count - norm_count, a.mix_norm,
                     a.distance);
      break;
    }
  }
  emit(to_json(r, a.layer));
}

// ------------------------------------------------------------------ prune

struct PruneArgs {
  std::string in;
  std::string out;
  std::string graph;
  std::string trainer = "none";
  std::vector<std::string> freeze;
  double lr = 0.05;
  std::uint64_t seed = 7;
  PruneConfig cfg;
};

void cmd_prune(PruneArgs a) {
  ModelBundle bundle = load_bundle(a.in);
  if (!a.graph.empty()) {
    for (const auto& node : load_graph(a.graph).nodes) {
      if (!node.prunable) a.cfg.frozen_layers.insert(node.name);
    }
  }
  a.cfg.frozen_layers.insert(a.freeze.begin(), a.freeze.end());

  std::optional<SyntheticDataset> data;
  Trainer trainer = [](ModelBundle&, int) { return 0.0; };
  if (a.trainer == "toy") {
    ToyNet::from_bundle(bundle);
    data = gen_dataset(a.seed, 512);
    trainer = make_toy_trainer(*data, a.lr, a.seed);
  }
  const ScheduleResult result = run_schedule(std::move(bundle), a.cfg, trainer);
  save_bundle(result.bundle, a.out);
  Json out;
  out["masks"] = to_json(result.masks);
  out["history"] = to_json(result.history);
  emit(out);
}

// ---------------------------------------------------------------- compact

struct CompactArgs {
  std::string in, masks, graph, out;
};

void cmd_compact(const CompactArgs& a) {
  const ModelBundle bundle = load_bundle(a.in);
  const MaskState masks = mask_state_from_json(read_json_file(a.masks));
  const GraphSpec graph = load_graph(a.graph);
  const ModelBundle compact = extract_compact(bundle, masks, graph);
  save_bundle(compact, a.out);
  Json out;
  out["layers"] = Json::array();
  for (const auto& l : compact.layers) {
    Json j;
    j["name"] = l.name;
    j["out_channels"] = l.out_channels;
    j["in_channels"] = l.in_channels;
    j["kernel"] = l.kernel;
    out["layers"].push_back(std::move(j));
  }
  emit(out);
}

// ------------------------------------------------------------------ flops

struct FlopsArgs {
  std::string graph;
  double rate = 0.0;
  ChannelRounding rounding = ChannelRounding::kFloor;
};

void cmd_flops(const FlopsArgs& a) {
  const GraphSpec graph = load_graph(a.graph);
  const FlopsReport report =
      flops_pruned(graph, PruneRates::uniform(graph, a.rate), a.rounding);
  char line[160];
  std::fprintf(stderr, "%-20s %14s %14s\n", "node", "baseline", "pruned");
  for (const auto& n : report.nodes) {
    if (n.baseline_macs == 0.0) continue;
    std::snprintf(line, sizeof line, "%-20s %14.0f %14.1f", n.name.c_str(),
                  n.baseline_macs, n.pruned_macs);
    std::fprintf(stderr, "%s\n", line);
  }
  std::fprintf(stderr, "%-20s %14.4g %14.4g  (-%.2f%%)\n", "total",
               report.baseline_total, report.pruned_total,
               report.reduction_percent);
  Json out = to_json(report);
  out["rate"] = a.rate;
  out["rounding"] = a.rounding == ChannelRounding::kFloor ? "floor" : "fractional";
  emit(out);
}

// -------------------------------------------------------------- train-toy

struct TrainToyArgs {
  ToyExperimentConfig cfg;
  std::string out_report;
  std::string out_model;
};

void cmd_train_toy(TrainToyArgs a) {
  const ToyExperimentResult r = run_toy_experiment(a.cfg);
  Json report;
  report["seed"] = a.cfg.seed;
  report["lr"] = a.cfg.lr;
  report["rate"] = a.cfg.prune.rate;
  report["criterion"] = std::string(CriterionName(a.cfg.prune.criterion));
  report["distance"] = std::string(DistanceKindName(a.cfg.prune.distance));
  report["interval"] = a.cfg.prune.interval;
  report["epochs"] = Json::array();
  const Json history = to_json(r.schedule.history);
  const Json train = to_json(r.report);
  for (std::size_t i = 0; i < train.size(); ++i) {
    Json e = train[i];
    e["pruned"] = history[i]["pruned"];
    e["churn"] = history[i]["churn"];
    e["masked_filters"] = history[i]["masked_filters"];
    report["epochs"].push_back(std::move(e));
  }
  report["masks"] = to_json(r.schedule.masks);
  if (!a.out_report.empty()) write_json_file(report, a.out_report);
  if (!a.out_model.empty()) save_bundle(r.schedule.bundle, a.out_model);
  emit(report);
}

// ------------------------------------------------------------ gen-fixture

struct FixtureArgs {
  std::string kind;
  std::uint64_t seed = 1;
  std::string out;
};

void cmd_gen_fixture(const FixtureArgs& a) {
  if (a.kind == "resnet20-graph") {
    write_json_file(to_json(fixtures::resnet20_cifar()), a.out);
  } else if (a.kind == "toy-graph") {
    write_json_file(to_json(fixtures::toy_chain()), a.out);
  } else if (a.kind == "random") {
    save_bundle(fixtures::random_bundle(a.seed), a.out);
  } else if (a.kind == "collinear") {
    save_bundle(fixtures::collinear_bundle(), a.out);
  } else if (a.kind == "toy") {
    save_bundle(ToyNet::init(a.seed).to_bundle(), a.out);
  } else if (a.kind == "resnet20") {
    save_bundle(fixtures::resnet20_bundle(a.seed), a.out);
  }
  Json out;
  out["kind"] = a.kind;
  out["seed"] = a.seed;
  out["out"] = a.out;
  emit(out);
}

template <typename T>
CLI::Option* add_enum(CLI::App* app, const std::string& flag, T& target,
                      const std::map<std::string, T>& choices,
                      const std::string& help) {
  std::vector<std::string> names;
  std::string current;
  for (const auto& [name, value] : choices) {
    names.push_back(name);
    if (value == target) current = name;
  }
  return app
      ->add_option_function<std::string>(
          flag, [&target, &choices](const std::string& s) { target = choices.at(s); },
          help)
      ->check(CLI::IsMember(names))
      ->default_str(current);
}

void add_prune_options(CLI::App* app, PruneConfig& cfg) {
  app->add_option("--rate", cfg.rate, "Fraction of filters pruned per layer")
      ->check(CLI::Range(0.0, 0.999999));
  app->add_option("--interval", cfg.interval, "Epochs between pruning steps")
      ->check(CLI::PositiveNumber);
  add_enum(app, "--criterion", cfg.criterion, kCriteria,
           "Selection criterion {l1,l2,gm,mix}");
  add_enum(app, "--distance", cfg.distance, kDistances,
           "Distance used by gm/mix {l1,l2,cosine}");
  app->add_option("--mix-norm-fraction", cfg.mix_norm_fraction,
                  "Share of the pruning budget taken by the norm criterion under mix")
      ->check(CLI::Range(0.0, 1.0));
  add_enum(app, "--mix-norm", cfg.mix_norm, kNorms, "Norm used by mix {l1,l2}");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gmprune: geometric-median filter pruning toolkit"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  std::function<void()> run;

  AnalyzeArgs analyze;
  auto* c_analyze = app.add_subcommand("analyze", "Per-layer filter norm statistics and KDE");
  c_analyze->add_option("--in", analyze.in, "Input GMPK1 bundle")->required();
  add_enum(c_analyze, "--norm", analyze.norm, kNorms, "Filter norm {l1,l2}");
  c_analyze->add_option("--deviation-threshold", analyze.deviation_threshold,
                        "small_deviation iff std/mean is below this")
      ->check(CLI::Range(0.0, 1.0));
  c_analyze->add_option("--minimum-threshold", analyze.minimum_threshold,
                        "large_minimum iff min/max is above this")
      ->check(CLI::Range(0.0, 1.0));
  c_analyze->add_option("--grid-points", analyze.grid_points, "KDE grid size")
      ->check(CLI::Range(2, 1 << 20));
  c_analyze->add_option("--bandwidth", analyze.bandwidth,
                        "KDE bandwidth (default: Silverman's rule)")
      ->check(CLI::PositiveNumber);
  c_analyze->add_option("--kde-csv", analyze.kde_csv, "Write layer,grid,density rows");
  c_analyze->add_option("--norms-csv", analyze.norms_csv, "Write layer,norm rows");
  c_analyze->callback([&] { run = [&] { cmd_analyze(analyze); }; });

  SelectArgs select;
  auto* c_select = app.add_subcommand("select", "Select filters of one layer");
  c_select->add_option("--in", select.in, "Input GMPK1 bundle")->required();
  c_select->add_option("--layer", select.layer, "Layer name")->required();
  add_enum(c_select, "--criterion", select.criterion, kCriteria,
           "Selection criterion {l1,l2,gm,mix}");
  add_enum(c_select, "--distance", select.distance, kDistances,
           "Distance used by gm/mix {l1,l2,cosine}");
  add_enum(c_select, "--mix-norm", select.mix_norm, kNorms, "Norm used by mix {l1,l2}");
  c_select->add_option("--mix-norm-fraction", select.mix_norm_fraction,
                       "Share of --count taken by the norm criterion under mix")
      ->check(CLI::Range(0.0, 1.0));
  c_select->add_option("--count", select.count, "Number of filters to select")
      ->check(CLI::NonNegativeNumber);
  c_select->callback([&] { run = [&] { cmd_select(select); }; });

  PruneArgs prune;
  prune.cfg.epoch_max = 1;
  auto* c_prune = app.add_subcommand("prune", "Run the soft pruning schedule on a bundle");
  c_prune->add_option("--in", prune.in, "Input GMPK1 bundle")->required();
  c_prune->add_option("--out", prune.out, "Output GMPK1 bundle")->required();
  add_prune_options(c_prune, prune.cfg);
  c_prune->add_option("--epochs", prune.cfg.epoch_max, "Schedule length in epochs")
      ->check(CLI::NonNegativeNumber);
  c_prune->add_option("--seed", prune.seed, "Seed for the toy trainer's data and shuffling");
  c_prune->add_option("--graph", prune.graph,
                      "GraphSpec JSON; its non-prunable nodes are left untouched");
  c_prune->add_option("--freeze", prune.freeze, "Layers never pruned")->delimiter(',');
  c_prune->add_option("--trainer", prune.trainer,
                      "Per-epoch training: none (weights fixed) or toy")
      ->check(CLI::IsMember({"none", "toy"}));
  c_prune->add_option("--lr", prune.lr, "Toy trainer learning rate")
      ->check(CLI::PositiveNumber);
  c_prune->callback([&] { run = [&] { cmd_prune(prune); }; });

  CompactArgs compact;
  auto* c_compact = app.add_subcommand("compact", "Extract the compact model from masks");
  c_compact->add_option("--in", compact.in, "Zeroized GMPK1 bundle")->required();
  c_compact->add_option("--masks", compact.masks, "MaskState JSON (prune output)")->required();
  c_compact->add_option("--graph", compact.graph, "Sequential GraphSpec JSON")->required();
  c_compact->add_option("--out", compact.out, "Output GMPK1 bundle")->required();
  c_compact->callback([&] { run = [&] { cmd_compact(compact); }; });

  FlopsArgs flops;
  auto* c_flops = app.add_subcommand("flops", "Baseline and pruned MAC counts");
  c_flops->add_option("--graph", flops.graph, "GraphSpec JSON")->required();
  c_flops->add_option("--rate", flops.rate, "Uniform rate for prunable nodes")
      ->check(CLI::Range(0.0, 0.999999));
  add_enum(c_flops, "--rounding", flops.rounding, kRoundings,
           "Kept channels: floor (whole filters) or fractional N(1-P)");
  c_flops->callback([&] { run = [&] { cmd_flops(flops); }; });

  TrainToyArgs train;
  train.cfg.prune.epoch_max = 30;
  auto* c_train = app.add_subcommand("train-toy", "Train the toy network under the pruning schedule");
  c_train->add_option("--seed", train.cfg.seed, "Seed for data, init and shuffling");
  c_train->add_option("--epochs", train.cfg.prune.epoch_max, "Training epochs")
      ->check(CLI::NonNegativeNumber);
  c_train->add_option("--lr", train.cfg.lr, "SGD learning rate")->check(CLI::PositiveNumber);
  c_train->add_option("--samples", train.cfg.train_samples, "Training set size")
      ->check(CLI::Range(2, 1 << 24));
  c_train->add_option("--eval-samples", train.cfg.eval_samples, "Evaluation set size")
      ->check(CLI::Range(2, 1 << 24));
  add_prune_options(c_train, train.cfg.prune);
  c_train->add_option("--out-report", train.out_report, "Write the report JSON here");
  c_train->add_option("--out-model", train.out_model, "Write the final GMPK1 bundle here");
  c_train->callback([&] { run = [&] { cmd_train_toy(train); }; });

  FixtureArgs fixture;
  auto* c_fixture = app.add_subcommand("gen-fixture", "Write a seeded test fixture");
  c_fixture->add_option("--kind", fixture.kind, "Fixture kind")
      ->required()
      ->check(CLI::IsMember({"random", "collinear", "toy", "resnet20",
                             "resnet20-graph", "toy-graph"}));
  c_fixture->add_option("--seed", fixture.seed, "Generator seed");
  c_fixture->add_option("--out", fixture.out, "Output path")->required();
  c_fixture->callback([&] { run = [&] { cmd_gen_fixture(fixture); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    run();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
