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

#include "gmprune/toytrain.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "gmprune/error.hpp"

namespace gmprune {

double Lcg64::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Lcg64::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Lcg64::below(std::uint64_t bound) {
  return (next() >> 32) % bound;
}

SyntheticDataset gen_dataset(std::uint64_t seed, int n, double noise_sigma) {
  if (n < 2) throw std::invalid_argument("gen_dataset: n must be >= 2");
  SyntheticDataset data;
  data.seed = seed;
  data.images.reserve(static_cast<std::size_t>(n));
  data.labels.reserve(static_cast<std::size_t>(n));
  Lcg64 rng(seed);
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    Image img;
    for (int c = 0; c < kImageChannels; ++c) {
      for (int y = 0; y < kImageSide; ++y) {
        for (int x = 0; x < kImageSide; ++x) {
          const int phase = label == 0 ? y : x;
          const double base = phase % 2 == 0 ? 1.0 : -1.0;
          img(c, y * kImageSide + x) = base + noise_sigma * rng.normal();
        }
      }
    }
    data.images.push_back(img);
    data.labels.push_back(label);
  }
  return data;
}

ToyNet ToyNet::init(std::uint64_t seed, int conv1_channels,
                    int conv2_channels) {
  Lcg64 rng(seed + 0x9E3779B97F4A7C15ULL);
  auto he = [&rng](Index rows, Index cols, double fan_in) {
    FilterMatrixd w(rows, cols);
    const double scale = std::sqrt(2.0 / fan_in);
    for (Index k = 0; k < w.size(); ++k) w.data()[k] = scale * rng.normal();
    return w;
  };
  const int k2 = kToyKernel * kToyKernel;
  ToyNet net;
  net.conv1 = he(conv1_channels, kImageChannels * k2, kImageChannels * k2);
  net.conv2 = he(conv2_channels, conv1_channels * k2, conv1_channels * k2);
  net.fc = he(kNumClasses, conv2_channels, conv2_channels);
  return net;
}

ModelBundle ToyNet::to_bundle() const {
  ModelBundle b;
  b.add_layer("conv1", LayerKind::kConv2d, kImageChannels, kToyKernel, conv1);
  b.add_layer("conv2", LayerKind::kConv2d, conv1.rows(), kToyKernel, conv2);
  b.add_layer("fc", LayerKind::kDense, conv2.rows(), 1, fc);
  return b;
}

ToyNet ToyNet::from_bundle(const ModelBundle& bundle) {
  const auto& l1 = bundle.layers[bundle.layer_index("conv1")];
  const auto& l2 = bundle.layers[bundle.layer_index("conv2")];
  const auto& l3 = bundle.layers[bundle.layer_index("fc")];
  if (l1.kernel != kToyKernel || l2.kernel != kToyKernel || l3.kernel != 1 ||
      l1.in_channels != kImageChannels || l2.in_channels != l1.out_channels ||
      l3.in_channels != l2.out_channels || l3.out_channels != kNumClasses) {
    throw Error(ErrorCode::kShapeMismatch,
                "bundle layers do not form a toy network");
  }
  ToyNet net;
  net.conv1 = bundle.tensor("conv1");
  net.conv2 = bundle.tensor("conv2");
  net.fc = bundle.tensor("fc");
  return net;
}

void ToyNet::store(ModelBundle& bundle) const {
  bundle.tensor("conv1") = conv1;
  bundle.tensor("conv2") = conv2;
  bundle.tensor("fc") = fc;
}

Eigen::MatrixXd im2col(const Eigen::MatrixXd& input) {
  const Index channels = input.rows();
  Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(channels * 9, kImagePixels);
  for (Index c = 0; c < channels; ++c) {
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const Index row = c * 9 + ky * 3 + kx;
        for (int y = 0; y < kImageSide; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= kImageSide) continue;
          for (int x = 0; x < kImageSide; ++x) {
            const int sx = x + kx - 1;
            if (sx < 0 || sx >= kImageSide) continue;
            cols(row, y * kImageSide + x) = input(c, sy * kImageSide + sx);
          }
        }
      }
    }
  }
  return cols;
}

Eigen::MatrixXd col2im(const Eigen::MatrixXd& cols, Index channels) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(channels, kImagePixels);
  for (Index c = 0; c < channels; ++c) {
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const Index row = c * 9 + ky * 3 + kx;
        for (int y = 0; y < kImageSide; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= kImageSide) continue;
          for (int x = 0; x < kImageSide; ++x) {
            const int sx = x + kx - 1;
            if (sx < 0 || sx >= kImageSide) continue;
            out(c, sy * kImageSide + sx) += cols(row, y * kImageSide + x);
          }
        }
      }
    }
  }
  return out;
}

namespace {

void check_shapes(const ToyNet& net) {
  if (net.conv1.cols() != kImageChannels * 9 ||
      net.conv2.cols() != net.conv1.rows() * 9 ||
      net.fc.cols() != net.conv2.rows() || net.fc.rows() != kNumClasses) {
    throw Error(ErrorCode::kShapeMismatch, "toy network weights are inconsistent");
  }
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& x) { return x.cwiseMax(0.0); }

}  // namespace

ForwardResult forward(const ToyNet& net, std::span<const Image> batch) {
  check_shapes(net);
  const auto n = static_cast<Index>(batch.size());
  ForwardResult r;
  ForwardCache& c = r.cache;
  c.conv1_channels = net.conv1.rows();
  c.conv2_channels = net.conv2.rows();
  c.pooled.resize(n, net.conv2.rows());
  r.logits.resize(n, kNumClasses);
  for (Index s = 0; s < n; ++s) {
    c.cols1.push_back(im2col(batch[s]));
    c.pre1.push_back(net.conv1 * c.cols1.back());
    c.cols2.push_back(im2col(relu(c.pre1.back())));
    c.pre2.push_back(net.conv2 * c.cols2.back());
    c.pooled.row(s) = relu(c.pre2.back()).rowwise().mean().transpose();
    r.logits.row(s) = (net.fc * c.pooled.row(s).transpose()).transpose();
  }
  return r;
}

double cross_entropy(const Eigen::MatrixXd& logits, std::span<const int> labels) {
  double total = 0.0;
  for (Index s = 0; s < logits.rows(); ++s) {
    const double top = logits.row(s).maxCoeff();
    const double lse = top + std::log((logits.row(s).array() - top).exp().sum());
    total += lse - logits(s, labels[s]);
  }
  return total / static_cast<double>(logits.rows());
}

ToyGradients backward(const ToyNet& net, const ForwardResult& fwd,
                      std::span<const int> labels) {
  const ForwardCache& c = fwd.cache;
  const auto n = static_cast<Index>(labels.size());
  if (n == 0 || fwd.logits.rows() != n ||
      static_cast<Index>(c.cols1.size()) != n ||
      c.conv1_channels != net.conv1.rows() ||
      c.conv2_channels != net.conv2.rows()) {
    throw Error(ErrorCode::kCacheMismatch,
                "forward cache does not match this network and batch");
  }
  check_shapes(net);

  ToyGradients g;
  g.conv1 = FilterMatrixd::Zero(net.conv1.rows(), net.conv1.cols());
  g.conv2 = FilterMatrixd::Zero(net.conv2.rows(), net.conv2.cols());

  Eigen::MatrixXd dlogits(n, kNumClasses);
  for (Index s = 0; s < n; ++s) {
    const int label = labels[s];
    if (label < 0 || label >= kNumClasses) {
      throw Error(ErrorCode::kCacheMismatch, "label out of range");
    }
    const double top = fwd.logits.row(s).maxCoeff();
    Eigen::RowVectorXd p = (fwd.logits.row(s).array() - top).exp();
    p /= p.sum();
    p[label] -= 1.0;
    dlogits.row(s) = p / static_cast<double>(n);
  }
  g.fc = dlogits.transpose() * c.pooled;

  for (Index s = 0; s < n; ++s) {
    const Eigen::VectorXd dpooled = net.fc.transpose() * dlogits.row(s).transpose();
    const Eigen::MatrixXd dpre2 =
        (c.pre2[s].array() > 0.0)
            .select(dpooled.replicate(1, kImagePixels) / kImagePixels, 0.0);
    g.conv2.noalias() += dpre2 * c.cols2[s].transpose();
    const Eigen::MatrixXd dact1 =
        col2im(net.conv2.transpose() * dpre2, net.conv1.rows());
    const Eigen::MatrixXd dpre1 = (c.pre1[s].array() > 0.0).select(dact1, 0.0);
    g.conv1.noalias() += dpre1 * c.cols1[s].transpose();
  }
  return g;
}

double train_epoch(ToyNet& net, const SyntheticDataset& data, double lr,
                   std::uint64_t seed, int epoch) {
  const std::size_t n = data.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Lcg64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(epoch));
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }

  double loss_sum = 0.0;
  std::vector<Image> images;
  std::vector<int> labels;
  for (std::size_t start = 0; start < n; start += kBatchSize) {
    const std::size_t stop = std::min(n, start + kBatchSize);
    images.clear();
    labels.clear();
    for (std::size_t k = start; k < stop; ++k) {
      images.push_back(data.images[order[k]]);
      labels.push_back(data.labels[order[k]]);
    }
    const ForwardResult fwd = forward(net, images);
    loss_sum += cross_entropy(fwd.logits, labels) * static_cast<double>(stop - start);
    const ToyGradients g = backward(net, fwd, labels);
    net.conv1 -= lr * g.conv1;
    net.conv2 -= lr * g.conv2;
    net.fc -= lr * g.fc;
  }
  return loss_sum / static_cast<double>(n);
}

double evaluate(const ToyNet& net, const SyntheticDataset& data) {
  if (data.size() == 0) return 0.0;
  const ForwardResult fwd = forward(net, data.images);
  std::size_t correct = 0;
  for (Index s = 0; s < fwd.logits.rows(); ++s) {
    const int predicted = fwd.logits(s, 1) > fwd.logits(s, 0) ? 1 : 0;
    if (predicted == data.labels[s]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double evaluation_loss(const ToyNet& net, const SyntheticDataset& data) {
  return cross_entropy(forward(net, data.images).logits, data.labels);
}

Trainer make_toy_trainer(const SyntheticDataset& data, double lr,
                         std::uint64_t seed) {
  return [&data, lr, seed](ModelBundle& bundle, int epoch) {
    ToyNet net = ToyNet::from_bundle(bundle);
    const double loss = train_epoch(net, data, lr, seed, epoch);
    net.store(bundle);
    return loss;
  };
}

ToyExperimentResult run_toy_experiment(const ToyExperimentConfig& cfg) {
  const SyntheticDataset train = gen_dataset(cfg.seed, cfg.train_samples);
  const SyntheticDataset eval = gen_dataset(cfg.seed + 1000003ULL, cfg.eval_samples);
  PruneConfig prune = cfg.prune;
  prune.frozen_layers.insert("fc");

  ToyExperimentResult result;
  auto hook = [&](int epoch, const ModelBundle& bundle, const MaskState&) {
    const ToyNet net = ToyNet::from_bundle(bundle);
    TrainEpochReport e;
    e.epoch = epoch;
    e.train_accuracy = evaluate(net, train);
    e.eval_accuracy = evaluate(net, eval);
    result.report.epochs.push_back(e);
  };
  result.schedule = run_schedule(ToyNet::init(cfg.seed).to_bundle(), prune,
                                 make_toy_trainer(train, cfg.lr, cfg.seed), hook);
  for (std::size_t i = 0; i < result.report.epochs.size(); ++i) {
    result.report.epochs[i].loss = result.schedule.history[i].loss;
  }
  return result;
}

}  // namespace gmprune
