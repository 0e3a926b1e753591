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

#ifndef GMPRUNE_TOYTRAIN_HPP_
#define GMPRUNE_TOYTRAIN_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "gmprune/model_io.hpp"
#include "gmprune/pruner.hpp"
#include "gmprune/types.hpp"

namespace gmprune {

// 64-bit LCG, state' = a * state + c (mod 2^64), with the state initialised
// to the seed. uniform() takes the top 53 bits of the next state; normal()
// draws u1 = 1 - uniform(), u2 = uniform() and returns the cosine branch of
// Box-Muller, sqrt(-2 ln u1) * cos(2 pi u2).
class Lcg64 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ = state_ * kMultiplier + kIncrement;
    return state_;
  }
  double uniform();
  double normal();
  // Uniform integer in [0, bound) from the high 32 bits.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

inline constexpr int kImageChannels = 3;
inline constexpr int kImageSide = 8;
inline constexpr int kImagePixels = kImageSide * kImageSide;
inline constexpr int kNumClasses = 2;
inline constexpr int kToyKernel = 3;
inline constexpr int kBatchSize = 16;

// Images are stored channel-major: rows are channels, columns are pixels in
// row-major (y * 8 + x) order.
using Image = Eigen::Matrix<double, kImageChannels, kImagePixels>;

struct SyntheticDataset {
  std::vector<Image> images;
  std::vector<int> labels;
  std::uint64_t seed = 0;

  std::size_t size() const { return images.size(); }
};

// Sample i has label i % 2: class 0 is a horizontal stripe pattern (+1 on
// even rows, -1 on odd rows), class 1 the vertical equivalent. Gaussian noise
// of the given sigma is added pixel by pixel in (sample, channel, y, x)
// order from a single Lcg64(seed) stream.
SyntheticDataset gen_dataset(std::uint64_t seed, int n,
                             double noise_sigma = 0.3);

// conv(3->c1, k3, pad 1) -> ReLU -> conv(c1->c2, k3, pad 1) -> ReLU ->
// global mean pool -> dense(c2->2). No biases, no normalisation.
struct ToyNet {
  FilterMatrixd conv1;  // c1 x (3 * 9)
  FilterMatrixd conv2;  // c2 x (c1 * 9)
  FilterMatrixd fc;     // 2 x c2

  // He-normal initialisation from Lcg64(seed + 0x9E3779B97F4A7C15).
  static ToyNet init(std::uint64_t seed, int conv1_channels = 8,
                     int conv2_channels = 8);

  // Layers are named "conv1", "conv2" and "fc" (dense, kernel 1).
  ModelBundle to_bundle() const;
  // Throws ShapeMismatch/UnknownLayer when the bundle is not a toy net.
  static ToyNet from_bundle(const ModelBundle& bundle);
  // Writes the weights back into a bundle holding the same layers.
  void store(ModelBundle& bundle) const;

  Index conv1_channels() const { return conv1.rows(); }
  Index conv2_channels() const { return conv2.rows(); }
};

struct ForwardCache {
  Index conv1_channels = 0;
  Index conv2_channels = 0;
  std::vector<Eigen::MatrixXd> cols1, pre1, cols2, pre2;
  Eigen::MatrixXd pooled;  // n x c2
};

struct ForwardResult {
  Eigen::MatrixXd logits;  // n x 2
  ForwardCache cache;
};

struct ToyGradients {
  FilterMatrixd conv1, conv2, fc;
};

// im2col for a 3x3, stride 1, zero-padded convolution over an 8x8 map. Row
// c * 9 + ky * 3 + kx of the result matches the filter layout.
Eigen::MatrixXd im2col(const Eigen::MatrixXd& input);
Eigen::MatrixXd col2im(const Eigen::MatrixXd& cols, Index channels);

// Throws ShapeMismatch for inconsistent weights.
ForwardResult forward(const ToyNet& net, std::span<const Image> batch);

// Mean softmax cross-entropy of the logits.
double cross_entropy(const Eigen::MatrixXd& logits, std::span<const int> labels);

// Gradient of the mean softmax cross-entropy. Throws CacheMismatch when the
// cache does not come from a forward pass of this net over labels.size()
// samples.
ToyGradients backward(const ToyNet& net, const ForwardResult& fwd,
                      std::span<const int> labels);

// One pass of mini-batch SGD (batch 16). The visiting order is a
// Fisher-Yates shuffle driven by Lcg64(seed * 1000003 + epoch). Returns the
// mean per-sample loss measured before each batch's update.
double train_epoch(ToyNet& net, const SyntheticDataset& data, double lr,
                   std::uint64_t seed, int epoch);

// Argmax accuracy; a tie predicts class 0.
double evaluate(const ToyNet& net, const SyntheticDataset& data);
double evaluation_loss(const ToyNet& net, const SyntheticDataset& data);

struct TrainEpochReport {
  int epoch = 0;
  double loss = 0.0;
  double train_accuracy = 0.0;
  double eval_accuracy = 0.0;
};

struct TrainReport {
  std::vector<TrainEpochReport> epochs;
};

// Trainer callback for run_schedule: one train_epoch over `data` on the toy
// network stored in the bundle.
Trainer make_toy_trainer(const SyntheticDataset& data, double lr,
                         std::uint64_t seed);

struct ToyExperimentConfig {
  std::uint64_t seed = 7;
  int train_samples = 512;
  int eval_samples = 256;
  double lr = 0.05;
  PruneConfig prune;  // prune.epoch_max is the epoch count; "fc" is frozen
};

struct ToyExperimentResult {
  ScheduleResult schedule;
  TrainReport report;
};

// Initialises ToyNet::init(seed), trains on gen_dataset(seed, train_samples)
// under the pruning schedule and evaluates after each epoch's pruning step
// on gen_dataset(seed + 1000003, eval_samples).
ToyExperimentResult run_toy_experiment(const ToyExperimentConfig& cfg);

}  // namespace gmprune

#endif  // GMPRUNE_TOYTRAIN_HPP_
