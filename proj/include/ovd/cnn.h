// ovd/cnn.h

// Copyright 2026  The ovd Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Frame classifier: a stack of kernel-2 valid 1-D convolutions with tanh,
// run along one frame's feature vector (single input channel), followed by a
// mean pool over positions, an affine map to one logit, and a sigmoid.

#ifndef OVD_CNN_H_
#define OVD_CNN_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "ovd/base.h"
#include "ovd/features.h"
#include "ovd/mixer.h"

namespace ovd {

/// 1 -> 128 x 5 -> 32.
inline const std::vector<int> kDefaultChannels = {1, 128, 128, 128, 128, 128, 32};

struct ConvLayer {
  static constexpr int kKernel = 2;
  // taps[k](o, i) multiplies input position t + k.
  Eigen::MatrixXd taps[kKernel];
  Eigen::VectorXd bias;

  int in_channels() const { return static_cast<int>(taps[0].cols()); }
  int out_channels() const { return static_cast<int>(taps[0].rows()); }
};

struct Model {
  FeatureKind kind = FeatureKind::kMfcc;
  int input_dim = 0;
  std::vector<ConvLayer> layers;
  Eigen::VectorXd head_weight;
  double head_bias = 0.0;

  int num_layers() const { return static_cast<int>(layers.size()); }
  /// Input positions lost to the valid convolutions.
  int shrink() const { return num_layers() * (ConvLayer::kKernel - 1); }
  std::size_t NumParameters() const;
  /// Layer weights in (out, in, tap) order then bias, per layer, then head
  /// weights and head bias.
  Eigen::VectorXd Flatten() const;
  void Unflatten(const Eigen::VectorXd &params);
};

/// Weights uniform in +-sqrt(1 / (in_channels * kernel)), biases zero.
Model MakeModel(const std::vector<int> &channels, FeatureKind kind,
                int input_dim, uint64_t seed);
/// Same architecture, all parameters zero.
Model ZerosLike(const Model &model);

/// Activations kept from the forward pass. act[l] is channels x (B * L) with
/// item b occupying columns [b L, (b + 1) L); only the first L - l columns of
/// each item are meaningful at layer l.
struct ForwardCache {
  int batch = 0;
  int length = 0;
  std::vector<Eigen::MatrixXd> act;
  Eigen::MatrixXd pooled;  // last-layer channels x B
  Eigen::VectorXd prob;
};

/// batch is B x L (one frame per row). Throws kShape when L <= model depth
/// or L differs from model.input_dim.
Eigen::VectorXd Forward(const Model &model, const Matrix &batch,
                        ForwardCache *cache = nullptr);

constexpr double kProbClamp = 1e-7;

/// Mean binary cross-entropy with p clamped to [1e-7, 1 - 1e-7].
double BceLoss(std::span<const double> prob, std::span<const double> labels);

/// Exact gradient of BceLoss(Forward(batch)) for every parameter.
Model Backward(const Model &model, const ForwardCache &cache,
               std::span<const double> labels);

/// theta <- theta - lr * grad.
void SgdStep(Model *model, const Model &grad, double lr);

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 0.001;
  int plateau_patience = 3;
  double lr_factor = 0.5;
  uint64_t seed = 0;

  void Check() const;
};

/// Multiplies the rate by `factor` once `patience` successive epochs fail to
/// beat the best dev loss seen so far; the miss counter then restarts.
class PlateauScheduler {
 public:
  PlateauScheduler() = default;
  PlateauScheduler(double lr, int patience, double factor)
      : lr_(lr), patience_(patience), factor_(factor) {}

  /// Feeds one completed epoch's dev loss; returns the rate for the next one.
  double Update(double dev_loss);

  double lr() const { return lr_; }
  double best() const { return best_; }
  int misses() const { return misses_; }
  void Restore(double lr, double best, int misses) {
    lr_ = lr;
    best_ = best;
    misses_ = misses;
  }

 private:
  double lr_ = 0.001;
  int patience_ = 3;
  double factor_ = 0.5;
  double best_ = std::numeric_limits<double>::infinity();
  int misses_ = 0;
};

/// Replays `history` through a scheduler; returns current_lr * factor when the
/// last entry triggers a reduction, else current_lr.
double LrScheduleUpdate(std::span<const double> history, double current_lr,
                        int patience = 3, double factor = 0.5);

/// Normalized frames (rows) with 0/1 labels.
struct LabeledFrames {
  Matrix features;
  std::vector<double> labels;

  std::size_t size() const { return labels.size(); }
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double lr = 0.0;  // rate used during this epoch
  double seconds = 0.0;
};

struct TrainState {
  Model model;
  Model best_model;
  double best_dev_loss = std::numeric_limits<double>::infinity();
  int epochs_done = 0;
  PlateauScheduler scheduler;
};

TrainState InitTrainState(Model model, const TrainConfig &config);

/// Runs epochs state->epochs_done + 1 .. config.epochs. Each epoch shuffles
/// with a seed derived from (config.seed, epoch), so a resumed run matches an
/// uninterrupted one.
std::vector<EpochRecord> Train(
    TrainState *state, const LabeledFrames &train, const LabeledFrames &dev,
    const TrainConfig &config,
    const std::function<void(const EpochRecord &, const TrainState &)>
        &on_epoch = {});

/// Mean BCE over a dataset, evaluated in fixed-order batches.
double EvaluateLoss(const Model &model, const LabeledFrames &data);

struct Prediction {
  std::vector<double> prob;
  std::vector<FrameLabel> labels;
};

/// label = overlap iff prob >= threshold.
Prediction Predict(const Model &model, const Matrix &features,
                   double threshold = 0.5);

// ---------------------------------------------------------------------------
// Checkpoints

struct CheckpointInfo {
  int epochs_done = 0;
  double learning_rate = 0.0;
  double scheduler_best = std::numeric_limits<double>::infinity();
  int scheduler_misses = 0;
  double best_dev_loss = std::numeric_limits<double>::infinity();
};

void SaveCheckpoint(const Model &model, const CheckpointInfo &info,
                    const std::filesystem::path &path);
/// Throws kChecksum for truncated or corrupted files.
Model LoadCheckpoint(const std::filesystem::path &path,
                     CheckpointInfo *info = nullptr);
/// Also throws kCompatibility unless the checkpoint was trained on `kind`
/// features of `input_dim`.
Model LoadCheckpoint(const std::filesystem::path &path, FeatureKind kind,
                     int input_dim, CheckpointInfo *info = nullptr);

}  // namespace ovd

#endif  // OVD_CNN_H_
