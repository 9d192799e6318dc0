// cnn/train.cc

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

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>

#include "ovd/cnn.h"

namespace ovd {

void TrainConfig::Check() const {
  if (epochs < 0 || batch_size < 1 || !(learning_rate > 0.0) ||
      plateau_patience < 1 || !(lr_factor > 0.0 && lr_factor < 1.0))
    throw Error(ErrorCode::kConfig, "invalid training configuration");
}

double PlateauScheduler::Update(double dev_loss) {
  if (dev_loss < best_) {
    best_ = dev_loss;
    misses_ = 0;
  } else if (++misses_ >= patience_) {
    lr_ *= factor_;
    misses_ = 0;
  }
  return lr_;
}

double LrScheduleUpdate(std::span<const double> history, double current_lr,
                        int patience, double factor) {
  if (history.empty())
    throw Error(ErrorCode::kParameter, "empty dev-loss history");
  PlateauScheduler sched(1.0, patience, factor);
  double before = 1.0;
  for (double loss : history) {
    before = sched.lr();
    sched.Update(loss);
  }
  return sched.lr() < before ? current_lr * factor : current_lr;
}

namespace {

constexpr int kEvalBatch = 256;

Matrix GatherRows(const Matrix &m, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

}  // namespace

double EvaluateLoss(const Model &model, const LabeledFrames &data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  if (n == 0) throw Error(ErrorCode::kConfig, "empty evaluation set");
  double total = 0.0;
  for (Eigen::Index start = 0; start < n; start += kEvalBatch) {
    const Eigen::Index count = std::min<Eigen::Index>(kEvalBatch, n - start);
    const Eigen::VectorXd p = Forward(model, data.features.middleRows(start, count));
    total += BceLoss(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())), std::span<const double>(data.labels).subspan(
                            static_cast<std::size_t>(start), static_cast<std::size_t>(count))) *
             static_cast<double>(count);
  }
  return total / static_cast<double>(n);
}

TrainState InitTrainState(Model model, const TrainConfig &config) {
  config.Check();
  TrainState state;
  state.best_model = model;
  state.model = std::move(model);
  state.scheduler = PlateauScheduler(config.learning_rate, config.plateau_patience,
                                     config.lr_factor);
  return state;
}

std::vector<EpochRecord> Train(
    TrainState *state, const LabeledFrames &train, const LabeledFrames &dev,
    const TrainConfig &config,
    const std::function<void(const EpochRecord &, const TrainState &)> &on_epoch) {
  config.Check();
  if (train.size() == 0 || dev.size() == 0)
    throw Error(ErrorCode::kConfig, "training and dev sets must be nonempty");
  if (static_cast<std::size_t>(train.features.rows()) != train.size() ||
      static_cast<std::size_t>(dev.features.rows()) != dev.size())
    throw Error(ErrorCode::kShape, "feature rows do not match label count");

  std::vector<EpochRecord> trace;
  std::vector<std::size_t> order(train.size());
  std::vector<double> batch_labels;
  ForwardCache cache;
  while (state->epochs_done < config.epochs) {
    const auto t0 = std::chrono::steady_clock::now();
    const int epoch = state->epochs_done + 1;
    const double lr = state->scheduler.lr();

    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(DeriveSeed(config.seed, static_cast<uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t count =
          std::min(order.size() - start, static_cast<std::size_t>(config.batch_size));
      const std::span<const std::size_t> rows(order.data() + start, count);
      const Matrix batch = GatherRows(train.features, rows);
      batch_labels.resize(count);
      for (std::size_t i = 0; i < count; ++i) batch_labels[i] = train.labels[rows[i]];
      const Eigen::VectorXd p = Forward(state->model, batch, &cache);
      loss_sum += BceLoss(std::span<const double>(p.data(), count), batch_labels) * static_cast<double>(count);
      SgdStep(&state->model, Backward(state->model, cache, batch_labels), lr);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.dev_loss = EvaluateLoss(state->model, dev);
    if (rec.dev_loss < state->best_dev_loss) {
      state->best_dev_loss = rec.dev_loss;
      state->best_model = state->model;
    }
    state->scheduler.Update(rec.dev_loss);
    state->epochs_done = epoch;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    trace.push_back(rec);
    if (on_epoch) on_epoch(rec, *state);
  }
  return trace;
}

Prediction Predict(const Model &model, const Matrix &features, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw Error(ErrorCode::kParameter, "threshold outside [0, 1]");
  Prediction pred;
  const Eigen::Index n = features.rows();
  pred.prob.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index start = 0; start < n; start += kEvalBatch) {
    const Eigen::Index count = std::min<Eigen::Index>(kEvalBatch, n - start);
    const Eigen::VectorXd p = Forward(model, features.middleRows(start, count));
    pred.prob.insert(pred.prob.end(), p.begin(), p.end());
  }
  pred.labels.reserve(pred.prob.size());
  for (double p : pred.prob)
    pred.labels.push_back(p >= threshold ? FrameLabel::kOverlap : FrameLabel::kSingle);
  return pred;
}

}  // namespace ovd
