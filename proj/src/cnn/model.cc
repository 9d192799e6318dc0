// cnn/model.cc

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
#include <cmath>
#include <random>

#include "ovd/cnn.h"

namespace ovd {

std::size_t Model::NumParameters() const {
  std::size_t n = 0;
  for (const ConvLayer &l : layers)
    n += static_cast<std::size_t>(l.out_channels()) *
             (l.in_channels() * ConvLayer::kKernel + 1);
  return n + static_cast<std::size_t>(head_weight.size()) + 1;
}

Eigen::VectorXd Model::Flatten() const {
  Eigen::VectorXd p(static_cast<Eigen::Index>(NumParameters()));
  Eigen::Index k = 0;
  for (const ConvLayer &l : layers) {
    for (int o = 0; o < l.out_channels(); ++o)
      for (int i = 0; i < l.in_channels(); ++i)
        for (int t = 0; t < ConvLayer::kKernel; ++t) p[k++] = l.taps[t](o, i);
    for (int o = 0; o < l.out_channels(); ++o) p[k++] = l.bias[o];
  }
  for (Eigen::Index c = 0; c < head_weight.size(); ++c) p[k++] = head_weight[c];
  p[k++] = head_bias;
  return p;
}

void Model::Unflatten(const Eigen::VectorXd &p) {
  if (static_cast<std::size_t>(p.size()) != NumParameters())
    throw Error(ErrorCode::kShape, "parameter vector size mismatch");
  Eigen::Index k = 0;
  for (ConvLayer &l : layers) {
    for (int o = 0; o < l.out_channels(); ++o)
      for (int i = 0; i < l.in_channels(); ++i)
        for (int t = 0; t < ConvLayer::kKernel; ++t) l.taps[t](o, i) = p[k++];
    for (int o = 0; o < l.out_channels(); ++o) l.bias[o] = p[k++];
  }
  for (Eigen::Index c = 0; c < head_weight.size(); ++c) head_weight[c] = p[k++];
  head_bias = p[k++];
}

Model MakeModel(const std::vector<int> &channels, FeatureKind kind,
                int input_dim, uint64_t seed) {
  if (channels.size() < 2 || channels.front() != 1)
    throw Error(ErrorCode::kShape, "channel plan must start at 1 input channel");
  for (int c : channels)
    if (c < 1) throw Error(ErrorCode::kShape, "non-positive channel count");
  Model m;
  m.kind = kind;
  m.input_dim = input_dim;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < channels.size(); ++l) {
    const int in = channels[l], out = channels[l + 1];
    const double bound = std::sqrt(1.0 / (in * ConvLayer::kKernel));
    std::uniform_real_distribution<double> dist(-bound, bound);
    ConvLayer layer;
    for (auto &tap : layer.taps) tap.resize(out, in);
    // Draw in flattened (out, in, tap) order.
    for (int o = 0; o < out; ++o)
      for (int i = 0; i < in; ++i)
        for (auto &tap : layer.taps) tap(o, i) = dist(rng);
    layer.bias = Eigen::VectorXd::Zero(out);
    m.layers.push_back(std::move(layer));
  }
  const int last = channels.back();
  const double bound = std::sqrt(1.0 / last);
  std::uniform_real_distribution<double> dist(-bound, bound);
  m.head_weight.resize(last);
  for (int c = 0; c < last; ++c) m.head_weight[c] = dist(rng);
  m.head_bias = 0.0;
  return m;
}

Model ZerosLike(const Model &model) {
  Model z = model;
  for (ConvLayer &l : z.layers) {
    for (auto &tap : l.taps) tap.setZero();
    l.bias.setZero();
  }
  z.head_weight.setZero();
  z.head_bias = 0.0;
  return z;
}

namespace {

// tanh(x) = sign(x) (1 - e^{-2|x|}) / (1 + e^{-2|x|}).
template <typename Block>
void TanhInPlace(Block &&v) {
  const Eigen::ArrayXXd t = (-2.0 * v.array().abs()).exp();
  v.array() = (1.0 - t) / (1.0 + t) * v.array().sign();
}

double Sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

Eigen::VectorXd Forward(const Model &model, const Matrix &batch,
                        ForwardCache *cache) {
  const int B = static_cast<int>(batch.rows());
  const int L = static_cast<int>(batch.cols());
  if (L <= model.shrink())
    throw Error(ErrorCode::kShape, "input length " + std::to_string(L) +
                                       " too short for " +
                                       std::to_string(model.num_layers()) +
                                       " kernel-2 layers");
  if (model.input_dim != 0 && L != model.input_dim)
    throw Error(ErrorCode::kShape, "model expects length " +
                                       std::to_string(model.input_dim) +
                                       ", got " + std::to_string(L));
  ForwardCache local;
  ForwardCache &c = cache ? *cache : local;
  c.batch = B;
  c.length = L;
  c.act.resize(model.layers.size() + 1);

  const Eigen::Index cols = static_cast<Eigen::Index>(B) * L;
  // Row-major B x L is already item-major with positions contiguous.
  c.act[0] = Eigen::Map<const Eigen::RowVectorXd>(batch.data(), cols);
  if (B == 0) {
    c.prob.resize(0);
    c.pooled.resize(model.head_weight.size(), 0);
    return c.prob;
  }

  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const ConvLayer &layer = model.layers[l];
    const Eigen::MatrixXd &in = c.act[l];
    Eigen::MatrixXd &out = c.act[l + 1];
    out.resize(layer.out_channels(), cols);
    auto valid = out.leftCols(cols - 1);
    valid.noalias() = layer.taps[0] * in.leftCols(cols - 1);
    valid.noalias() += layer.taps[1] * in.rightCols(cols - 1);
    valid.colwise() += layer.bias;
    TanhInPlace(valid);
    out.col(cols - 1).setZero();
  }

  const int positions = L - model.shrink();
  const Eigen::MatrixXd &top = c.act.back();
  c.pooled.resize(top.rows(), B);
  for (int b = 0; b < B; ++b)
    c.pooled.col(b) =
        top.middleCols(static_cast<Eigen::Index>(b) * L, positions).rowwise().mean();
  const Eigen::VectorXd logits =
      (c.pooled.transpose() * model.head_weight).array() + model.head_bias;
  c.prob = logits.unaryExpr(&Sigmoid);
  return c.prob;
}

double BceLoss(std::span<const double> prob, std::span<const double> labels) {
  if (prob.size() != labels.size())
    throw Error(ErrorCode::kShape, "probability/label size mismatch");
  if (prob.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t b = 0; b < prob.size(); ++b) {
    const double p = std::clamp(prob[b], kProbClamp, 1.0 - kProbClamp);
    acc -= labels[b] * std::log(p) + (1.0 - labels[b]) * std::log(1.0 - p);
  }
  return acc / static_cast<double>(prob.size());
}

Model Backward(const Model &model, const ForwardCache &cache,
               std::span<const double> labels) {
  const int B = cache.batch, L = cache.length;
  if (static_cast<int>(labels.size()) != B)
    throw Error(ErrorCode::kShape, "label count does not match batch");
  Model grad = ZerosLike(model);
  if (B == 0) return grad;

  // d loss / d logit. The clamp is flat outside [eps, 1 - eps].
  Eigen::VectorXd dlogit(B);
  for (int b = 0; b < B; ++b) {
    const double p = cache.prob[b];
    const bool inside = p > kProbClamp && p < 1.0 - kProbClamp;
    dlogit[b] = inside ? (p - labels[b]) / B : 0.0;
  }
  grad.head_weight.noalias() = cache.pooled * dlogit;
  grad.head_bias = dlogit.sum();

  const Eigen::Index cols = static_cast<Eigen::Index>(B) * L;
  const int positions = L - model.shrink();
  const Eigen::MatrixXd dpooled = model.head_weight * dlogit.transpose();
  Eigen::MatrixXd dact = Eigen::MatrixXd::Zero(cache.act.back().rows(), cols);
  for (int b = 0; b < B; ++b)
    dact.middleCols(static_cast<Eigen::Index>(b) * L, positions).colwise() =
        dpooled.col(b) / positions;

  for (int l = model.num_layers() - 1; l >= 0; --l) {
    const ConvLayer &layer = model.layers[l];
    const Eigen::MatrixXd &out = cache.act[l + 1];
    const Eigen::MatrixXd &in = cache.act[l];
    // Columns past each item's valid range carry zero gradient, so the
    // cross-item garbage in `in` never contributes.
    const Eigen::MatrixXd dz =
        dact.leftCols(cols - 1).array() *
        (1.0 - out.leftCols(cols - 1).array().square());
    ConvLayer &g = grad.layers[l];
    g.taps[0].noalias() = dz * in.leftCols(cols - 1).transpose();
    g.taps[1].noalias() = dz * in.rightCols(cols - 1).transpose();
    g.bias = dz.rowwise().sum();
    if (l == 0) break;
    dact.setZero(layer.in_channels(), cols);
    dact.leftCols(cols - 1).noalias() += layer.taps[0].transpose() * dz;
    dact.rightCols(cols - 1).noalias() += layer.taps[1].transpose() * dz;
  }
  return grad;
}

void SgdStep(Model *model, const Model &grad, double lr) {
  if (!(lr >= 0.0)) throw Error(ErrorCode::kParameter, "negative learning rate");
  for (std::size_t l = 0; l < model->layers.size(); ++l) {
    ConvLayer &p = model->layers[l];
    const ConvLayer &g = grad.layers[l];
    for (int t = 0; t < ConvLayer::kKernel; ++t) p.taps[t] -= lr * g.taps[t];
    p.bias -= lr * g.bias;
  }
  model->head_weight -= lr * grad.head_weight;
  model->head_bias -= lr * grad.head_bias;
}

}  // namespace ovd
