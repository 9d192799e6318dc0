// features/normalizer.cc

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

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "ovd/features.h"

namespace ovd {

Matrix Normalizer::Apply(const Matrix &m) const {
  if (m.cols() != mean.size())
    throw Error(ErrorCode::kCompatibility,
                "normalizer dim " + std::to_string(mean.size()) +
                    " does not match features dim " + std::to_string(m.cols()));
  return ((m.rowwise() - mean.transpose()).array().rowwise() /
          stddev.transpose().array())
      .matrix();
}

Matrix Normalizer::Unapply(const Matrix &m) const {
  if (m.cols() != mean.size())
    throw Error(ErrorCode::kCompatibility, "normalizer dim mismatch");
  return ((m.array().rowwise() * stddev.transpose().array()).matrix().rowwise() +
          mean.transpose());
}

NormalizerAccumulator::NormalizerAccumulator(FeatureKind kind)
    : kind_(kind),
      mean_(Vector::Zero(FeatureDim(kind))),
      m2_(Vector::Zero(FeatureDim(kind))) {}

void NormalizerAccumulator::Add(const FeatureMatrix &fm) {
  if (fm.kind != kind_)
    throw Error(ErrorCode::kCompatibility, "feature kind mismatch");
  const auto n = static_cast<double>(fm.frames());
  if (n == 0) return;
  const Vector batch_mean = fm.data.colwise().mean().transpose();
  const Vector batch_m2 =
      (fm.data.rowwise() - batch_mean.transpose()).colwise().squaredNorm();
  const double total = count_ + n;
  const Vector delta = batch_mean - mean_;
  mean_ += delta * (n / total);
  m2_ += batch_m2 + delta.cwiseProduct(delta) * (count_ * n / total);
  count_ = total;
}

Normalizer NormalizerAccumulator::Finish() const {
  if (count_ == 0)
    throw Error(ErrorCode::kData, "cannot fit a normalizer on no frames");
  Normalizer norm;
  norm.kind = kind_;
  norm.mean = mean_;
  norm.stddev = (m2_ / count_).cwiseSqrt().cwiseMax(Normalizer::kStdFloor);
  return norm;
}

Normalizer FitNormalizer(std::span<const FeatureMatrix> train_features) {
  if (train_features.empty())
    throw Error(ErrorCode::kData, "cannot fit a normalizer on no frames");
  NormalizerAccumulator acc(train_features.front().kind);
  for (const FeatureMatrix &fm : train_features) acc.Add(fm);
  return acc.Finish();
}

void SaveNormalizer(const Normalizer &norm, const std::filesystem::path &path) {
  nlohmann::ordered_json j;
  j["kind"] = FeatureName(norm.kind);
  j["dim"] = norm.mean.size();
  j["mean"] = std::vector<double>(norm.mean.begin(), norm.mean.end());
  j["std"] = std::vector<double>(norm.stddev.begin(), norm.stddev.end());
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  os << j.dump() << '\n';
}

Normalizer LoadNormalizer(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    const auto j = nlohmann::json::parse(is);
    const auto kind = ParseFeatureKind(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::kFormat, "unknown feature kind");
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto sd = j.at("std").get<std::vector<double>>();
    const auto dim = static_cast<std::size_t>(FeatureDim(*kind));
    if (mean.size() != dim || sd.size() != dim)
      throw Error(ErrorCode::kFormat, "normalizer dim does not match kind");
    Normalizer norm;
    norm.kind = *kind;
    norm.mean = Eigen::Map<const Vector>(mean.data(), mean.size());
    norm.stddev = Eigen::Map<const Vector>(sd.data(), sd.size());
    return norm;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

}  // namespace ovd
