// metrics.cc

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

#include "ovd/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

namespace ovd {

ConfusionMatrix Confusion(std::span<const FrameLabel> pred,
                          std::span<const FrameLabel> truth) {
  if (pred.size() != truth.size())
    throw Error(ErrorCode::kShape, "prediction/truth length mismatch: " +
                                       std::to_string(pred.size()) + " vs " +
                                       std::to_string(truth.size()));
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] == FrameLabel::kOverlap;
    const bool t = truth[i] == FrameLabel::kOverlap;
    if (p && t)
      ++cm.tp;
    else if (p)
      ++cm.fp;
    else if (t)
      ++cm.fn;
    else
      ++cm.tn;
  }
  return cm;
}

namespace {

std::optional<double> Ratio(uint64_t num, uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

// Indices sorted by decreasing score; ties stay adjacent.
std::vector<std::size_t> RankByScore(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

// Calls emit(threshold, tp, fp) once per distinct score, high to low.
template <typename Emit>
void SweepThresholds(std::span<const double> scores,
                     std::span<const FrameLabel> truth, Emit emit) {
  const std::vector<std::size_t> idx = RankByScore(scores);
  uint64_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (truth[idx[k]] == FrameLabel::kOverlap)
      ++tp;
    else
      ++fp;
    if (k + 1 == idx.size() || scores[idx[k + 1]] != scores[idx[k]])
      emit(scores[idx[k]], tp, fp);
  }
}

void CheckScores(std::span<const double> scores, std::span<const FrameLabel> truth) {
  if (scores.size() != truth.size())
    throw Error(ErrorCode::kShape, "score/truth length mismatch");
  for (double s : scores)
    if (std::isnan(s)) throw Error(ErrorCode::kData, "NaN score");
}

}  // namespace

std::optional<double> Accuracy(const ConfusionMatrix &cm) {
  return Ratio(cm.tp + cm.tn, cm.total());
}

std::optional<double> Precision(const ConfusionMatrix &cm) {
  return Ratio(cm.tp, cm.tp + cm.fp);
}

std::optional<double> Recall(const ConfusionMatrix &cm) {
  return Ratio(cm.tp, cm.tp + cm.fn);
}

std::optional<double> FScore(double precision, double recall) {
  if (!(precision + recall > 0.0)) return std::nullopt;
  return 2.0 * precision * recall / (precision + recall);
}

std::optional<double> FScore(const ConfusionMatrix &cm) {
  const auto p = Precision(cm);
  const auto r = Recall(cm);
  if (!p || !r) return std::nullopt;
  return FScore(*p, *r);
}

std::vector<CurvePoint> RocCurve(std::span<const double> scores,
                                 std::span<const FrameLabel> truth) {
  CheckScores(scores, truth);
  const auto pos = static_cast<uint64_t>(
      std::count(truth.begin(), truth.end(), FrameLabel::kOverlap));
  const uint64_t neg = truth.size() - pos;
  if (pos == 0 || neg == 0)
    throw Error(ErrorCode::kData, "ROC needs both overlap and single frames");
  std::vector<CurvePoint> curve;
  curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  SweepThresholds(scores, truth, [&](double thr, uint64_t tp, uint64_t fp) {
    curve.push_back({thr, static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
  });
  return curve;
}

double Auc(std::span<const CurvePoint> roc) {
  double area = 0.0;
  for (std::size_t k = 1; k < roc.size(); ++k)
    area += (roc[k].x - roc[k - 1].x) * 0.5 * (roc[k].y + roc[k - 1].y);
  return area;
}

std::vector<CurvePoint> PrCurve(std::span<const double> scores,
                                std::span<const FrameLabel> truth) {
  CheckScores(scores, truth);
  const auto pos = static_cast<uint64_t>(
      std::count(truth.begin(), truth.end(), FrameLabel::kOverlap));
  if (pos == 0) throw Error(ErrorCode::kData, "PR curve needs overlap frames");
  std::vector<CurvePoint> curve;
  SweepThresholds(scores, truth, [&](double thr, uint64_t tp, uint64_t fp) {
    curve.push_back({thr, static_cast<double>(tp) / pos,
                     static_cast<double>(tp) / static_cast<double>(tp + fp)});
  });
  return curve;
}

double AveragePrecision(std::span<const CurvePoint> pr) {
  double ap = 0.0, prev_recall = 0.0;
  for (const CurvePoint &p : pr) {
    ap += (p.x - prev_recall) * p.y;
    prev_recall = p.x;
  }
  return ap;
}

void WriteCurveCsv(std::span<const CurvePoint> curve, CurveKind kind,
                   const std::filesystem::path &path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  os << (kind == CurveKind::kRoc ? "# roc\n" : "# pr\n") << "threshold,x,y\n";
  char buf[128];
  for (const CurvePoint &p : curve) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.threshold, p.x, p.y);
    os << buf;
  }
  if (!os) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace ovd
