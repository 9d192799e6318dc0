// ovd/metrics.h

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

#ifndef OVD_METRICS_H_
#define OVD_METRICS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "ovd/mixer.h"

namespace ovd {

/// Positive class is overlap.
struct ConfusionMatrix {
  uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  uint64_t total() const { return tp + fp + fn + tn; }
  ConfusionMatrix &operator+=(const ConfusionMatrix &o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
};

ConfusionMatrix Confusion(std::span<const FrameLabel> pred,
                          std::span<const FrameLabel> truth);

// Each returns nullopt when its denominator is zero.
std::optional<double> Accuracy(const ConfusionMatrix &cm);
std::optional<double> Precision(const ConfusionMatrix &cm);
std::optional<double> Recall(const ConfusionMatrix &cm);
std::optional<double> FScore(const ConfusionMatrix &cm);
/// Harmonic mean; nullopt unless p + r > 0.
std::optional<double> FScore(double precision, double recall);

/// ROC: x = false-positive rate, y = true-positive rate.
/// PR:  x = recall, y = precision.
struct CurvePoint {
  double threshold = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// One point per distinct score (predict overlap iff score >= threshold),
/// ordered by decreasing threshold, preceded by (0, 0) at threshold +inf.
/// Throws kData unless truth holds both classes.
std::vector<CurvePoint> RocCurve(std::span<const double> scores,
                                 std::span<const FrameLabel> truth);
/// Trapezoidal area under an ROC curve.
double Auc(std::span<const CurvePoint> roc);

/// One point per distinct score, decreasing threshold. Throws kData when
/// truth has no positives.
std::vector<CurvePoint> PrCurve(std::span<const double> scores,
                                std::span<const FrameLabel> truth);
/// Sum over points of (recall step) x precision.
double AveragePrecision(std::span<const CurvePoint> pr);

enum class CurveKind { kRoc, kPr };

/// "# roc" or "# pr", then "threshold,x,y" rows.
void WriteCurveCsv(std::span<const CurvePoint> curve, CurveKind kind,
                   const std::filesystem::path &path);

}  // namespace ovd

#endif  // OVD_METRICS_H_
