// ovd/cli.h

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

#ifndef OVD_CLI_H_
#define OVD_CLI_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "ovd/cnn.h"
#include "ovd/features.h"
#include "ovd/mixer.h"

namespace ovd {

/// Synthetic talkers used when `corpus` is "synthetic". An
/// utterances_per_speaker of 0 sizes the corpus from the requested splits.
struct SyntheticCorpusConfig {
  int speakers = 20;
  int utterances_per_speaker = 0;
  double min_seconds = 2.0;
  double max_seconds = 4.0;
};

struct RunConfig {
  std::string corpus = "synthetic";  // or a directory of <speaker>/<utt>.wav
  SyntheticCorpusConfig synthetic;
  SplitSizes sizes;
  FeatureKind feature = FeatureKind::kPykno;
  FrameGrid grid;
  double vad_threshold_db = kVadThresholdDb;
  TrainConfig train;
  std::filesystem::path out = "run";
  uint64_t seed = 1;
  double threshold = 0.5;

  bool synthetic_corpus() const { return corpus == "synthetic"; }
  /// Throws kConfig describing the first violated constraint.
  void Validate() const;
};

/// Parses a JSON config; unknown keys and wrong types are kConfig errors.
/// Missing keys keep their defaults.
RunConfig LoadRunConfig(const std::filesystem::path &path);
RunConfig ParseRunConfig(const std::string &json_text);

/// Parses "train/dev/test" minutes, e.g. "2/1/1".
SplitSizes ParseMinutes(const std::string &spec);

/// Exit status for an error: 2 config, 3 data, 4 compatibility.
int ExitCodeFor(ErrorCode code);

// Output layout under config.out.
std::filesystem::path FeaturePath(const RunConfig &config,
                                  const ManifestEntry &entry);
std::filesystem::path NormalizerPath(const RunConfig &config);
std::filesystem::path ModelDir(const RunConfig &config);
std::filesystem::path EvalDir(const RunConfig &config);

/// Reads one split's features (normalized) and labels.
LabeledFrames LoadSplit(const RunConfig &config, const DatasetManifest &manifest,
                        Split split, const Normalizer &norm);

void CmdSynth(const RunConfig &config);
void CmdFeaturize(const RunConfig &config);
void CmdTrain(const RunConfig &config, bool resume);
/// Returns the process exit status (3 when curves are undefined).
int CmdEval(const RunConfig &config);

}  // namespace ovd

#endif  // OVD_CLI_H_
