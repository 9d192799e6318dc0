// ovd/mixer.h

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

#ifndef OVD_MIXER_H_
#define OVD_MIXER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ovd/audio_io.h"

namespace ovd {

enum class FrameLabel : uint8_t { kSingle = 0, kOverlap = 1 };

constexpr double kVadThresholdDb = -40.0;
constexpr double kMaxSirDb = 5.0;

/// Half-open sample interval [begin, end).
struct SampleRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end > begin ? end - begin : 0; }
};

struct MixtureSpec {
  std::string target_key;
  std::string interferer_key;
  double sir_db = 0.0;
  std::size_t offset_samples = 0;
  uint64_t seed = 0;
};

struct LabeledMixture {
  AudioClip clip;
  std::vector<FrameLabel> labels;
  FrameGrid grid;
  double realized_sir_db = 0.0;
  double gain = 1.0;            // applied to the interferer before summing
  double rescale_factor = 1.0;  // global 1/peak when the sum exceeded 1
  SampleRange overlap;
};

/// Mean squared amplitude over `range`.
double MeanPower(std::span<const double> x, SampleRange range);

/// Gain g with 10 log10(P_target / (g^2 P_interferer)) = sir_db, powers taken
/// over `region`. Both signals are in mixture coordinates (the interferer is
/// already placed). Throws kDegenerateSource if either region is silent.
double ScaleToSir(std::span<const double> target,
                  std::span<const double> interferer, double sir_db,
                  SampleRange region);

/// Per-source energy VAD; a frame is overlap iff both sources are active,
/// where active means frame energy above `vad_threshold_db` relative to that
/// source's loudest frame.
std::vector<FrameLabel> LabelFrames(std::span<const double> target,
                                    std::span<const double> interferer,
                                    const FrameGrid &grid,
                                    double vad_threshold_db = kVadThresholdDb);

/// Adds the interferer to the target starting at spec.offset_samples, scaled
/// to spec.sir_db over the overlapping samples.
LabeledMixture MixAtOffset(const AudioClip &target, const AudioClip &interferer,
                           const MixtureSpec &spec, const FrameGrid &grid = {},
                           double vad_threshold_db = kVadThresholdDb);

/// Voice-like test source: a vibrato harmonic series with a formant tilt,
/// low-passed noise and syllable-rate amplitude modulation. Peak is 0.9.
AudioClip SynthSpeechlike(double duration_s, double f0_hz, uint64_t seed);

/// Label files hold one `O` or `S` per line, one line per frame.
void WriteLabels(std::span<const FrameLabel> labels,
                 const std::filesystem::path &path);
std::vector<FrameLabel> ReadLabels(const std::filesystem::path &path);

// ---------------------------------------------------------------------------
// Corpora and dataset manifests

struct Utterance {
  std::string key;
  std::string speaker;
  std::size_t num_samples = 0;
};

struct Corpus {
  std::map<std::string, std::vector<Utterance>> speakers;
  std::function<AudioClip(const Utterance &)> load;

  const Utterance &Find(const std::string &key) const;
  double TotalSeconds() const;
};

/// `num_speakers` synthetic talkers with distinct f0 spread over 140-260 Hz,
/// so no two talkers sit an octave apart.
Corpus SyntheticCorpus(int num_speakers, int utterances_per_speaker,
                       double min_seconds, double max_seconds, uint64_t seed);

/// <root>/<speaker>/<utterance>.wav; keys are "<speaker>/<utterance>".
Corpus WavCorpus(const std::filesystem::path &root);

enum class Split : uint8_t { kTrain = 0, kDev = 1, kTest = 2 };
const char *SplitName(Split split);
Split ParseSplit(const std::string &name);

struct SplitSizes {
  double train_seconds = 20 * 3600.0;
  double dev_seconds = 3 * 3600.0;
  double test_seconds = 2 * 3600.0;
};

struct ManifestEntry {
  std::string mix_path;    // relative to the manifest directory
  std::string label_path;
  Split split = Split::kTrain;
  MixtureSpec spec;
  double rescale_factor = 1.0;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::map<Split, std::vector<std::string>> speaker_partition;
};

/// Draws the speaker partition and every MixtureSpec without touching
/// audio. Test speakers never appear in train or dev; train and dev share the
/// remaining speakers but not target utterances. Throws kCapacity when a
/// split cannot be filled.
DatasetManifest PlanDataset(const Corpus &corpus, const SplitSizes &sizes,
                            uint64_t seed);

/// PlanDataset, then renders every mixture and label file under `out_dir` and
/// writes the manifest there.
DatasetManifest GenerateDataset(const Corpus &corpus, const SplitSizes &sizes,
                                uint64_t seed,
                                const std::filesystem::path &out_dir,
                                const FrameGrid &grid = {},
                                double vad_threshold_db = kVadThresholdDb);

constexpr const char *kManifestFile = "manifest.jsonl";
constexpr const char *kSpeakersFile = "speakers.json";

void WriteManifest(const DatasetManifest &manifest,
                   const std::filesystem::path &dir);
DatasetManifest ReadManifest(const std::filesystem::path &dir);

}  // namespace ovd

#endif  // OVD_MIXER_H_
