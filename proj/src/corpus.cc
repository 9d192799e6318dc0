// corpus.cc

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
#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include "json.hpp"
#include "ovd/mixer.h"

namespace ovd {

namespace fs = std::filesystem;

const Utterance &Corpus::Find(const std::string &key) const {
  for (const auto &[speaker, utts] : speakers)
    for (const Utterance &u : utts)
      if (u.key == key) return u;
  throw Error(ErrorCode::kData, "utterance not in corpus: " + key);
}

double Corpus::TotalSeconds() const {
  double total = 0.0;
  for (const auto &[speaker, utts] : speakers)
    for (const Utterance &u : utts)
      total += static_cast<double>(u.num_samples) / kSampleRate;
  return total;
}

Corpus SyntheticCorpus(int num_speakers, int utterances_per_speaker,
                       double min_seconds, double max_seconds, uint64_t seed) {
  if (num_speakers < 1 || utterances_per_speaker < 1 || !(min_seconds > 0.0) ||
      !(max_seconds >= min_seconds))
    throw Error(ErrorCode::kParameter, "invalid synthetic corpus parameters");
  std::mt19937_64 rng(DeriveSeed(seed, "synthetic-corpus"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  struct Source {
    double f0_hz;
    double seconds;
    uint64_t seed;
  };
  auto sources = std::make_shared<std::map<std::string, Source>>();
  Corpus corpus;
  for (int s = 0; s < num_speakers; ++s) {
    char name[32];
    std::snprintf(name, sizeof(name), "spk%02d", s);
    // Evenly spread talkers with a little jitter inside each slot.
    const double f0 = 140.0 + 120.0 * (s + 0.25 + 0.5 * unit(rng)) / num_speakers;
    auto &utts = corpus.speakers[name];
    for (int u = 0; u < utterances_per_speaker; ++u) {
      char key[48];
      std::snprintf(key, sizeof(key), "%s/u%03d", name, u);
      const double seconds = min_seconds + (max_seconds - min_seconds) * unit(rng);
      const auto samples =
          static_cast<std::size_t>(std::llround(seconds * kSampleRate));
      (*sources)[key] = {f0, seconds, DeriveSeed(seed, key)};
      utts.push_back({key, name, samples});
    }
  }
  corpus.load = [sources](const Utterance &u) {
    const Source &src = sources->at(u.key);
    return SynthSpeechlike(src.seconds, src.f0_hz, src.seed);
  };
  return corpus;
}

Corpus WavCorpus(const fs::path &root) {
  if (!fs::is_directory(root))
    throw Error(ErrorCode::kIo, "corpus root is not a directory: " + root.string());
  Corpus corpus;
  std::vector<fs::path> speaker_dirs;
  for (const auto &entry : fs::directory_iterator(root))
    if (entry.is_directory()) speaker_dirs.push_back(entry.path());
  std::sort(speaker_dirs.begin(), speaker_dirs.end());
  for (const fs::path &dir : speaker_dirs) {
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".wav")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) continue;
    const std::string speaker = dir.filename().string();
    auto &utts = corpus.speakers[speaker];
    for (const fs::path &file : files) {
      const AudioClip clip = ReadWav(file);
      utts.push_back(
          {speaker + "/" + file.stem().string(), speaker, clip.size()});
    }
  }
  corpus.load = [root](const Utterance &u) {
    return ReadWav(root / (u.key + ".wav"));
  };
  return corpus;
}

const char *SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "unknown";
}

Split ParseSplit(const std::string &name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  throw Error(ErrorCode::kFormat, "unknown split '" + name + "'");
}

namespace {

constexpr Split kSplits[] = {Split::kTrain, Split::kDev, Split::kTest};

std::string EntryStem(Split split, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s/%06zu", SplitName(split), index);
  return buf;
}

}  // namespace

DatasetManifest PlanDataset(const Corpus &corpus, const SplitSizes &sizes,
                            uint64_t seed) {
  if (corpus.speakers.size() < 3)
    throw Error(ErrorCode::kCapacity, "need at least 3 speakers, corpus has " +
                                          std::to_string(corpus.speakers.size()));
  for (const auto &[speaker, utts] : corpus.speakers)
    for (const Utterance &u : utts)
      if (u.num_samples == 0)
        throw Error(ErrorCode::kData, "empty utterance " + u.key);
  if (sizes.train_seconds < 0 || sizes.dev_seconds < 0 || sizes.test_seconds < 0)
    throw Error(ErrorCode::kParameter, "negative split size");

  std::vector<std::string> speakers;
  for (const auto &[speaker, utts] : corpus.speakers) speakers.push_back(speaker);
  std::mt19937_64 rng(DeriveSeed(seed, "speaker-partition"));
  std::shuffle(speakers.begin(), speakers.end(), rng);

  // Mixing needs two distinct talkers inside every populated split.
  const int n = static_cast<int>(speakers.size());
  const double total =
      sizes.train_seconds + sizes.dev_seconds + sizes.test_seconds;
  const bool want_test = sizes.test_seconds > 0.0;
  const bool want_train_dev = sizes.train_seconds + sizes.dev_seconds > 0.0;
  int n_test = 0;
  if (want_test && !want_train_dev) {
    n_test = n;
  } else if (want_test) {
    n_test = static_cast<int>(std::lround(n * sizes.test_seconds / total));
    n_test = std::clamp(n_test, 2, std::max(2, n - 2));
  }
  if ((want_test && n_test < 2) || (want_train_dev && n - n_test < 2))
    throw Error(ErrorCode::kCapacity,
                std::to_string(n) + " speakers cannot give both the test split "
                "and the train/dev splits two talkers each");

  DatasetManifest manifest;
  auto &test_spk = manifest.speaker_partition[Split::kTest];
  auto &train_spk = manifest.speaker_partition[Split::kTrain];
  test_spk.assign(speakers.begin(), speakers.begin() + n_test);
  train_spk.assign(speakers.begin() + n_test, speakers.end());
  std::sort(test_spk.begin(), test_spk.end());
  std::sort(train_spk.begin(), train_spk.end());
  manifest.speaker_partition[Split::kDev] = train_spk;

  auto pool_of = [&](const std::vector<std::string> &spk, std::string_view tag) {
    std::vector<const Utterance *> pool;
    for (const std::string &s : spk)
      for (const Utterance &u : corpus.speakers.at(s)) pool.push_back(&u);
    std::mt19937_64 pool_rng(DeriveSeed(seed, tag));
    std::shuffle(pool.begin(), pool.end(), pool_rng);
    return pool;
  };
  const std::vector<const Utterance *> shared_pool = pool_of(train_spk, "pool/train-dev");
  const std::vector<const Utterance *> test_pool = pool_of(test_spk, "pool/test");
  std::size_t shared_next = 0;

  for (Split split : kSplits) {
    const double want = split == Split::kTrain ? sizes.train_seconds
                        : split == Split::kDev ? sizes.dev_seconds
                                               : sizes.test_seconds;
    if (want <= 0.0) continue;
    const bool is_test = split == Split::kTest;
    const auto &pool = is_test ? test_pool : shared_pool;
    const auto &split_spk = manifest.speaker_partition[split];
    std::size_t next = is_test ? 0 : shared_next;
    const uint64_t split_seed = DeriveSeed(seed, SplitName(split));

    double have = 0.0;
    std::size_t index = 0;
    while (have < want) {
      if (next >= pool.size()) {
        std::ostringstream msg;
        msg << "split " << SplitName(split) << " needs " << want
            << " s but ran out of target utterances after " << have << " s ("
            << pool.size() << " utterances from " << split_spk.size()
            << " speakers, " << corpus.TotalSeconds() << " s in corpus)";
        throw Error(ErrorCode::kCapacity, msg.str());
      }
      const Utterance &target = *pool[next++];
      ManifestEntry e;
      e.split = split;
      e.spec.seed = DeriveSeed(split_seed, static_cast<uint64_t>(index));
      std::mt19937_64 mix_rng(e.spec.seed);

      std::vector<const std::string *> others;
      for (const std::string &s : split_spk)
        if (s != target.speaker) others.push_back(&s);
      const std::string &other =
          *others[std::uniform_int_distribution<std::size_t>(0, others.size() - 1)(mix_rng)];
      const auto &other_utts = corpus.speakers.at(other);
      const Utterance &interf = other_utts[std::uniform_int_distribution<std::size_t>(
          0, other_utts.size() - 1)(mix_rng)];

      e.spec.target_key = target.key;
      e.spec.interferer_key = interf.key;
      e.spec.sir_db = std::uniform_real_distribution<double>(0.0, kMaxSirDb)(mix_rng);
      e.spec.offset_samples = std::uniform_int_distribution<std::size_t>(
          0, target.num_samples - 1)(mix_rng);
      const std::string stem = EntryStem(split, index);
      e.mix_path = "audio/" + stem + ".wav";
      e.label_path = "labels/" + stem + ".lab";
      have += static_cast<double>(std::max(target.num_samples,
                                           e.spec.offset_samples + interf.num_samples)) /
              kSampleRate;
      manifest.entries.push_back(std::move(e));
      ++index;
    }
    if (!is_test) shared_next = next;
  }
  return manifest;
}

DatasetManifest GenerateDataset(const Corpus &corpus, const SplitSizes &sizes,
                                uint64_t seed, const fs::path &out_dir,
                                const FrameGrid &grid, double vad_threshold_db) {
  DatasetManifest manifest = PlanDataset(corpus, sizes, seed);
  for (Split split : kSplits) {
    fs::create_directories(out_dir / "audio" / SplitName(split));
    fs::create_directories(out_dir / "labels" / SplitName(split));
  }
  for (ManifestEntry &e : manifest.entries) {
    const AudioClip target = corpus.load(corpus.Find(e.spec.target_key));
    const AudioClip interf = corpus.load(corpus.Find(e.spec.interferer_key));
    const LabeledMixture mix =
        MixAtOffset(target, interf, e.spec, grid, vad_threshold_db);
    e.rescale_factor = mix.rescale_factor;
    WriteWav(mix.clip, out_dir / e.mix_path);
    WriteLabels(mix.labels, out_dir / e.label_path);
  }
  WriteManifest(manifest, out_dir);
  return manifest;
}

void WriteManifest(const DatasetManifest &manifest, const fs::path &dir) {
  fs::create_directories(dir);
  std::ofstream os(dir / kManifestFile, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot write manifest in " + dir.string());
  for (const ManifestEntry &e : manifest.entries) {
    nlohmann::ordered_json j;
    j["mix_path"] = e.mix_path;
    j["label_path"] = e.label_path;
    j["split"] = SplitName(e.split);
    j["target_key"] = e.spec.target_key;
    j["interferer_key"] = e.spec.interferer_key;
    j["sir_db"] = e.spec.sir_db;
    j["offset_samples"] = e.spec.offset_samples;
    j["seed"] = e.spec.seed;
    j["rescale_factor"] = e.rescale_factor;
    os << j.dump() << '\n';
  }
  nlohmann::ordered_json part;
  for (Split split : kSplits) {
    auto it = manifest.speaker_partition.find(split);
    part[SplitName(split)] =
        it == manifest.speaker_partition.end() ? std::vector<std::string>{} : it->second;
  }
  std::ofstream ps(dir / kSpeakersFile, std::ios::binary);
  if (!ps) throw Error(ErrorCode::kIo, "cannot write speaker partition");
  ps << part.dump() << '\n';
}

DatasetManifest ReadManifest(const fs::path &dir) {
  std::ifstream is(dir / kManifestFile, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "no manifest in " + dir.string());
  DatasetManifest manifest;
  std::string line;
  std::size_t line_no = 0;
  try {
    while (std::getline(is, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      ManifestEntry e;
      e.mix_path = j.at("mix_path").get<std::string>();
      e.label_path = j.at("label_path").get<std::string>();
      e.split = ParseSplit(j.at("split").get<std::string>());
      e.spec.target_key = j.at("target_key").get<std::string>();
      e.spec.interferer_key = j.at("interferer_key").get<std::string>();
      e.spec.sir_db = j.at("sir_db").get<double>();
      e.spec.offset_samples = j.at("offset_samples").get<std::size_t>();
      e.spec.seed = j.at("seed").get<uint64_t>();
      e.rescale_factor = j.at("rescale_factor").get<double>();
      manifest.entries.push_back(std::move(e));
    }
    std::ifstream ps(dir / kSpeakersFile, std::ios::binary);
    if (ps) {
      const auto part = nlohmann::json::parse(ps);
      for (Split split : kSplits)
        if (part.contains(SplitName(split)))
          manifest.speaker_partition[split] =
              part.at(SplitName(split)).get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kFormat, (dir / kManifestFile).string() + ":" +
                                        std::to_string(line_no) + ": " + e.what());
  }
  return manifest;
}

}  // namespace ovd
