// cli/config.cc

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

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ovd/cli.h"

namespace ovd {

namespace {

using nlohmann::json;

void RejectUnknown(const json &obj, const std::set<std::string> &allowed,
                   const std::string &where) {
  if (!obj.is_object()) throw Error(ErrorCode::kConfig, where + " must be an object");
  for (const auto &[key, value] : obj.items())
    if (!allowed.count(key))
      throw Error(ErrorCode::kConfig, "unknown key '" + key + "' in " + where);
}

template <typename T>
void Read(const json &obj, const char *key, T *out, const std::string &where) {
  if (!obj.contains(key)) return;
  const json &v = obj.at(key);
  try {
    if constexpr (std::is_same_v<T, int> || std::is_same_v<T, uint64_t>) {
      if (!v.is_number_integer())
        throw Error(ErrorCode::kConfig, where + "." + key + " must be an integer");
      if constexpr (std::is_same_v<T, uint64_t>)
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<int64_t>() < 0)
          throw Error(ErrorCode::kConfig, where + "." + key + " must be >= 0");
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number())
        throw Error(ErrorCode::kConfig, where + "." + key + " must be a number");
    } else {
      if (!v.is_string())
        throw Error(ErrorCode::kConfig, where + "." + key + " must be a string");
    }
    *out = v.get<T>();
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kConfig, where + "." + key + ": " + e.what());
  }
}

}  // namespace

void RunConfig::Validate() const {
  auto fail = [](const std::string &msg) { throw Error(ErrorCode::kConfig, msg); };
  if (corpus.empty()) fail("corpus must be 'synthetic' or a directory");
  if (!synthetic_corpus() && !std::filesystem::is_directory(corpus))
    fail("corpus directory does not exist: " + corpus);
  if (synthetic.speakers < 3) fail("synthetic.speakers must be >= 3");
  if (synthetic.utterances_per_speaker < 0)
    fail("synthetic.utterances_per_speaker must be >= 0");
  if (!(synthetic.min_seconds > 0.0) || !(synthetic.max_seconds >= synthetic.min_seconds))
    fail("synthetic durations need 0 < min_seconds <= max_seconds");
  if (!(sizes.train_seconds >= 0.0) || !(sizes.dev_seconds >= 0.0) ||
      !(sizes.test_seconds >= 0.0))
    fail("split sizes must be >= 0");
  if (grid.frame_len <= 0 || grid.hop <= 0 || grid.hop > grid.frame_len)
    fail("need 0 < hop <= frame_len");
  if (grid.frame_len > kFftSize) fail("frame_len must not exceed the 512-point FFT");
  if (!(vad_threshold_db < 0.0)) fail("vad_threshold_db must be negative");
  try {
    train.Check();
  } catch (const Error &e) {
    fail(std::string("train: ") + e.what());
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) fail("threshold must lie in [0, 1]");
  if (out.empty()) fail("out must be set");
}

RunConfig ParseRunConfig(const std::string &json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  RejectUnknown(root,
                {"corpus", "synthetic", "split_minutes", "feature", "frame_len", "hop",
                 "vad_threshold_db", "train", "out", "seed", "threshold"},
                "config");
  RunConfig c;
  Read(root, "corpus", &c.corpus, "config");
  if (root.contains("synthetic")) {
    const json &s = root.at("synthetic");
    RejectUnknown(s, {"speakers", "utterances_per_speaker", "min_seconds", "max_seconds"},
                  "synthetic");
    Read(s, "speakers", &c.synthetic.speakers, "synthetic");
    Read(s, "utterances_per_speaker", &c.synthetic.utterances_per_speaker, "synthetic");
    Read(s, "min_seconds", &c.synthetic.min_seconds, "synthetic");
    Read(s, "max_seconds", &c.synthetic.max_seconds, "synthetic");
  }
  if (root.contains("split_minutes")) {
    const json &s = root.at("split_minutes");
    RejectUnknown(s, {"train", "dev", "test"}, "split_minutes");
    double train = c.sizes.train_seconds / 60, dev = c.sizes.dev_seconds / 60,
           test = c.sizes.test_seconds / 60;
    Read(s, "train", &train, "split_minutes");
    Read(s, "dev", &dev, "split_minutes");
    Read(s, "test", &test, "split_minutes");
    c.sizes = {train * 60, dev * 60, test * 60};
  }
  if (root.contains("feature")) {
    std::string name;
    Read(root, "feature", &name, "config");
    const auto kind = ParseFeatureKind(name);
    if (!kind) throw Error(ErrorCode::kConfig, "unknown feature '" + name + "'");
    c.feature = *kind;
  }
  Read(root, "frame_len", &c.grid.frame_len, "config");
  Read(root, "hop", &c.grid.hop, "config");
  Read(root, "vad_threshold_db", &c.vad_threshold_db, "config");
  if (root.contains("train")) {
    const json &t = root.at("train");
    RejectUnknown(t, {"epochs", "batch_size", "learning_rate", "plateau_patience",
                      "lr_factor"},
                  "train");
    Read(t, "epochs", &c.train.epochs, "train");
    Read(t, "batch_size", &c.train.batch_size, "train");
    Read(t, "learning_rate", &c.train.learning_rate, "train");
    Read(t, "plateau_patience", &c.train.plateau_patience, "train");
    Read(t, "lr_factor", &c.train.lr_factor, "train");
  }
  std::string out = c.out.string();
  Read(root, "out", &out, "config");
  c.out = out;
  Read(root, "seed", &c.seed, "config");
  Read(root, "threshold", &c.threshold, "config");
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kConfig, "cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ParseRunConfig(ss.str());
}

SplitSizes ParseMinutes(const std::string &spec) {
  std::stringstream ss(spec);
  std::string part;
  double v[3];
  int n = 0;
  while (std::getline(ss, part, '/')) {
    if (n == 3) throw Error(ErrorCode::kConfig, "--minutes takes train/dev/test");
    try {
      std::size_t used = 0;
      v[n] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception &) {
      throw Error(ErrorCode::kConfig, "bad minutes value '" + part + "'");
    }
    if (!(v[n] >= 0.0)) throw Error(ErrorCode::kConfig, "minutes must be >= 0");
    ++n;
  }
  if (n != 3) throw Error(ErrorCode::kConfig, "--minutes takes train/dev/test");
  return {v[0] * 60, v[1] * 60, v[2] * 60};
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kParameter:
      return 2;
    case ErrorCode::kCompatibility:
    case ErrorCode::kChecksum:
      return 4;
    default:
      return 3;
  }
}

}  // namespace ovd
