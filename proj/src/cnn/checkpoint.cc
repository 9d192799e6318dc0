// cnn/checkpoint.cc

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

// Layout (all integers little-endian):
//   "OVL1" | u32 version | u8 kind | u32 input_dim | u32 num_layers
//   | num_layers x (u32 in, u32 out, u32 kernel)
//   | per layer: f64 weights in (out, in, tap) order, f64 bias[out]
//   | u32 head_in | f64 head_weight[head_in] | f64 head_bias
//   | u32 epochs_done | f64 lr | f64 scheduler_best | u32 scheduler_misses
//   | f64 best_dev_loss | u32 crc32 of everything before it

#include <bit>
#include <cstring>
#include <fstream>

#include <zlib.h>

#include "ovd/cnn.h"

namespace ovd {

namespace {

constexpr uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoints are written in native little-endian order");

class Writer {
 public:
  template <typename T>
  void Put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    bytes_.append(buf, sizeof(T));
  }
  std::string &bytes() { return bytes_; }

 private:
  std::string bytes_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}
  template <typename T>
  T Get() {
    if (pos_ + sizeof(T) > bytes_.size())
      throw Error(ErrorCode::kChecksum, "checkpoint truncated");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

uint32_t Crc(std::string_view bytes) {
  return static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef *>(bytes.data()),
            static_cast<uInt>(bytes.size())));
}

}  // namespace

void SaveCheckpoint(const Model &model, const CheckpointInfo &info,
                    const std::filesystem::path &path) {
  Writer w;
  w.bytes() = "OVL1";
  w.Put<uint32_t>(kVersion);
  w.Put<uint8_t>(static_cast<uint8_t>(model.kind));
  w.Put<uint32_t>(static_cast<uint32_t>(model.input_dim));
  w.Put<uint32_t>(static_cast<uint32_t>(model.layers.size()));
  for (const ConvLayer &l : model.layers) {
    w.Put<uint32_t>(static_cast<uint32_t>(l.in_channels()));
    w.Put<uint32_t>(static_cast<uint32_t>(l.out_channels()));
    w.Put<uint32_t>(ConvLayer::kKernel);
  }
  for (const ConvLayer &l : model.layers) {
    for (int o = 0; o < l.out_channels(); ++o)
      for (int i = 0; i < l.in_channels(); ++i)
        for (int t = 0; t < ConvLayer::kKernel; ++t) w.Put<double>(l.taps[t](o, i));
    for (int o = 0; o < l.out_channels(); ++o) w.Put<double>(l.bias[o]);
  }
  w.Put<uint32_t>(static_cast<uint32_t>(model.head_weight.size()));
  for (double v : model.head_weight) w.Put<double>(v);
  w.Put<double>(model.head_bias);
  w.Put<uint32_t>(static_cast<uint32_t>(info.epochs_done));
  w.Put<double>(info.learning_rate);
  w.Put<double>(info.scheduler_best);
  w.Put<uint32_t>(static_cast<uint32_t>(info.scheduler_misses));
  w.Put<double>(info.best_dev_loss);
  w.Put<uint32_t>(Crc(w.bytes()));

  // Written beside the target, then renamed into place.
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    os.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
    if (!os) throw Error(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Model LoadCheckpoint(const std::filesystem::path &path, CheckpointInfo *info) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(is)),
                          std::istreambuf_iterator<char>());
  if (bytes.size() < 8 || bytes.compare(0, 4, "OVL1") != 0)
    throw Error(ErrorCode::kChecksum, path.string() + ": not a checkpoint");
  const std::string_view body(bytes.data(), bytes.size() - 4);
  uint32_t stored;
  std::memcpy(&stored, bytes.data() + body.size(), 4);
  if (Crc(body) != stored)
    throw Error(ErrorCode::kChecksum, path.string() + ": CRC mismatch");

  Reader r(body);
  for (int i = 0; i < 4; ++i) r.Get<char>();
  if (r.Get<uint32_t>() != kVersion)
    throw Error(ErrorCode::kCompatibility, "unsupported checkpoint version");
  const uint8_t kind = r.Get<uint8_t>();
  if (kind > 3) throw Error(ErrorCode::kChecksum, "bad feature kind code");
  Model m;
  m.kind = static_cast<FeatureKind>(kind);
  m.input_dim = static_cast<int>(r.Get<uint32_t>());
  const uint32_t n_layers = r.Get<uint32_t>();
  if (n_layers > 1024) throw Error(ErrorCode::kChecksum, "implausible layer count");
  m.layers.resize(n_layers);
  for (ConvLayer &l : m.layers) {
    const uint32_t in = r.Get<uint32_t>(), out = r.Get<uint32_t>();
    if (r.Get<uint32_t>() != ConvLayer::kKernel)
      throw Error(ErrorCode::kCompatibility, "unsupported kernel size");
    if (in > (1u << 16) || out > (1u << 16))
      throw Error(ErrorCode::kChecksum, "implausible channel count");
    for (auto &tap : l.taps) tap.resize(out, in);
    l.bias.resize(out);
  }
  for (ConvLayer &l : m.layers) {
    for (int o = 0; o < l.out_channels(); ++o)
      for (int i = 0; i < l.in_channels(); ++i)
        for (int t = 0; t < ConvLayer::kKernel; ++t) l.taps[t](o, i) = r.Get<double>();
    for (int o = 0; o < l.out_channels(); ++o) l.bias[o] = r.Get<double>();
  }
  const uint32_t head_in = r.Get<uint32_t>();
  if (!m.layers.empty() && head_in != static_cast<uint32_t>(m.layers.back().out_channels()))
    throw Error(ErrorCode::kChecksum, "head does not match last layer");
  m.head_weight.resize(head_in);
  for (uint32_t c = 0; c < head_in; ++c) m.head_weight[c] = r.Get<double>();
  m.head_bias = r.Get<double>();
  CheckpointInfo ci;
  ci.epochs_done = static_cast<int>(r.Get<uint32_t>());
  ci.learning_rate = r.Get<double>();
  ci.scheduler_best = r.Get<double>();
  ci.scheduler_misses = static_cast<int>(r.Get<uint32_t>());
  ci.best_dev_loss = r.Get<double>();
  if (r.pos() != body.size())
    throw Error(ErrorCode::kChecksum, "trailing bytes in checkpoint");
  if (info) *info = ci;
  return m;
}

Model LoadCheckpoint(const std::filesystem::path &path, FeatureKind kind,
                     int input_dim, CheckpointInfo *info) {
  Model m = LoadCheckpoint(path, info);
  if (m.kind != kind || m.input_dim != input_dim)
    throw Error(ErrorCode::kCompatibility,
                path.string() + " was trained on " +
                    std::string(FeatureName(m.kind)) + "/" +
                    std::to_string(m.input_dim) + ", features are " +
                    std::string(FeatureName(kind)) + "/" +
                    std::to_string(input_dim));
  return m;
}

}  // namespace ovd
