// ovd/base.h

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

#ifndef OVD_BASE_H_
#define OVD_BASE_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace ovd {

/// Row-major real matrix; feature matrices are frames x dim.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

constexpr int kSampleRate = 8000;

enum class ErrorCode {
  kFormat,
  kUnsupportedEncoding,
  kRateMismatch,
  kIo,
  kPrecondition,
  kDegenerateSource,
  kCapacity,
  kParameter,
  kLength,
  kShape,
  kConfig,
  kChecksum,
  kCompatibility,
  kData,
};

const char *ErrorCodeName(ErrorCode code);

/// All library failures are reported through this exception; the code
/// identifies the failure class so callers (and the CLI's exit status) can
/// react without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Derives an independent 64-bit seed for a named sub-stream of `root`.
uint64_t DeriveSeed(uint64_t root, std::string_view name);
uint64_t DeriveSeed(uint64_t root, uint64_t index);

}  // namespace ovd

#endif  // OVD_BASE_H_
