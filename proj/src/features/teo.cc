// features/teo.cc

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
#include <numbers>

#include "ovd/pyknogram.h"

namespace ovd {

std::vector<double> Teo(std::span<const double> x) {
  if (x.size() < 3)
    throw Error(ErrorCode::kLength, "TEO needs at least 3 samples");
  std::vector<double> psi(x.size() - 2);
  for (std::size_t n = 1; n + 1 < x.size(); ++n)
    psi[n - 1] = x[n] * x[n] - x[n - 1] * x[n + 1];
  return psi;
}

// DESA-1 with the backward difference y(n) = x(n) - x(n-1):
//   cos(Omega) = 1 - (psi[y](n) + psi[y](n+1)) / (4 psi[x](n))
//   |a| = sqrt(psi[x](n) / sin^2(Omega))
// psi[y](n) touches x(n-2..n+1) and psi[y](n+1) touches x(n-1..n+2), so
// estimates exist for n in [2, len-3].
Demodulation Desa1(std::span<const double> x, int sample_rate) {
  if (x.size() < 4)
    throw Error(ErrorCode::kLength, "DESA-1 needs at least 4 samples");
  const std::size_t len = x.size();
  Demodulation d;
  d.amp.assign(len, 0.0);
  d.freq_hz.assign(len, 0.0);
  d.valid.assign(len, 0);
  const double to_hz = sample_rate / (2.0 * std::numbers::pi);
  for (std::size_t n = 2; n + 2 < len; ++n) {
    const double psi_x = x[n] * x[n] - x[n - 1] * x[n + 1];
    if (!(psi_x > 0.0)) continue;
    const double y_m1 = x[n - 1] - x[n - 2];
    const double y_0 = x[n] - x[n - 1];
    const double y_p1 = x[n + 1] - x[n];
    const double y_p2 = x[n + 2] - x[n + 1];
    const double psi_y0 = y_0 * y_0 - y_m1 * y_p1;
    const double psi_y1 = y_p1 * y_p1 - y_0 * y_p2;
    const double arg = 1.0 - (psi_y0 + psi_y1) / (4.0 * psi_x);
    if (!(arg >= -1.0 && arg <= 1.0)) continue;
    const double omega = std::acos(arg);
    const double s = std::sin(omega);
    if (!(s > 0.0)) continue;
    d.amp[n] = std::sqrt(psi_x) / s;
    d.freq_hz[n] = omega * to_hz;
    d.valid[n] = 1;
  }
  return d;
}

}  // namespace ovd
