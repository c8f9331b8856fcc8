// Copyright 2026 The BMFD Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bmfd/fractional_delay.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bmfd {
namespace {

double Sinc(double u) {
  if (std::abs(u) < 1e-12) return 1.0;
  const double pu = std::numbers::pi * u;
  return std::sin(pu) / pu;
}

void IntegerShift(std::span<const double> in, long long shift,
                  std::span<double> out) {
  const long long n = static_cast<long long>(in.size());
  // out[j] = in[j - shift] where the source index is in range. The copy
  // order follows the shift direction so the spans may alias (delays are
  // routinely applied in place).
  const long long dst_begin = std::clamp(shift, 0LL, n);
  const long long dst_end = std::clamp(n + shift, 0LL, n);
  if (shift >= 0) {
    for (long long j = dst_end - 1; j >= dst_begin; --j) out[j] = in[j - shift];
  } else {
    for (long long j = dst_begin; j < dst_end; ++j) out[j] = in[j - shift];
  }
  std::fill(out.begin(), out.begin() + dst_begin, 0.0);
  std::fill(out.begin() + dst_end, out.end(), 0.0);
}

}  // namespace

void FractionalDelay(std::span<const double> in, double delay_samples,
                     std::span<double> out, int half_width) {
  if (in.size() != out.size())
    throw std::invalid_argument("FractionalDelay: size mismatch");
  if (half_width < 2)
    throw std::invalid_argument("FractionalDelay: half_width too small");
  if (in.empty()) return;

  const double i_part = std::floor(delay_samples);
  double frac = delay_samples - i_part;
  long long shift = static_cast<long long>(i_part);
  if (frac < 1e-9) {
    IntegerShift(in, shift, out);
    return;
  }
  if (frac > 1.0 - 1e-9) {
    IntegerShift(in, shift + 1, out);
    return;
  }

  // 2W taps bracketing the fractional sample position, Hann-windowed and
  // normalized to unit DC gain.
  const int w = half_width;
  std::vector<double> taps(2 * w);
  double sum = 0.0;
  for (int m = -w; m < w; ++m) {
    const double u = m + frac;
    const double window =
        0.5 * (1.0 + std::cos(std::numbers::pi * u / static_cast<double>(w)));
    const double h = Sinc(u) * window;
    taps[m + w] = h;
    sum += h;
  }
  for (double& h : taps) h /= sum;

  const long long n = static_cast<long long>(in.size());
  std::vector<double> result(in.size(), 0.0);
  for (long long j = 0; j < n; ++j) {
    // result[j] = sum_m taps[m + w] * in[j - shift + m]
    const long long base = j - shift;
    const long long m_lo = std::max(-static_cast<long long>(w), -base);
    const long long m_hi =
        std::min(static_cast<long long>(w) - 1, n - 1 - base);
    double acc = 0.0;
    for (long long m = m_lo; m <= m_hi; ++m)
      acc += taps[m + w] * in[base + m];
    result[j] = acc;
  }
  std::copy(result.begin(), result.end(), out.begin());
}

std::vector<double> Delayed(std::span<const double> in, double delay_samples,
                            int half_width) {
  std::vector<double> out(in.size());
  FractionalDelay(in, delay_samples, out, half_width);
  return out;
}

}  // namespace bmfd
