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

#include "bmfd/periphery.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "bmfd/fft.h"

namespace bmfd {

OnePoleLowpass::OnePoleLowpass(double cutoff_hz, double sample_rate) {
  if (cutoff_hz <= 0 || sample_rate <= 0 || cutoff_hz >= sample_rate / 2.0)
    throw std::invalid_argument("OnePoleLowpass: bad cutoff or rate");
  a_ = std::exp(-2.0 * std::numbers::pi * cutoff_hz / sample_rate);
}

void OnePoleLowpass::Process(std::span<const double> in,
                             std::span<double> out) {
  if (in.size() != out.size())
    throw std::invalid_argument("OnePoleLowpass: size mismatch");
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = Step(in[i]);
}

void OnePoleLowpass::Filter(double cutoff_hz, double sample_rate,
                            std::span<const double> in,
                            std::span<double> out) {
  OnePoleLowpass lp(cutoff_hz, sample_rate);
  lp.Process(in, out);
}

EarWeightingFilter::EarWeightingFilter(double sample_rate,
                                       const Table& threshold_curve_db,
                                       int num_taps)
    : sample_rate_(sample_rate) {
  if (num_taps < 31 || num_taps % 2 == 0)
    throw std::invalid_argument(
        "EarWeightingFilter: tap count must be odd and >= 31");
  threshold_floor_db_ = threshold_curve_db.min_y();

  // Frequency-sampled linear-phase design on an n-point grid, then a Hann
  // window to suppress interpolation ripple between grid points.
  const int n = num_taps;
  const int m = (n - 1) / 2;
  std::vector<std::complex<double>> bins(n / 2 + 1);
  for (int k = 0; k < n / 2 + 1; ++k) {
    const double f = sample_rate_ * k / n;
    const double attenuation_db =
        InterpLogX(threshold_curve_db, std::max(f, 1.0)) - threshold_floor_db_;
    const double mag = std::pow(10.0, -attenuation_db / 20.0);
    const double phase = -2.0 * std::numbers::pi * k * m / n;
    bins[k] = std::polar(mag, phase);
  }
  taps_ = InverseRealFft(bins, n);
  for (int i = 0; i < n; ++i) {
    const double w =
        0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
    taps_[i] *= w;
  }
}

std::vector<double> EarWeightingFilter::Apply(std::span<const double> x) const {
  auto full = FftConvolve(x, taps_);
  const std::size_t m = (taps_.size() - 1) / 2;
  return {full.begin() + static_cast<std::ptrdiff_t>(m),
          full.begin() + static_cast<std::ptrdiff_t>(m + x.size())};
}

double EarWeightingFilter::GainDb(double frequency_hz) const {
  const double w = 2.0 * std::numbers::pi * frequency_hz / sample_rate_;
  std::complex<double> h = 0.0;
  for (std::size_t i = 0; i < taps_.size(); ++i)
    h += taps_[i] * std::polar(1.0, -w * static_cast<double>(i));
  return 20.0 * std::log10(std::max(std::abs(h), 1e-300));
}

void HalfWaveRectify(ChannelBank* bank) {
  if (bank == nullptr)
    throw std::invalid_argument("HalfWaveRectify: null bank");
  for (int p = 0; p < bank->num_channels(); ++p)
    for (double& v : bank->channel(p)) v = std::max(v, 0.0);
}

void AdaptChannel(std::span<double> x, const AdaptationParams& params,
                  double sample_rate) {
  if (params.divisor_floor <= 0)
    throw std::invalid_argument("AdaptChannel: divisor floor must be > 0");
  OnePoleLowpass lp(params.cutoff_hz, sample_rate);
  for (double& v : x) {
    const double divisor = std::max(lp.Step(v), params.divisor_floor);
    v /= divisor;
  }
}

void Adapt(ChannelBank* bank, const AdaptationParams& params) {
  if (bank == nullptr) throw std::invalid_argument("Adapt: null bank");
  for (int p = 0; p < bank->num_channels(); ++p)
    AdaptChannel(bank->channel(p), params, bank->sample_rate());
}

const Table& HearingThresholdCurve() {
  static const Table table =
      LoadTwoColumnTable(DataFile("iso389_7_free_field.txt"));
  return table;
}

}  // namespace bmfd
