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

#include "bmfd/gammatone.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bmfd {
namespace {

// Classic ratio between the fourth-order gammatone bandwidth parameter and
// the equivalent rectangular bandwidth; used as the calibration start point.
constexpr double kBandwidthRatio = 1.019;

constexpr double kNominalCenters[] = {
    25.0,    31.5,    40.0,    50.0,   63.0,   80.0,   100.0,  125.0,
    160.0,   200.0,   250.0,   315.0,  400.0,  500.0,  630.0,  800.0,
    1000.0,  1250.0,  1600.0,  2000.0, 2500.0, 3150.0, 4000.0, 5000.0,
    6300.0,  8000.0,  10000.0, 12500.0, 16000.0, 20000.0};

std::complex<double> PoleFor(double center_hz, double bandwidth_hz,
                             double sample_rate) {
  const double t = 1.0 / sample_rate;
  const double radius = std::exp(-2.0 * std::numbers::pi * bandwidth_hz * t);
  const double angle = 2.0 * std::numbers::pi * center_hz * t;
  return std::polar(radius, angle);
}

}  // namespace

double ErbHz(double frequency_hz) {
  return 24.7 * (4.37 * frequency_hz / 1000.0 + 1.0);
}

std::vector<double> ThirdOctaveCenters(double low_hz, double high_hz) {
  std::vector<double> centers;
  for (double f : kNominalCenters)
    if (f >= low_hz && f <= high_hz) centers.push_back(f);
  return centers;
}

GammatoneFilterbank::GammatoneFilterbank(double sample_rate,
                                         std::vector<double> centers)
    : sample_rate_(sample_rate), centers_(std::move(centers)) {
  if (sample_rate_ <= 0)
    throw std::invalid_argument("GammatoneFilterbank: bad sample rate");
  channels_.resize(centers_.size());
  for (std::size_t p = 0; p < centers_.size(); ++p) {
    const double fc = centers_[p];
    if (fc <= 0 || fc >= sample_rate_ / 2.0)
      throw std::invalid_argument(
          "GammatoneFilterbank: center frequency out of range");
    const double target_erb = ErbHz(fc);

    // Secant search on the bandwidth parameter until the realized filter's
    // equivalent rectangular bandwidth lands on the target.
    double b0 = kBandwidthRatio * target_erb;
    double e0 = MeasureErb(PoleFor(fc, b0, sample_rate_), fc) - target_erb;
    double b1 = b0 * (1.0 - 0.5 * e0 / target_erb);
    for (int iter = 0; iter < 24; ++iter) {
      const double e1 =
          MeasureErb(PoleFor(fc, b1, sample_rate_), fc) - target_erb;
      if (std::abs(e1) < 1e-4 * target_erb) {
        b0 = b1;
        e0 = e1;
        break;
      }
      if (e1 == e0) break;
      const double next = b1 - e1 * (b1 - b0) / (e1 - e0);
      b0 = b1;
      e0 = e1;
      b1 = std::clamp(next, 0.25 * target_erb, 8.0 * target_erb);
    }

    Channel& ch = channels_[p];
    ch.pole = PoleFor(fc, b1, sample_rate_);
    ch.measured_erb_hz = MeasureErb(ch.pole, fc);
    ch.gain = 1.0 / std::abs(RealizedResponse(ch.pole, fc));
  }
}

std::complex<double> GammatoneFilterbank::RealizedResponse(
    const std::complex<double>& pole, double frequency_hz) const {
  // Response of the real-output filter: the complex cascade evaluated at
  // +f combined with its image at -f.
  const double w = 2.0 * std::numbers::pi * frequency_hz / sample_rate_;
  const auto stage_at = [&](double omega) {
    const std::complex<double> z_inv = std::polar(1.0, -omega);
    std::complex<double> h = 1.0 / (1.0 - pole * z_inv);
    h *= h;
    return h * h;
  };
  return 0.5 * (stage_at(w) + std::conj(stage_at(-w)));
}

double GammatoneFilterbank::MeasureErb(const std::complex<double>& pole,
                                       double center_hz) const {
  const double nyquist = sample_rate_ / 2.0;
  const double erb_guess = ErbHz(center_hz);
  const double f_lo = std::max(0.0, center_hz - 20.0 * erb_guess);
  const double f_hi = std::min(nyquist, center_hz + 20.0 * erb_guess);

  const auto power_at = [&](double f) {
    const double mag = std::abs(RealizedResponse(pole, f));
    return mag * mag;
  };
  const auto integrate = [&](double a, double b, int steps) {
    if (b <= a) return 0.0;
    const double h = (b - a) / steps;
    double sum = 0.5 * (power_at(a) + power_at(b));
    for (int i = 1; i < steps; ++i) sum += power_at(a + i * h);
    return sum * h;
  };

  double integral = integrate(f_lo, f_hi, 2048);
  integral += integrate(0.0, f_lo, 256);
  integral += integrate(f_hi, nyquist, 256);

  // Peak search near the center; the realized maximum can sit slightly off
  // the nominal frequency.
  double peak = 0.0;
  const int probe_steps = 512;
  for (int i = 0; i <= probe_steps; ++i) {
    const double f = center_hz + erb_guess * (2.0 * i / probe_steps - 1.0);
    if (f <= 0 || f >= nyquist) continue;
    peak = std::max(peak, power_at(f));
  }
  if (peak <= 0)
    throw std::runtime_error("GammatoneFilterbank: degenerate response");
  return integral / peak;
}

ChannelBank GammatoneFilterbank::Filter(std::span<const double> x) const {
  ChannelBank bank(centers_, x.size(), sample_rate_);
  for (int p = 0; p < num_channels(); ++p)
    FilterChannel(p, x, bank.channel(p));
  return bank;
}

void GammatoneFilterbank::FilterChannel(int p, std::span<const double> x,
                                        std::span<double> out) const {
  if (x.size() != out.size())
    throw std::invalid_argument("FilterChannel: size mismatch");
  const Channel& ch = channels_[static_cast<std::size_t>(p)];
  const std::complex<double> a = ch.pole;
  std::complex<double> s1{}, s2{}, s3{}, s4{};
  for (std::size_t i = 0; i < x.size(); ++i) {
    s1 = x[i] + a * s1;
    s2 = s1 + a * s2;
    s3 = s2 + a * s3;
    s4 = s3 + a * s4;
    out[i] = ch.gain * s4.real();
  }
}

double GammatoneFilterbank::Gain(int p, double frequency_hz) const {
  const Channel& ch = channels_[static_cast<std::size_t>(p)];
  return ch.gain * std::abs(RealizedResponse(ch.pole, frequency_hz));
}

}  // namespace bmfd
