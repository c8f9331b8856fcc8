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

#include "bmfd/stimulus.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bmfd/fft.h"
#include "bmfd/fractional_delay.h"
#include "bmfd/rng.h"

namespace bmfd {
namespace {

std::size_t NumSamples(double duration_s, double sample_rate) {
  if (duration_s <= 0 || sample_rate <= 0)
    throw std::invalid_argument("stimulus: duration and rate must be > 0");
  return static_cast<std::size_t>(std::lround(duration_s * sample_rate));
}

void CheckRamp(std::size_t n, double ramp_s, double sample_rate) {
  if (ramp_s < 0) throw std::invalid_argument("stimulus: negative ramp");
  if (2.0 * ramp_s * sample_rate > static_cast<double>(n))
    throw std::invalid_argument("stimulus: ramps longer than the signal");
}

void ApplyAm(Signal* signal, double rate_hz, double depth, bool equal_power,
             bool square) {
  if (signal == nullptr) throw std::invalid_argument("ApplyAm: null signal");
  if (depth < 0 || depth > 1)
    throw std::invalid_argument("ApplyAm: depth must be in [0, 1]");
  const double w = 2.0 * std::numbers::pi * rate_hz / signal->sample_rate;
  for (std::size_t i = 0; i < signal->samples.size(); ++i) {
    double m = std::sin(w * static_cast<double>(i));
    if (square) m = m >= 0 ? 1.0 : -1.0;
    signal->samples[i] *= 1.0 + depth * m;
  }
  if (equal_power) {
    // Modulator power is depth^2/2 for the sine and depth^2 for the square.
    const double extra = square ? depth * depth : 0.5 * depth * depth;
    const double gain = 1.0 / std::sqrt(1.0 + extra);
    for (double& v : signal->samples) v *= gain;
  }
}

}  // namespace

Signal MakeTone(const ToneSpec& spec) {
  const std::size_t n = NumSamples(spec.duration_s, spec.sample_rate);
  CheckRamp(n, spec.ramp_s, spec.sample_rate);
  Signal out;
  out.sample_rate = spec.sample_rate;
  out.samples.resize(n);
  const double amp = std::numbers::sqrt2 * DbSplToRms(spec.level_db);
  const double w = 2.0 * std::numbers::pi * spec.frequency_hz / spec.sample_rate;
  for (std::size_t i = 0; i < n; ++i)
    out.samples[i] = amp * std::sin(w * static_cast<double>(i) + spec.phase_rad);
  ApplyRaisedCosineRamps(out.samples, spec.ramp_s, spec.sample_rate);
  return out;
}

double OverallLevelDb(const BandNoiseSpec& spec) {
  if (!spec.level_is_spectrum_db_hz) return spec.level_db;
  const double bandwidth = spec.high_hz - spec.low_hz;
  if (bandwidth <= 0)
    throw std::invalid_argument("BandNoiseSpec: empty band");
  return spec.level_db + 10.0 * std::log10(bandwidth);
}

Signal MakeBandNoise(const BandNoiseSpec& spec, std::uint64_t seed) {
  if (spec.low_hz < 0 || spec.high_hz <= spec.low_hz ||
      spec.high_hz > spec.sample_rate / 2.0)
    throw std::invalid_argument("BandNoiseSpec: invalid band edges");
  const std::size_t n = NumSamples(spec.duration_s, spec.sample_rate);
  CheckRamp(n, spec.ramp_s, spec.sample_rate);

  RandomStream rng(seed);
  std::vector<double> white(n);
  for (double& v : white) v = rng.Gaussian();

  auto bins = RealFft(white);
  const double bin_hz = spec.sample_rate / static_cast<double>(n);
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const double f = static_cast<double>(k) * bin_hz;
    if (f < spec.low_hz || f > spec.high_hz) bins[k] = 0.0;
  }
  Signal out;
  out.sample_rate = spec.sample_rate;
  out.samples = InverseRealFft(bins, n);
  ScaleToLevel(&out, OverallLevelDb(spec));
  ApplyRaisedCosineRamps(out.samples, spec.ramp_s, spec.sample_rate);
  return out;
}

Signal MakeSpeechEnvelopeNoise(const SpeechEnvelopeNoiseSpec& spec,
                               std::uint64_t seed) {
  const std::size_t n = NumSamples(spec.duration_s, spec.sample_rate);
  CheckRamp(n, spec.ramp_s, spec.sample_rate);

  RandomStream rng(seed);
  std::vector<double> carrier(n);
  for (double& v : carrier) v = rng.Gaussian();

  // Slow envelope: independent noise through two first-order lowpasses,
  // rectified, with a small pedestal so the token never fully vanishes.
  std::vector<double> envelope(n);
  for (double& v : envelope) v = rng.Gaussian();
  const double a = std::exp(-2.0 * std::numbers::pi * spec.envelope_cutoff_hz /
                            spec.sample_rate);
  for (int pass = 0; pass < 2; ++pass) {
    double state = 0.0;
    for (double& v : envelope) {
      state += (1.0 - a) * (v - state);
      v = state;
    }
  }
  double peak = 0.0;
  for (double& v : envelope) {
    v = std::abs(v);
    peak = std::max(peak, v);
  }
  if (peak <= 0) throw std::runtime_error("speech envelope degenerate");
  for (double& v : envelope) v = 0.05 + v / peak;

  Signal out;
  out.sample_rate = spec.sample_rate;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.samples[i] = carrier[i] * envelope[i];
  ScaleToLevel(&out, spec.level_db);
  ApplyRaisedCosineRamps(out.samples, spec.ramp_s, spec.sample_rate);
  return out;
}

void ApplySineAm(Signal* signal, double rate_hz, double depth,
                 bool equal_power) {
  ApplyAm(signal, rate_hz, depth, equal_power, /*square=*/false);
}

void ApplySquareAm(Signal* signal, double rate_hz, double depth,
                   bool equal_power) {
  ApplyAm(signal, rate_hz, depth, equal_power, /*square=*/true);
}

void ApplyRaisedCosineRamps(std::span<double> x, double ramp_s,
                            double sample_rate) {
  const std::size_t ramp_n =
      static_cast<std::size_t>(std::lround(ramp_s * sample_rate));
  if (ramp_n == 0) return;
  if (2 * ramp_n > x.size())
    throw std::invalid_argument("ramps longer than the signal");
  for (std::size_t i = 0; i < ramp_n; ++i) {
    const double g =
        0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(i) /
                              static_cast<double>(ramp_n)));
    x[i] *= g;
    x[x.size() - 1 - i] *= g;
  }
}

void ScaleToLevel(Signal* signal, double level_db) {
  if (signal == nullptr)
    throw std::invalid_argument("ScaleToLevel: null signal");
  const double rms = Rms(signal->samples);
  if (rms <= 0) throw std::runtime_error("ScaleToLevel: silent signal");
  const double gain = DbSplToRms(level_db) / rms;
  for (double& v : signal->samples) v *= gain;
}

StereoSignal ToStereo(const Signal& signal, InterauralMode mode) {
  StereoSignal out;
  out.sample_rate = signal.sample_rate;
  switch (mode) {
    case InterauralMode::kDiotic:
      out.left = signal.samples;
      out.right = signal.samples;
      break;
    case InterauralMode::kAntiphasic:
      out.left = signal.samples;
      out.right.resize(signal.samples.size());
      for (std::size_t i = 0; i < signal.samples.size(); ++i)
        out.right[i] = -signal.samples[i];
      break;
    case InterauralMode::kLeftOnly:
      out.left = signal.samples;
      out.right.assign(signal.samples.size(), 0.0);
      break;
    case InterauralMode::kRightOnly:
      out.left.assign(signal.samples.size(), 0.0);
      out.right = signal.samples;
      break;
  }
  return out;
}

void ApplyItd(StereoSignal* signal, double itd_s) {
  if (signal == nullptr) throw std::invalid_argument("ApplyItd: null signal");
  if (itd_s == 0.0) return;
  const double delay = std::abs(itd_s) * signal->sample_rate;
  if (itd_s > 0) {
    FractionalDelay(signal->right, delay, signal->right);
  } else {
    FractionalDelay(signal->left, delay, signal->left);
  }
}

void ApplyIid(StereoSignal* signal, double iid_db) {
  if (signal == nullptr) throw std::invalid_argument("ApplyIid: null signal");
  const double gl = std::pow(10.0, iid_db / 40.0);
  const double gr = 1.0 / gl;
  for (double& v : signal->left) v *= gl;
  for (double& v : signal->right) v *= gr;
}

void MixInto(StereoSignal* acc, const StereoSignal& add, double gain) {
  if (acc == nullptr) throw std::invalid_argument("MixInto: null accumulator");
  if (acc->size() != add.size() || acc->sample_rate != add.sample_rate)
    throw std::invalid_argument("MixInto: format mismatch");
  Axpy(gain, add.left, acc->left);
  Axpy(gain, add.right, acc->right);
}

StereoSignal MakePhaseTransitionMasker(const PhaseTransitionSpec& spec,
                                       std::uint64_t seed) {
  if (spec.transition_s <= 0 || spec.transition_s >= spec.duration_s)
    throw std::invalid_argument("PhaseTransitionSpec: bad transition time");
  if (std::abs(spec.first_sign) != 1 || std::abs(spec.second_sign) != 1)
    throw std::invalid_argument("PhaseTransitionSpec: signs must be +/-1");

  BandNoiseSpec noise;
  noise.low_hz = spec.low_hz;
  noise.high_hz = spec.high_hz;
  noise.level_db = spec.spectrum_level_db_hz;
  noise.level_is_spectrum_db_hz = true;
  noise.duration_s = spec.duration_s;
  noise.ramp_s = 0.0;  // edge ramps are applied after the segment gains
  noise.sample_rate = spec.sample_rate;
  Signal token = MakeBandNoise(noise, seed);

  const std::size_t n = token.samples.size();
  const std::size_t switch_at =
      static_cast<std::size_t>(std::lround(spec.transition_s * spec.sample_rate));
  const double g1 = std::pow(10.0, spec.first_offset_db / 20.0);
  const double g2 = std::pow(10.0, spec.second_offset_db / 20.0);

  StereoSignal out;
  out.sample_rate = spec.sample_rate;
  out.left.resize(n);
  out.right.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool second = i >= switch_at;
    const double gain = second ? g2 : g1;
    const double sign = second ? spec.second_sign : spec.first_sign;
    out.left[i] = gain * token.samples[i];
    out.right[i] = sign * gain * token.samples[i];
  }
  ApplyRaisedCosineRamps(out.left, spec.ramp_s, spec.sample_rate);
  ApplyRaisedCosineRamps(out.right, spec.ramp_s, spec.sample_rate);
  return out;
}

}  // namespace bmfd
