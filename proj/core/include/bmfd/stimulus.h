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

#ifndef BMFD_STIMULUS_H_
#define BMFD_STIMULUS_H_

#include <cstdint>
#include <span>

#include "bmfd/signal.h"

namespace bmfd {

inline constexpr double kDefaultSampleRate = 48000.0;
inline constexpr double kDefaultRampSeconds = 0.010;

// Pure tone, rms-calibrated to level_db before the onset/offset ramps are
// applied. phase_rad = pi/2 yields the quadrature partner of the default.
struct ToneSpec {
  double frequency_hz = 1000.0;
  double level_db = 65.0;
  double duration_s = 0.5;
  double ramp_s = kDefaultRampSeconds;
  double phase_rad = 0.0;
  double sample_rate = kDefaultSampleRate;
};
Signal MakeTone(const ToneSpec& spec);

// Gaussian noise restricted to [low_hz, high_hz] by zeroing FFT bins outside
// the band. Level is either the overall rms level or a per-Hz spectrum level.
struct BandNoiseSpec {
  double low_hz = 20.0;
  double high_hz = 8000.0;
  double level_db = 65.0;
  bool level_is_spectrum_db_hz = false;
  double duration_s = 0.5;
  double ramp_s = kDefaultRampSeconds;
  double sample_rate = kDefaultSampleRate;
};
Signal MakeBandNoise(const BandNoiseSpec& spec, std::uint64_t seed);

double OverallLevelDb(const BandNoiseSpec& spec);

// Noise carrier multiplied by a slowly varying speech-like envelope
// (lowpass-filtered noise magnitude, modulation energy concentrated below
// roughly 8 Hz), rms-calibrated to level_db.
struct SpeechEnvelopeNoiseSpec {
  double level_db = 65.0;
  double duration_s = 1.0;
  double envelope_cutoff_hz = 4.0;
  double ramp_s = kDefaultRampSeconds;
  double sample_rate = kDefaultSampleRate;
};
Signal MakeSpeechEnvelopeNoise(const SpeechEnvelopeNoiseSpec& spec,
                               std::uint64_t seed);

// Sinusoidal amplitude modulation x * (1 + depth sin(2 pi rate t)).
// equal_power rescales so the modulated token keeps the carrier power.
void ApplySineAm(Signal* signal, double rate_hz, double depth,
                 bool equal_power = false);

// Square-wave amplitude modulation with a 50% duty cycle.
void ApplySquareAm(Signal* signal, double rate_hz, double depth,
                   bool equal_power = false);

// Raised-cosine onset and offset ramps.
void ApplyRaisedCosineRamps(std::span<double> x, double ramp_s,
                            double sample_rate);

// Rescales so the block rms sits exactly at level_db.
void ScaleToLevel(Signal* signal, double level_db);

enum class InterauralMode { kDiotic, kAntiphasic, kLeftOnly, kRightOnly };

StereoSignal ToStereo(const Signal& signal, InterauralMode mode);

// Positive ITD means the left ear leads: the right channel is delayed by
// itd_s. Negative values delay the left channel instead.
void ApplyItd(StereoSignal* signal, double itd_s);

// Positive IID means the left ear is more intense; each ear moves by half
// the difference.
void ApplyIid(StereoSignal* signal, double iid_db);

void MixInto(StereoSignal* acc, const StereoSignal& add, double gain = 1.0);

// Band noise whose right-ear sign and overall level can switch once,
// mid-token, without interruption of the underlying noise waveform.
struct PhaseTransitionSpec {
  double low_hz = 100.0;
  double high_hz = 2000.0;
  double spectrum_level_db_hz = 40.0;
  double duration_s = 0.75;
  double transition_s = 0.375;
  int first_sign = 1;    // +1 in phase, -1 right ear inverted
  int second_sign = -1;
  double first_offset_db = 0.0;
  double second_offset_db = 0.0;
  double ramp_s = kDefaultRampSeconds;
  double sample_rate = kDefaultSampleRate;
};
StereoSignal MakePhaseTransitionMasker(const PhaseTransitionSpec& spec,
                                       std::uint64_t seed);

}  // namespace bmfd

#endif  // BMFD_STIMULUS_H_
