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

#ifndef BMFD_FEATURES_H_
#define BMFD_FEATURES_H_

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "bmfd/signal.h"

namespace bmfd {

// Envelope scale that references the envelope to the audibility floor: a
// steady tone at weighted-domain level L dB yields a mean envelope of
// 10^(L/20), hence a DC power of 10^(L/10)/2.
inline constexpr double kEnvelopeScale =
    std::numbers::pi * 1e5 / std::numbers::sqrt2;

// Frame level reported for fully silent frames.
inline constexpr double kSilenceLevelDb = -400.0;

struct FeatureParams {
  double envelope_cutoff_hz = 150.0;
  double envelope_scale = kEnvelopeScale;

  // Envelopes are decimated before modulation analysis; the anti-alias
  // lowpass is a Butterworth of the given order.
  int decimation_factor = 16;
  double decimation_cutoff_hz = 1000.0;
  int decimation_order = 4;

  // Power-summation window, interpolated in log center frequency from the
  // lowest to the highest channel of the bank.
  double dc_window_long_s = 0.045;
  double dc_window_short_s = 0.008;
  double dc_floor = 1e-10;
  // Frames whose envelope level falls below this weighted-domain level are
  // treated as silent. Set from the ear filter's threshold floor.
  double audibility_floor_db = -6.0;
  // Weighted-domain level whose frame power bounds the power-path SNR
  // denominator from below when the reference frame is audible. Contrasts
  // against sub-threshold references stay referenced to the audibility
  // floor instead; see ComputeSnr.
  double dc_contrast_floor_db = 10.0;

  std::vector<double> mod_bandpass_centers_hz = {2, 4, 8, 16, 32, 64, 128, 256};
  double mod_lowpass_cutoff_hz = 1.0;
  double mod_bandpass_q = 1.0;
  // A modulation band is evaluated in a channel only if its rate does not
  // exceed this fraction of the channel center frequency.
  double mod_population_ratio = 0.25;
  double env_floor = 1.9952623149688795e-3;  // 10^-2.7
  double level_weight_knee_db = 35.0;

  bool use_band_importance = false;
};

// Direct-form-II-transposed second-order section.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;
};

// Butterworth lowpass as a cascade of sections (odd orders include a
// degenerate first-order section with b2 = a2 = 0).
std::vector<Biquad> ButterworthLowpass(int order, double cutoff_hz,
                                       double sample_rate);

// Constant-peak-gain bandpass (peak 0 dB at center_hz).
Biquad BandpassBiquad(double center_hz, double q, double sample_rate);

void RunBiquadCascade(std::span<const Biquad> sections,
                      std::span<const double> in, std::span<double> out);

std::complex<double> CascadeResponse(std::span<const Biquad> sections,
                                     double frequency_hz, double sample_rate);

// Modulation filterbank: band 0 is the Butterworth lowpass, bands 1..K the
// bandpasses. Each Filter call starts from rest.
class ModulationFilterbank {
 public:
  ModulationFilterbank(const FeatureParams& params, double sample_rate);

  int num_bands() const { return static_cast<int>(bands_.size()); }
  // Rate used for frame sizing and channel population; the lowpass band
  // reports its cutoff.
  double band_rate_hz(int band) const { return rates_[band]; }
  void Filter(int band, std::span<const double> in,
              std::span<double> out) const;
  double GainDb(int band, double frequency_hz) const;

 private:
  double sample_rate_ = 0;
  std::vector<std::vector<Biquad>> bands_;
  std::vector<double> rates_;
};

// Lowpasses each decoder channel at the envelope cutoff, scales into
// threshold-referenced units, and decimates.
ChannelBank ExtractEnvelope(const ChannelBank& bank,
                            const FeatureParams& params);

struct Frame {
  std::size_t begin = 0, end = 0;
  std::size_t size() const { return end - begin; }
};

// Consecutive frames of the nominal length. A tail of at least half the
// nominal length becomes its own frame; a shorter tail is merged into the
// previous frame. A block shorter than one nominal length is one frame.
std::vector<Frame> SegmentFrames(std::size_t n, std::size_t nominal);

// Per-channel power-summation window in seconds.
double DcWindowSeconds(const FeatureParams& params, double center_hz,
                       double lowest_hz, double highest_hz);

struct DcGrid {
  std::vector<std::vector<double>> power;     // [channel][frame]
  std::vector<std::vector<double>> level_db;  // [channel][frame]
};
DcGrid ComputeDcGrid(const ChannelBank& envelope, const FeatureParams& params);

struct EnvGrid {
  std::vector<std::vector<std::vector<double>>> power;     // [ch][band][frame]
  std::vector<std::vector<std::vector<double>>> level_db;  // [ch][band][frame]
  std::vector<int> bands_per_channel;
};
EnvGrid ComputeEnvGrid(const ChannelBank& envelope,
                       const ModulationFilterbank& mod_bank,
                       const FeatureParams& params);

// Max-normalized band-importance weights for intelligibility scoring.
class BandImportance {
 public:
  static const BandImportance& Shared();
  double Weight(double frequency_hz) const;

 private:
  BandImportance();
  std::vector<double> x_, w_;
};

struct SnrGrids {
  std::vector<std::vector<double>> dc;                  // [ch][frame]
  std::vector<std::vector<std::vector<double>>> env;    // [ch][band][frame]
};

// Frame-wise excess-power ratios of target-plus-reference over reference,
// clamped at zero. Envelope-domain entries are attenuated below the level
// knee; power-domain entries optionally carry band-importance weights and
// divide by at least the just-audible frame power.
SnrGrids ComputeSnr(const DcGrid& target_dc, const EnvGrid& target_env,
                    const DcGrid& reference_dc, const EnvGrid& reference_env,
                    const FeatureParams& params,
                    const std::vector<double>& centers);

}  // namespace bmfd

#endif  // BMFD_FEATURES_H_
