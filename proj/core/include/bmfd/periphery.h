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

#ifndef BMFD_PERIPHERY_H_
#define BMFD_PERIPHERY_H_

#include <span>
#include <vector>

#include "bmfd/signal.h"
#include "bmfd/tables.h"

namespace bmfd {

// First-order lowpass y[n] = y[n-1] + (1 - a)(x[n] - y[n-1]) with
// a = exp(-2 pi fc / fs), starting from rest.
class OnePoleLowpass {
 public:
  OnePoleLowpass(double cutoff_hz, double sample_rate);

  double coefficient() const { return a_; }
  void Reset() { state_ = 0.0; }
  double Step(double x) {
    state_ += (1.0 - a_) * (x - state_);
    return state_;
  }
  void Process(std::span<const double> in, std::span<double> out);

  static void Filter(double cutoff_hz, double sample_rate,
                     std::span<const double> in, std::span<double> out);

 private:
  double a_ = 0;
  double state_ = 0;
};

// Linear-phase FIR realizing the inverse audibility weighting: attenuation
// at each frequency equals the hearing threshold curve minus its minimum,
// so the most sensitive region passes at 0 dB. Group delay is compensated
// in Apply, making the overall operation zero phase.
class EarWeightingFilter {
 public:
  EarWeightingFilter(double sample_rate, const Table& threshold_curve_db,
                     int num_taps = 4097);

  std::vector<double> Apply(std::span<const double> x) const;
  // Realized magnitude response in dB (for verification against the curve).
  double GainDb(double frequency_hz) const;
  // Minimum of the threshold curve; after weighting, audibility is a flat
  // surface at this level.
  double threshold_floor_db() const { return threshold_floor_db_; }
  const std::vector<double>& taps() const { return taps_; }

 private:
  double sample_rate_ = 0;
  double threshold_floor_db_ = 0;
  std::vector<double> taps_;
};

void HalfWaveRectify(ChannelBank* bank);

// Divisive level normalization: each sample is divided by a lowpassed copy
// of the channel, with the divisor floored so that low-level content passes
// through linearly.
struct AdaptationParams {
  double cutoff_hz = 500.0;
  double divisor_floor = 1.0;
};
void AdaptChannel(std::span<double> x, const AdaptationParams& params,
                  double sample_rate);
void Adapt(ChannelBank* bank, const AdaptationParams& params);

// Loads the packaged free-field hearing threshold curve.
const Table& HearingThresholdCurve();

}  // namespace bmfd

#endif  // BMFD_PERIPHERY_H_
