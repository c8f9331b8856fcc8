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

#ifndef BMFD_GAMMATONE_H_
#define BMFD_GAMMATONE_H_

#include <complex>
#include <span>
#include <vector>

#include "bmfd/signal.h"

namespace bmfd {

// Equivalent rectangular bandwidth of the normal-hearing auditory filter.
double ErbHz(double frequency_hz);

// IEC nominal third-octave band centers within [low_hz, high_hz], inclusive.
std::vector<double> ThirdOctaveCenters(double low_hz, double high_hz);

// Fourth-order all-pole gammatone filterbank: four cascaded complex
// one-pole sections per channel. Each channel is calibrated at
// construction so that its realized equivalent rectangular bandwidth
// matches ErbHz(center) and its gain at the center frequency is exactly 1.
class GammatoneFilterbank {
 public:
  GammatoneFilterbank(double sample_rate, std::vector<double> centers);

  double sample_rate() const { return sample_rate_; }
  int num_channels() const { return static_cast<int>(centers_.size()); }
  const std::vector<double>& centers() const { return centers_; }

  ChannelBank Filter(std::span<const double> x) const;
  void FilterChannel(int p, std::span<const double> x,
                     std::span<double> out) const;

  // Realized equivalent rectangular bandwidth of the digital filter.
  double MeasuredErbHz(int p) const { return channels_[p].measured_erb_hz; }
  // Realized magnitude response of channel p at an arbitrary frequency.
  double Gain(int p, double frequency_hz) const;

 private:
  struct Channel {
    std::complex<double> pole;
    double gain = 1.0;
    double measured_erb_hz = 0.0;
  };

  std::complex<double> RealizedResponse(const std::complex<double>& pole,
                                        double frequency_hz) const;
  double MeasureErb(const std::complex<double>& pole, double center_hz) const;

  double sample_rate_ = 0;
  std::vector<double> centers_;
  std::vector<Channel> channels_;
};

}  // namespace bmfd

#endif  // BMFD_GAMMATONE_H_
