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

#ifndef BMFD_SIGNAL_H_
#define BMFD_SIGNAL_H_

#include <cstddef>
#include <span>
#include <vector>

namespace bmfd {

// Digital full scale convention: an rms of 1.0 corresponds to 100 dB SPL.
inline constexpr double kCalibrationDbSpl = 100.0;

double DbSplToRms(double level_db);
double RmsToDbSpl(double rms);

// Root mean square of a sample block (0 for an empty block).
double Rms(std::span<const double> x);

// Single-channel audio at a fixed sample rate, in calibrated units.
struct Signal {
  double sample_rate = 48000.0;
  std::vector<double> samples;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

// Two-ear audio; left and right always have equal length.
struct StereoSignal {
  double sample_rate = 48000.0;
  std::vector<double> left;
  std::vector<double> right;

  std::size_t size() const { return left.size(); }
  static StereoSignal Silence(double sample_rate, std::size_t num_samples);
};

// In-place y += gain * x over matching spans.
void Axpy(double gain, std::span<const double> x, std::span<double> y);

// A bank of per-channel waveforms sharing one sample rate, stored
// channel-major in a single buffer.
class ChannelBank {
 public:
  ChannelBank() = default;
  ChannelBank(std::vector<double> center_frequencies, std::size_t num_samples,
              double sample_rate);

  int num_channels() const { return static_cast<int>(centers_.size()); }
  std::size_t num_samples() const { return num_samples_; }
  double sample_rate() const { return sample_rate_; }
  double center_frequency(int p) const { return centers_[p]; }
  const std::vector<double>& center_frequencies() const { return centers_; }

  std::span<double> channel(int p) {
    return {data_.data() + static_cast<std::size_t>(p) * num_samples_,
            num_samples_};
  }
  std::span<const double> channel(int p) const {
    return {data_.data() + static_cast<std::size_t>(p) * num_samples_,
            num_samples_};
  }

 private:
  std::vector<double> centers_;
  std::size_t num_samples_ = 0;
  double sample_rate_ = 0;
  std::vector<double> data_;
};

}  // namespace bmfd

#endif  // BMFD_SIGNAL_H_
