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

#include "bmfd/signal.h"

#include <cmath>
#include <stdexcept>

namespace bmfd {

double DbSplToRms(double level_db) {
  return std::pow(10.0, (level_db - kCalibrationDbSpl) / 20.0);
}

double RmsToDbSpl(double rms) {
  if (rms <= 0) throw std::invalid_argument("RmsToDbSpl: rms must be > 0");
  return kCalibrationDbSpl + 20.0 * std::log10(rms);
}

double Rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double sum = 0.0;
  for (double v : x) sum += v * v;
  return std::sqrt(sum / static_cast<double>(x.size()));
}

StereoSignal StereoSignal::Silence(double sample_rate,
                                   std::size_t num_samples) {
  StereoSignal s;
  s.sample_rate = sample_rate;
  s.left.assign(num_samples, 0.0);
  s.right.assign(num_samples, 0.0);
  return s;
}

void Axpy(double gain, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("Axpy: span sizes differ");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += gain * x[i];
}

ChannelBank::ChannelBank(std::vector<double> center_frequencies,
                         std::size_t num_samples, double sample_rate)
    : centers_(std::move(center_frequencies)),
      num_samples_(num_samples),
      sample_rate_(sample_rate),
      data_(centers_.size() * num_samples, 0.0) {}

}  // namespace bmfd
