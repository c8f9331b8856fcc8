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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "bmfd/gammatone.h"
#include "bmfd/periphery.h"
#include "bmfd/signal.h"
#include "bmfd/tables.h"
#include "doctest.h"

namespace bmfd {
namespace {

TEST_CASE("equivalent rectangular bandwidth formula") {
  CHECK(ErbHz(1000.0) == doctest::Approx(132.639).epsilon(1e-9));
  CHECK(ErbHz(0.0) == doctest::Approx(24.7).epsilon(1e-12));
  CHECK(ErbHz(4000.0) == doctest::Approx(24.7 * (4.37 * 4.0 + 1.0)).epsilon(1e-12));
}

TEST_CASE("third octave centers span the analysis range") {
  const auto full = ThirdOctaveCenters(63.0, 12500.0);
  REQUIRE(full.size() == 24);
  CHECK(full.front() == doctest::Approx(63.0));
  CHECK(full.back() == doctest::Approx(12500.0));
  CHECK(std::is_sorted(full.begin(), full.end()));
  CHECK(std::count(full.begin(), full.end(), 1000.0) == 1);

  const auto speech = ThirdOctaveCenters(63.0, 8000.0);
  CHECK(speech.size() == 22);
  CHECK(speech.back() == doctest::Approx(8000.0));

  // Successive ratios stay near a third of an octave.
  for (std::size_t i = 1; i < full.size(); ++i) {
    const double ratio = full[i] / full[i - 1];
    CHECK(ratio > 1.20);
    CHECK(ratio < 1.30);
  }
}

TEST_CASE("gammatone channels peak at their centers with matched bandwidth") {
  GammatoneFilterbank fbank(48000.0, ThirdOctaveCenters(63.0, 12500.0));
  for (int p = 0; p < fbank.num_channels(); ++p) {
    const double fc = fbank.centers()[p];
    CHECK(fbank.Gain(p, fc) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(fbank.Gain(p, fc * 0.5) < fbank.Gain(p, fc));
    CHECK(fbank.Gain(p, fc * 2.0) < fbank.Gain(p, fc));
    CHECK(fbank.MeasuredErbHz(p) == doctest::Approx(ErbHz(fc)).epsilon(0.005));
  }
}

TEST_CASE("gammatone filtering preserves a tone at the channel center") {
  GammatoneFilterbank fbank(48000.0, {1000.0});
  std::vector<double> x(24000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sin(2.0 * std::numbers::pi * 1000.0 * i / 48000.0);
  }
  const ChannelBank bank = fbank.Filter(x);
  double sum = 0;
  const auto y = bank.channel(0);
  for (std::size_t i = 4800; i < y.size(); ++i) sum += y[i] * y[i];
  const double rms = std::sqrt(sum / (y.size() - 4800.0));
  CHECK(rms == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(0.02));
}

TEST_CASE("ear weighting equalizes the threshold curve to a flat floor") {
  const Table& curve = HearingThresholdCurve();
  EarWeightingFilter ear(48000.0, curve);
  CHECK(ear.threshold_floor_db() == doctest::Approx(curve.min_y()));

  // Realized response approximates floor - curve at sampled frequencies.
  for (double f : {125.0, 500.0, 1000.0, 4000.0, 8000.0}) {
    const double expected = ear.threshold_floor_db() - InterpLogX(curve, f);
    CHECK(ear.GainDb(f) == doctest::Approx(expected).scale(1.0).epsilon(0.15));
  }

  CHECK_THROWS(EarWeightingFilter(48000.0, curve, 30));
  CHECK_THROWS(EarWeightingFilter(48000.0, curve, 32));
}

TEST_CASE("half wave rectification zeroes negative lobes only") {
  ChannelBank bank({500.0}, 6, 48000.0);
  auto ch = bank.channel(0);
  const std::vector<double> in = {-1.0, 0.5, 0.0, -0.25, 2.0, -3.0};
  std::copy(in.begin(), in.end(), ch.begin());
  HalfWaveRectify(&bank);
  CHECK(ch[0] == 0.0);
  CHECK(ch[1] == 0.5);
  CHECK(ch[2] == 0.0);
  CHECK(ch[3] == 0.0);
  CHECK(ch[4] == 2.0);
  CHECK(ch[5] == 0.0);
}

TEST_CASE("one pole lowpass has the matched exponential coefficient") {
  OnePoleLowpass lp(500.0, 48000.0);
  CHECK(lp.coefficient() ==
        doctest::Approx(std::exp(-2.0 * std::numbers::pi * 500.0 / 48000.0))
            .epsilon(1e-12));
  CHECK(lp.coefficient() == doctest::Approx(0.9366466).epsilon(1e-6));

  // Step response settles at the input value.
  double y = 0;
  for (int i = 0; i < 48000; ++i) y = lp.Step(1.0);
  CHECK(y == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("one pole lowpass attenuates by about 3 dB at the cutoff") {
  const double fs = 48000.0, fc = 150.0;
  std::vector<double> x(96000), y(96000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sin(2.0 * std::numbers::pi * fc * i / fs);
  }
  OnePoleLowpass::Filter(fc, fs, x, y);
  double sum = 0;
  for (std::size_t i = 48000; i < y.size(); ++i) sum += y[i] * y[i];
  const double gain_db =
      10.0 * std::log10(sum / 48000.0 / 0.5);
  CHECK(gain_db == doctest::Approx(-3.01).scale(1.0).epsilon(0.15));
}

TEST_CASE("adaptation divides by the smoothed signal above the floor") {
  const AdaptationParams params;
  const double fs = 48000.0;

  // Sub-floor inputs pass through linearly.
  std::vector<double> small(2000, 0.25);
  std::vector<double> expected = small;
  AdaptChannel(small, params, fs);
  for (std::size_t i = 0; i < small.size(); ++i) {
    CHECK(small[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }

  // A large constant settles to one: v / lowpass(v) -> 1, with an onset
  // overshoot before the divisor charges up.
  const double a = std::exp(-2.0 * std::numbers::pi * 500.0 / 48000.0);
  std::vector<double> big(48000, 50.0);
  AdaptChannel(big, params, fs);
  CHECK(big.front() == doctest::Approx(50.0 / ((1.0 - a) * 50.0)).epsilon(1e-9));
  CHECK(big.front() > big.back());
  CHECK(big.back() == doctest::Approx(1.0).epsilon(1e-6));

  // Hand-computed first steps: state follows the one-pole recursion and the
  // divisor is max(state, floor).
  std::vector<double> x = {3.0, 3.0, 3.0};
  double state = 0.0;
  std::vector<double> manual;
  for (double v : x) {
    state += (1.0 - a) * (v - state);
    manual.push_back(v / std::max(state, params.divisor_floor));
  }
  AdaptChannel(x, params, fs);
  for (int i = 0; i < 3; ++i) {
    CHECK(x[i] == doctest::Approx(manual[i]).epsilon(1e-12));
  }
}

TEST_CASE("adaptation keeps rectified banks nonnegative") {
  GammatoneFilterbank fbank(48000.0, {250.0, 1000.0});
  std::vector<double> x(9600);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = 40.0 * std::sin(2.0 * std::numbers::pi * 1000.0 * i / 48000.0);
  }
  ChannelBank bank = fbank.Filter(x);
  HalfWaveRectify(&bank);
  Adapt(&bank, AdaptationParams{});
  for (int p = 0; p < bank.num_channels(); ++p) {
    for (double v : bank.channel(p)) CHECK(v >= 0.0);
  }
}

TEST_CASE("hearing threshold curve is shared and spans the table") {
  const Table& curve = HearingThresholdCurve();
  CHECK(curve.x.front() <= 63.0);
  CHECK(curve.x.back() >= 12500.0);
  CHECK(InterpLogX(curve, 1000.0) == doctest::Approx(2.4).epsilon(1e-12));
  CHECK(&HearingThresholdCurve() == &curve);
}

}  // namespace
}  // namespace bmfd
