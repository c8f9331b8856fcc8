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

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "bmfd/fft.h"
#include "bmfd/signal.h"
#include "bmfd/stimulus.h"
#include "doctest.h"

namespace bmfd {
namespace {

double SteadyRms(const std::vector<double>& x, std::size_t skip) {
  double sum = 0;
  for (std::size_t i = skip; i < x.size() - skip; ++i) sum += x[i] * x[i];
  return std::sqrt(sum / static_cast<double>(x.size() - 2 * skip));
}

TEST_CASE("tones hit the requested level and frequency") {
  ToneSpec spec;
  spec.frequency_hz = 1000.0;
  spec.level_db = 65.0;
  spec.duration_s = 0.5;
  const Signal tone = MakeTone(spec);
  REQUIRE(tone.size() == 24000);

  // Steady portion away from the 10 ms ramps.
  CHECK(SteadyRms(tone.samples, 960) ==
        doctest::Approx(DbSplToRms(65.0)).epsilon(1e-4));

  int zero_crossings = 0;
  for (std::size_t i = 961; i < tone.size() - 960; ++i) {
    if (tone.samples[i - 1] < 0.0 && tone.samples[i] >= 0.0) ++zero_crossings;
  }
  const double measured_hz =
      zero_crossings / ((tone.size() - 2 * 960.0) / tone.sample_rate);
  CHECK(measured_hz == doctest::Approx(1000.0).epsilon(0.01));
}

TEST_CASE("ramps taper the edges to zero") {
  ToneSpec spec;
  spec.ramp_s = 0.010;
  const Signal tone = MakeTone(spec);
  CHECK(tone.samples.front() == doctest::Approx(0.0).scale(1.0));
  CHECK(tone.samples.back() == doctest::Approx(0.0).scale(1.0).epsilon(1e-3));
  CHECK(std::abs(tone.samples[100]) <
        std::numbers::sqrt2 * DbSplToRms(spec.level_db));
}

TEST_CASE("sine amplitude modulation changes power as depth squared") {
  ToneSpec spec;
  spec.frequency_hz = 4000.0;
  spec.level_db = 65.0;
  spec.duration_s = 1.0;
  spec.ramp_s = 0.0;

  Signal plain = MakeTone(spec);
  Signal modulated = plain;
  ApplySineAm(&modulated, 16.0, 1.0, /*equal_power=*/false);
  const double ratio = std::pow(Rms(modulated.samples), 2) /
                       std::pow(Rms(plain.samples), 2);
  CHECK(ratio == doctest::Approx(1.5).epsilon(0.01));

  Signal equalized = plain;
  ApplySineAm(&equalized, 16.0, 1.0, /*equal_power=*/true);
  CHECK(Rms(equalized.samples) ==
        doctest::Approx(Rms(plain.samples)).epsilon(0.01));

  Signal square = plain;
  ApplySquareAm(&square, 16.0, 0.5, /*equal_power=*/false);
  const double square_ratio = std::pow(Rms(square.samples), 2) /
                              std::pow(Rms(plain.samples), 2);
  CHECK(square_ratio == doctest::Approx(1.25).epsilon(0.01));

  CHECK_THROWS(ApplySineAm(&plain, 16.0, 1.5));
}

TEST_CASE("band noise levels and spectral confinement") {
  BandNoiseSpec spec;
  spec.low_hz = 20.0;
  spec.high_hz = 5000.0;
  spec.level_db = 40.0;
  spec.level_is_spectrum_db_hz = true;
  spec.duration_s = 0.5;
  CHECK(OverallLevelDb(spec) ==
        doctest::Approx(40.0 + 10.0 * std::log10(4980.0)).epsilon(1e-12));

  const Signal noise = MakeBandNoise(spec, 1234);
  CHECK(RmsToDbSpl(Rms(noise.samples)) ==
        doctest::Approx(OverallLevelDb(spec)).scale(1.0).epsilon(0.005));

  const auto bins = RealFft(noise.samples);
  const double bin_hz = spec.sample_rate / static_cast<double>(noise.size());
  double in_band = 0, out_band = 0;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const double f = k * bin_hz;
    const double p = std::norm(bins[k]);
    // The edge ramps leak a little energy into neighbouring bins.
    if (f >= spec.low_hz - 50.0 && f <= spec.high_hz + 50.0) {
      in_band += p;
    } else {
      out_band += p;
    }
  }
  CHECK(out_band < 0.01 * in_band);

  BandNoiseSpec bad = spec;
  bad.high_hz = spec.low_hz;
  CHECK_THROWS(MakeBandNoise(bad, 1));
}

TEST_CASE("band noise tokens are deterministic per seed") {
  BandNoiseSpec spec;
  const Signal a = MakeBandNoise(spec, 42);
  const Signal b = MakeBandNoise(spec, 42);
  const Signal c = MakeBandNoise(spec, 43);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
}

TEST_CASE("speech envelope noise is level calibrated and slowly modulated") {
  SpeechEnvelopeNoiseSpec spec;
  spec.level_db = 65.0;
  spec.duration_s = 2.0;
  const Signal s = MakeSpeechEnvelopeNoise(spec, 7);
  REQUIRE(s.size() == 96000);
  CHECK(RmsToDbSpl(Rms(s.samples)) == doctest::Approx(65.0).epsilon(0.005));

  // Instantaneous power concentrated in slow fluctuations: compare the
  // energy of the squared signal below 16 Hz against 64-256 Hz.
  std::vector<double> sq(s.samples.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = s.samples[i] * s.samples[i];
  const auto bins = RealFft(sq);
  const double bin_hz = s.sample_rate / static_cast<double>(sq.size());
  double slow = 0, fast = 0;
  for (std::size_t k = 1; k < bins.size(); ++k) {
    const double f = k * bin_hz;
    if (f <= 16.0) slow += std::norm(bins[k]);
    if (f >= 64.0 && f <= 256.0) fast += std::norm(bins[k]);
  }
  CHECK(slow > 10.0 * fast);
}

TEST_CASE("interaural placement modes") {
  ToneSpec spec;
  spec.duration_s = 0.1;
  const Signal tone = MakeTone(spec);

  const StereoSignal diotic = ToStereo(tone, InterauralMode::kDiotic);
  CHECK(diotic.left == tone.samples);
  CHECK(diotic.right == tone.samples);

  const StereoSignal anti = ToStereo(tone, InterauralMode::kAntiphasic);
  CHECK(anti.left == tone.samples);
  for (std::size_t i = 0; i < tone.size(); ++i) {
    CHECK(anti.right[i] == -tone.samples[i]);
  }

  const StereoSignal mono = ToStereo(tone, InterauralMode::kLeftOnly);
  CHECK(mono.left == tone.samples);
  CHECK(Rms(mono.right) == 0.0);

  const StereoSignal right = ToStereo(tone, InterauralMode::kRightOnly);
  CHECK(right.right == tone.samples);
  CHECK(Rms(right.left) == 0.0);
}

TEST_CASE("positive interaural delays lag the right ear") {
  Signal impulse;
  impulse.samples.assign(4096, 0.0);
  impulse.samples[2000] = 1.0;
  StereoSignal s = ToStereo(impulse, InterauralMode::kDiotic);
  ApplyItd(&s, 0.25e-3);  // 12 samples at 48 kHz
  CHECK(s.left[2000] == doctest::Approx(1.0));
  CHECK(s.right[2012] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(s.right[2000]) < 1e-9);

  StereoSignal t = ToStereo(impulse, InterauralMode::kDiotic);
  ApplyItd(&t, -0.25e-3);
  CHECK(t.left[2012] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(t.right[2000] == doctest::Approx(1.0));
}

TEST_CASE("interaural level differences split evenly across ears") {
  Signal tone = MakeTone(ToneSpec{});
  StereoSignal s = ToStereo(tone, InterauralMode::kDiotic);
  ApplyIid(&s, 2.0);
  const double left_gain = Rms(s.left) / Rms(tone.samples);
  const double right_gain = Rms(s.right) / Rms(tone.samples);
  CHECK(left_gain == doctest::Approx(std::pow(10.0, 0.05)).epsilon(1e-9));
  CHECK(right_gain == doctest::Approx(std::pow(10.0, -0.05)).epsilon(1e-9));
  CHECK(left_gain / right_gain ==
        doctest::Approx(std::pow(10.0, 0.1)).epsilon(1e-9));
}

TEST_CASE("phase transition maskers flip the right ear sign at the switch") {
  PhaseTransitionSpec spec;
  spec.duration_s = 0.2;
  spec.transition_s = 0.1;
  spec.first_sign = 1;
  spec.second_sign = -1;
  spec.second_offset_db = -15.0;
  spec.ramp_s = 0.0;
  const StereoSignal s = MakePhaseTransitionMasker(spec, 99);
  const std::size_t switch_at = 4800;
  for (std::size_t i = 100; i < switch_at; i += 37) {
    CHECK(s.right[i] == doctest::Approx(s.left[i]).scale(1.0));
  }
  for (std::size_t i = switch_at + 100; i < s.size(); i += 37) {
    CHECK(s.right[i] == doctest::Approx(-s.left[i]).scale(1.0));
  }

  // The second segment carries the -15 dB offset relative to the token.
  const StereoSignal flat = MakePhaseTransitionMasker(
      [] {
        PhaseTransitionSpec p;
        p.duration_s = 0.2;
        p.transition_s = 0.1;
        p.second_offset_db = 0.0;
        p.ramp_s = 0.0;
        return p;
      }(),
      99);
  const double measured = 20.0 * std::log10(std::abs(s.left[switch_at + 500]) /
                                            std::abs(flat.left[switch_at + 500]));
  CHECK(measured == doctest::Approx(-15.0).epsilon(1e-6));

  PhaseTransitionSpec bad = spec;
  bad.transition_s = 0.3;
  CHECK_THROWS(MakePhaseTransitionMasker(bad, 1));
}

TEST_CASE("mix into accumulates stereo components") {
  StereoSignal acc = StereoSignal::Silence(48000.0, 16);
  StereoSignal add = StereoSignal::Silence(48000.0, 16);
  add.left[3] = 2.0;
  add.right[5] = -4.0;
  MixInto(&acc, add, 0.5);
  MixInto(&acc, add, 0.25);
  CHECK(acc.left[3] == doctest::Approx(1.5));
  CHECK(acc.right[5] == doctest::Approx(-3.0));

  StereoSignal wrong = StereoSignal::Silence(48000.0, 8);
  CHECK_THROWS(MixInto(&acc, wrong));
}

}  // namespace
}  // namespace bmfd
