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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "bmfd/fft.h"
#include "bmfd/fractional_delay.h"
#include "bmfd/rng.h"
#include "bmfd/signal.h"
#include "bmfd/tables.h"
#include "bmfd/wav.h"
#include "doctest.h"

namespace bmfd {
namespace {

TEST_CASE("level conversions anchor 100 dB SPL at unit rms") {
  CHECK(DbSplToRms(kCalibrationDbSpl) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(DbSplToRms(65.0) ==
        doctest::Approx(0.017782794100389228).epsilon(1e-12));
  CHECK(RmsToDbSpl(1.0) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(RmsToDbSpl(DbSplToRms(37.5)) == doctest::Approx(37.5).epsilon(1e-12));
}

TEST_CASE("rms of a whole number of sine periods is amplitude over sqrt 2") {
  std::vector<double> x(48000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = 0.8 * std::sin(2.0 * std::numbers::pi * 1000.0 * i / 48000.0);
  }
  CHECK(Rms(x) == doctest::Approx(0.8 / std::numbers::sqrt2).epsilon(1e-9));
}

TEST_CASE("axpy accumulates a scaled vector") {
  std::vector<double> x = {1.0, -2.0, 3.0};
  std::vector<double> y = {10.0, 10.0, 10.0};
  Axpy(0.5, x, y);
  CHECK(y[0] == doctest::Approx(10.5));
  CHECK(y[1] == doctest::Approx(9.0));
  CHECK(y[2] == doctest::Approx(11.5));
}

TEST_CASE("channel bank exposes contiguous per-channel spans") {
  ChannelBank bank({100.0, 200.0}, 8, 48000.0);
  CHECK(bank.num_channels() == 2);
  CHECK(bank.num_samples() == 8);
  CHECK(bank.center_frequency(1) == 200.0);
  bank.channel(0)[3] = 7.0;
  bank.channel(1)[3] = -7.0;
  CHECK(bank.channel(0)[3] == 7.0);
  CHECK(bank.channel(1)[3] == -7.0);
}

TEST_CASE("random stream is deterministic per seed") {
  RandomStream a(99), b(99), c(100);
  bool all_equal = true, any_differs = false;
  for (int i = 0; i < 16; ++i) {
    const double va = a.Uniform();
    all_equal = all_equal && va == b.Uniform();
    any_differs = any_differs || va != c.Uniform();
  }
  CHECK(all_equal);
  CHECK(any_differs);
}

TEST_CASE("gaussian draws have standard moments") {
  RandomStream rng(7);
  const int n = 200000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.Gaussian();
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("splitmix64 matches the published sequence for seed zero") {
  std::uint64_t state = 0;
  CHECK(SplitMix64(state) == 0xe220a8397b1dcdafULL);
  CHECK(SplitMix64(state) == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("hash tag is 64-bit FNV-1a") {
  CHECK(HashTag("") == 0xcbf29ce484222325ULL);
  CHECK(HashTag("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("mix seed separates tags and indices") {
  const std::uint64_t s = MixSeed(1234, "scope", 0, 1);
  CHECK(s == MixSeed(1234, "scope", 0, 1));
  CHECK(s != MixSeed(1234, "scope", 0, 2));
  CHECK(s != MixSeed(1234, "scope", 1, 1));
  CHECK(s != MixSeed(1234, "other", 0, 1));
  CHECK(s != MixSeed(1235, "scope", 0, 1));
}

TEST_CASE("real fft of a small vector matches the hand computed bins") {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  const auto bins = RealFft(x);
  REQUIRE(bins.size() == 3);
  CHECK(bins[0].real() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(bins[0].imag() == doctest::Approx(0.0).scale(1.0));
  CHECK(bins[1].real() == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(bins[1].imag() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(bins[2].real() == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("inverse real fft round trips") {
  std::vector<double> x(257);
  RandomStream rng(3);
  for (double& v : x) v = rng.Gaussian();
  const auto bins = RealFft(x);
  const auto back = InverseRealFft(bins, x.size());
  REQUIRE(back.size() == x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("fft convolution matches the direct sum") {
  const std::vector<double> x = {1.0, 0.5, -0.25, 2.0};
  const std::vector<double> h = {0.5, -1.0, 0.125};
  const auto y = FftConvolve(x, h);
  REQUIRE(y.size() == x.size() + h.size() - 1);
  for (std::size_t n = 0; n < y.size(); ++n) {
    double direct = 0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      if (n >= k && n - k < x.size()) direct += h[k] * x[n - k];
    }
    CHECK(y[n] == doctest::Approx(direct).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("integer sample delays shift exactly") {
  std::vector<double> x(256, 0.0);
  x[100] = 1.0;
  const auto y = Delayed(x, 12.0);
  REQUIRE(y.size() == x.size());
  CHECK(y[112] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(y[100]) < 1e-12);
  CHECK(std::abs(y[111]) < 1e-12);
}

TEST_CASE("fractional delay of a sine is a phase shift") {
  const double f = 1000.0, fs = 48000.0, delay = 3.71;
  std::vector<double> x(4096);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sin(2.0 * std::numbers::pi * f * i / fs);
  }
  const auto y = Delayed(x, delay);
  for (std::size_t i = 200; i < x.size() - 200; ++i) {
    const double expect =
        std::sin(2.0 * std::numbers::pi * f * (i - delay) / fs);
    CHECK(y[i] == doctest::Approx(expect).scale(1.0).epsilon(1e-6));
  }
}

TEST_CASE("free field threshold table interpolates through its nodes") {
  const Table table = LoadTwoColumnTable(DataFile("iso389_7_free_field.txt"));
  CHECK(InterpLogX(table, 500.0) == doctest::Approx(4.4).epsilon(1e-12));
  CHECK(InterpLogX(table, 1000.0) == doctest::Approx(2.4).epsilon(1e-12));
  CHECK(InterpLogX(table, 12500.0) == doctest::Approx(12.3).epsilon(1e-12));
  const double mid = InterpLogX(table, 707.0);
  CHECK(mid < 4.4);
  CHECK(mid > 2.4);
  CHECK(table.min_y() == doctest::Approx(-6.0).epsilon(1e-12));
}

TEST_CASE("wav io round trips both sample formats") {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "bmfd_wav_test";
  std::filesystem::create_directories(dir);

  StereoSignal s;
  s.sample_rate = 48000.0;
  RandomStream rng(11);
  for (int i = 0; i < 480; ++i) {
    s.left.push_back(0.4 * rng.Gaussian());
    s.right.push_back(0.4 * rng.Gaussian());
  }

  const std::string float_path = (dir / "f32.wav").string();
  WriteWav(float_path, s, WavFormat::kFloat32);
  const WavData f = ReadWav(float_path);
  REQUIRE(f.channels.size() == 2);
  CHECK(f.sample_rate == 48000.0);
  for (int i = 0; i < 480; ++i) {
    CHECK(f.channels[0][i] ==
          doctest::Approx(s.left[i]).epsilon(1e-6).scale(1.0));
  }

  const std::string pcm_path = (dir / "p16.wav").string();
  WriteWav(pcm_path, s, WavFormat::kPcm16);
  const WavData p = ReadWav(pcm_path);
  for (int i = 0; i < 480; ++i) {
    CHECK(std::abs(p.channels[1][i] - s.right[i]) <= 1.0 / 32768.0 + 1e-9);
  }
}

TEST_CASE("unsupported wav bit depths are rejected") {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "bmfd_wav_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "bad24.wav").string();

  // Minimal PCM header advertising 24-bit samples.
  const std::uint32_t sample_rate = 48000;
  const std::uint16_t channels = 1, bits = 24;
  const std::uint16_t block = channels * bits / 8;
  const std::uint32_t byte_rate = sample_rate * block;
  const std::uint32_t data_size = 6;
  std::ofstream out(path, std::ios::binary);
  auto put16 = [&out](std::uint16_t v) {
    out.put(static_cast<char>(v & 0xff));
    out.put(static_cast<char>(v >> 8));
  };
  auto put32 = [&out](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  out.write("RIFF", 4);
  put32(36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put32(16);
  put16(1);
  put16(channels);
  put32(sample_rate);
  put32(byte_rate);
  put16(block);
  put16(bits);
  out.write("data", 4);
  put32(data_size);
  for (std::uint32_t i = 0; i < data_size; ++i) out.put('\0');
  out.close();

  CHECK_THROWS(ReadWav(path));
  CHECK_THROWS(ReadWav((dir / "missing.wav").string()));
}

}  // namespace
}  // namespace bmfd
