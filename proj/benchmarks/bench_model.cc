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
#include <numbers>
#include <vector>

#include <benchmark/benchmark.h>

#include "bmfd/fractional_delay.h"
#include "bmfd/gammatone.h"
#include "bmfd/model.h"
#include "bmfd/model_config.h"
#include "bmfd/periphery.h"
#include "bmfd/stimulus.h"

namespace bmfd {
namespace {

std::vector<double> NoiseBlock(std::size_t n) {
  std::vector<double> x(n);
  double s = 0.123;
  for (auto& v : x) {
    s = std::fmod(s * 997.0 + 0.5, 1.0);
    v = s - 0.5;
  }
  return x;
}

void BM_GammatoneFilterbank(benchmark::State& state) {
  GammatoneFilterbank fbank(48000.0, ThirdOctaveCenters(63.0, 12500.0));
  const auto x = NoiseBlock(24000);
  for (auto _ : state) {
    ChannelBank bank = fbank.Filter(x);
    benchmark::DoNotOptimize(bank.channel(0).data());
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_GammatoneFilterbank);

void BM_EarWeighting(benchmark::State& state) {
  EarWeightingFilter ear(48000.0, HearingThresholdCurve());
  const auto x = NoiseBlock(24000);
  for (auto _ : state) {
    auto y = ear.Apply(x);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_EarWeighting);

void BM_FractionalDelay(benchmark::State& state) {
  const auto x = NoiseBlock(24000);
  std::vector<double> y(x.size());
  for (auto _ : state) {
    FractionalDelay(x, 4.37, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_FractionalDelay);

void BM_Adaptation(benchmark::State& state) {
  auto x = NoiseBlock(24000);
  for (auto& v : x) v = std::abs(v) * 10.0;
  for (auto _ : state) {
    std::vector<double> y = x;
    AdaptChannel(y, AdaptationParams{}, 48000.0);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_Adaptation);

// One full masked-tone evaluation: two stimuli through the whole pipeline.
void BM_EvaluateOneShot(benchmark::State& state) {
  Evaluator evaluator(ModelConfig{}.Normalized());
  BandNoiseSpec noise;
  noise.low_hz = 100.0;
  noise.high_hz = 2000.0;
  noise.level_db = 70.0;
  noise.duration_s = 0.4;
  const StereoSignal masker =
      ToStereo(MakeBandNoise(noise, 7), InterauralMode::kDiotic);
  ToneSpec tone;
  tone.frequency_hz = 500.0;
  tone.level_db = 60.0;
  tone.duration_s = 0.3;
  StereoSignal both = masker;
  MixInto(&both, ToStereo(MakeTone(tone), InterauralMode::kAntiphasic));
  for (auto _ : state) {
    CombinedSnr snr = evaluator.Evaluate(both, masker, state.iterations());
    benchmark::DoNotOptimize(snr);
  }
}
BENCHMARK(BM_EvaluateOneShot)->Unit(benchmark::kMillisecond);

// Threshold-search inner loop: component decompositions are cached once and
// each probe level is a cheap recombination.
void BM_SessionEvaluateTarget(benchmark::State& state) {
  Evaluator evaluator(ModelConfig{}.Normalized());
  BandNoiseSpec noise;
  noise.low_hz = 100.0;
  noise.high_hz = 2000.0;
  noise.level_db = 70.0;
  noise.duration_s = 0.4;
  ToneSpec tone;
  tone.frequency_hz = 500.0;
  tone.level_db = 60.0;
  tone.duration_s = 0.3;
  const std::vector<StereoSignal> components = {
      ToStereo(MakeBandNoise(noise, 7), InterauralMode::kDiotic),
      ToStereo(MakeTone(tone), InterauralMode::kAntiphasic)};
  auto session =
      evaluator.BeginTrial(components, evaluator.DrawJitter(11));
  const std::vector<EarWeights> reference = {{1.0, 1.0}, {0.0, 0.0}};
  session->SetReference(reference);
  double gain = 1.0;
  for (auto _ : state) {
    const std::vector<EarWeights> target = {{1.0, 1.0}, {gain, gain}};
    CombinedSnr snr = session->EvaluateTarget(target);
    benchmark::DoNotOptimize(snr);
    gain = gain > 2.0 ? 1.0 : gain * 1.01;
  }
}
BENCHMARK(BM_SessionEvaluateTarget)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace bmfd

BENCHMARK_MAIN();
