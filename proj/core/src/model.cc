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

#include "bmfd/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bmfd/fractional_delay.h"
#include "bmfd/stimulus.h"

namespace bmfd {
namespace {

bool AllZero(std::span<const double> x) {
  for (double v : x)
    if (v != 0.0) return false;
  return true;
}

struct VariantNeeds {
  // [ear][variant]; ear 0 = left, variant 0 = nominal timing, variant 1 =
  // with the contralateral delay.
  bool need[2][2] = {{false, false}, {false, false}};
};

VariantNeeds NeedsFor(ChannelSubset subset) {
  VariantNeeds needs;
  const bool be_l = SubsetIncludes(subset, BmfdChannel::kBeL);
  const bool be_r = SubsetIncludes(subset, BmfdChannel::kBeR);
  const bool bi_l = SubsetIncludes(subset, BmfdChannel::kBiL);
  const bool bi_c = SubsetIncludes(subset, BmfdChannel::kBiC);
  const bool bi_r = SubsetIncludes(subset, BmfdChannel::kBiR);
  needs.need[0][0] = be_l || bi_l || bi_c;
  needs.need[1][0] = be_r || bi_r || bi_c;
  needs.need[0][1] = bi_r;
  needs.need[1][1] = bi_l;
  return needs;
}

}  // namespace

Evaluator::Evaluator(const ModelConfig& config)
    : config_(config.Normalized()),
      ear_(config_.sample_rate, HearingThresholdCurve(),
           config_.ear_filter_taps),
      fbank_(config_.sample_rate,
             ThirdOctaveCenters(config_.channel_low_hz,
                                config_.channel_high_hz)),
      feat_(config_.features),
      mod_bank_(config_.features,
                config_.sample_rate /
                    static_cast<double>(config_.features.decimation_factor)) {
  if (fbank_.num_channels() == 0)
    throw std::invalid_argument("Evaluator: empty channel range");
  feat_.audibility_floor_db = ear_.threshold_floor_db();
}

Evaluator::~Evaluator() = default;

JitterState Evaluator::DrawJitter(std::uint64_t seed) const {
  if (!config_.bmfd.jitter_enabled)
    return JitterState::None(fbank_.num_channels());
  RandomStream rng(seed);
  return JitterState::Draw(fbank_.num_channels(), config_.bmfd, &rng);
}

BmfdBanks Evaluator::DecodeBanks(const StereoSignal& stimulus,
                                 const JitterState& jitter,
                                 ChannelSubset subset) const {
  if (stimulus.sample_rate != config_.sample_rate)
    throw std::invalid_argument("DecodeBanks: sample rate mismatch");
  if (stimulus.left.size() != stimulus.right.size())
    throw std::invalid_argument("DecodeBanks: channel length mismatch");
  const std::size_t n = stimulus.left.size();
  if (n == 0) throw std::invalid_argument("DecodeBanks: empty stimulus");
  const int channels = fbank_.num_channels();
  const VariantNeeds needs = NeedsFor(subset);

  ChannelBank adapted[2][2] = {
      {ChannelBank(fbank_.centers(), n, config_.sample_rate),
       ChannelBank(fbank_.centers(), n, config_.sample_rate)},
      {ChannelBank(fbank_.centers(), n, config_.sample_rate),
       ChannelBank(fbank_.centers(), n, config_.sample_rate)}};

  for (int ear = 0; ear < 2; ++ear) {
    if (!needs.need[ear][0] && !needs.need[ear][1]) continue;
    const std::vector<double>& x =
        ear == 0 ? stimulus.left : stimulus.right;
    if (AllZero(x)) continue;
    const std::vector<double> weighted = ear_.Apply(x);
    const ChannelBank linear = fbank_.Filter(weighted);
    const std::vector<double>& gains =
        ear == 0 ? jitter.gain_left : jitter.gain_right;
    const std::vector<double>& delays =
        ear == 0 ? jitter.delay_left_s : jitter.delay_right_s;
    for (int p = 0; p < channels; ++p) {
      const auto src = linear.channel(p);
      for (int v = 0; v < 2; ++v) {
        if (!needs.need[ear][v]) continue;
        double delay_s = delays[p];
        if (v == 1)
          delay_s += ContralateralDelaySeconds(config_.bmfd,
                                               fbank_.centers()[p]);
        auto dst = adapted[ear][v].channel(p);
        FractionalDelay(src, delay_s * config_.sample_rate, dst);
        const double g = gains[p];
        for (double& s : dst) s = std::max(g * s, 0.0);
        AdaptChannel(dst, config_.adaptation, config_.sample_rate);
      }
    }
  }
  return CombineBmfd(adapted[0][0], adapted[0][1], adapted[1][0],
                     adapted[1][1], config_.bmfd.inhibition_weight, subset);
}

void Evaluator::AccumulateFeatures(const BmfdBanks& banks,
                                   StimulusFeatures* out) const {
  for (int c = 0; c < kNumBmfdChannels; ++c) {
    const ChannelBank& bank = banks.channel[c];
    if (bank.num_channels() == 0) continue;
    const ChannelBank envelope = ExtractEnvelope(bank, feat_);
    out->dc[c] = ComputeDcGrid(envelope, feat_);
    out->env[c] = ComputeEnvGrid(envelope, mod_bank_, feat_);
  }
}

Evaluator::StimulusFeatures Evaluator::Process(const StereoSignal& stimulus,
                                               const JitterState& jitter) const {
  StimulusFeatures features;
  AccumulateFeatures(DecodeBanks(stimulus, jitter, config_.subset), &features);
  return features;
}

CombinedSnr Evaluator::Compare(const StimulusFeatures& target,
                               const StimulusFeatures& reference,
                               ModelDiagnostics* diagnostics) const {
  std::vector<SnrGrids> grids;
  std::vector<int> used;
  for (int c = 0; c < kNumBmfdChannels; ++c) {
    if (!SubsetIncludes(config_.subset, static_cast<BmfdChannel>(c))) continue;
    grids.push_back(ComputeSnr(target.dc[c], target.env[c], reference.dc[c],
                               reference.env[c], feat_, fbank_.centers()));
    used.push_back(c);
  }
  if (grids.empty()) throw std::logic_error("Compare: no decoder channels");

  std::vector<const SnrGrids*> ptrs;
  ptrs.reserve(grids.size());
  for (const SnrGrids& g : grids) ptrs.push_back(&g);
  const PooledSnr pooled = PoolAcrossChannels(ptrs);
  const CombinedSnr combined = CombineDomains(pooled, config_.decision);

  if (diagnostics != nullptr) {
    diagnostics->pooled = pooled;
    diagnostics->channel_present.fill(false);
    for (std::size_t i = 0; i < used.size(); ++i) {
      diagnostics->channel_present[used[i]] = true;
      const SnrGrids* one[] = {ptrs[i]};
      diagnostics->per_channel[used[i]] =
          CombineDomains(PoolAcrossChannels(one), config_.decision);
    }
  }
  return combined;
}

CombinedSnr Evaluator::Evaluate(const StereoSignal& target_plus_masker,
                                const StereoSignal& masker_alone,
                                std::uint64_t jitter_seed,
                                ModelDiagnostics* diagnostics) const {
  const JitterState jitter = DrawJitter(jitter_seed);
  const StimulusFeatures target = Process(target_plus_masker, jitter);
  const StimulusFeatures reference = Process(masker_alone, jitter);
  return Compare(target, reference, diagnostics);
}

std::unique_ptr<Evaluator::TrialSession> Evaluator::BeginTrial(
    const std::vector<StereoSignal>& components,
    const JitterState& jitter) const {
  return std::unique_ptr<TrialSession>(
      new TrialSession(*this, components, jitter));
}

Evaluator::TrialSession::~TrialSession() = default;

Evaluator::TrialSession::TrialSession(
    const Evaluator& evaluator, const std::vector<StereoSignal>& components,
    const JitterState& jitter)
    : eval_(evaluator), jitter_(jitter) {
  if (components.empty())
    throw std::invalid_argument("TrialSession: no components");
  num_samples_ = components.front().size();
  const double fs = eval_.config_.sample_rate;
  for (const StereoSignal& c : components) {
    if (c.sample_rate != fs)
      throw std::invalid_argument("TrialSession: sample rate mismatch");
    if (c.size() != num_samples_ || c.right.size() != c.left.size())
      throw std::invalid_argument("TrialSession: component length mismatch");
  }
  if (num_samples_ == 0)
    throw std::invalid_argument("TrialSession: empty components");

  const VariantNeeds needs = NeedsFor(eval_.config_.subset);
  for (int ear = 0; ear < 2; ++ear)
    for (int v = 0; v < 2; ++v) need_[ear][v] = needs.need[ear][v];

  const int channels = eval_.fbank_.num_channels();
  components_.resize(components.size());
  std::vector<double> delayed(num_samples_);
  for (std::size_t ci = 0; ci < components.size(); ++ci) {
    for (int ear = 0; ear < 2; ++ear) {
      if (!need_[ear][0] && !need_[ear][1]) continue;
      const std::vector<double>& x =
          ear == 0 ? components[ci].left : components[ci].right;
      if (AllZero(x)) continue;
      const std::vector<double> weighted = eval_.ear_.Apply(x);
      const ChannelBank linear = eval_.fbank_.Filter(weighted);
      const std::vector<double>& delays =
          ear == 0 ? jitter_.delay_left_s : jitter_.delay_right_s;
      for (int v = 0; v < 2; ++v) {
        if (!need_[ear][v]) continue;
        std::vector<float>& block = components_[ci].data[v][ear];
        block.resize(static_cast<std::size_t>(channels) * num_samples_);
        for (int p = 0; p < channels; ++p) {
          double delay_s = delays[p];
          if (v == 1)
            delay_s += ContralateralDelaySeconds(eval_.config_.bmfd,
                                                 eval_.fbank_.centers()[p]);
          FractionalDelay(linear.channel(p), delay_s * fs, delayed);
          float* dst = block.data() + static_cast<std::size_t>(p) * num_samples_;
          for (std::size_t i = 0; i < num_samples_; ++i)
            dst[i] = static_cast<float>(delayed[i]);
        }
      }
    }
  }
}

Evaluator::StimulusFeatures Evaluator::TrialSession::ComputeFeatures(
    std::span<const EarWeights> weights) const {
  if (weights.size() != components_.size())
    throw std::invalid_argument("TrialSession: weight count mismatch");
  const int channels = eval_.fbank_.num_channels();
  const double fs = eval_.config_.sample_rate;

  ChannelBank adapted[2][2];
  for (int ear = 0; ear < 2; ++ear) {
    for (int v = 0; v < 2; ++v) {
      adapted[ear][v] =
          ChannelBank(eval_.fbank_.centers(), num_samples_, fs);
      if (!need_[ear][v]) continue;
      bool any = false;
      for (std::size_t ci = 0; ci < components_.size(); ++ci) {
        const double w = ear == 0 ? weights[ci].left : weights[ci].right;
        if (w == 0.0 || components_[ci].data[v][ear].empty()) continue;
        any = true;
        const float* src = components_[ci].data[v][ear].data();
        for (int p = 0; p < channels; ++p) {
          auto dst = adapted[ear][v].channel(p);
          const float* s = src + static_cast<std::size_t>(p) * num_samples_;
          for (std::size_t i = 0; i < num_samples_; ++i)
            dst[i] += w * static_cast<double>(s[i]);
        }
      }
      if (!any) continue;
      const std::vector<double>& gains =
          ear == 0 ? jitter_.gain_left : jitter_.gain_right;
      for (int p = 0; p < channels; ++p) {
        auto dst = adapted[ear][v].channel(p);
        const double g = gains[p];
        for (double& s : dst) s = std::max(g * s, 0.0);
        AdaptChannel(dst, eval_.config_.adaptation, fs);
      }
    }
  }
  const BmfdBanks banks =
      CombineBmfd(adapted[0][0], adapted[0][1], adapted[1][0], adapted[1][1],
                  eval_.config_.bmfd.inhibition_weight, eval_.config_.subset);
  StimulusFeatures features;
  eval_.AccumulateFeatures(banks, &features);
  return features;
}

void Evaluator::TrialSession::SetReference(
    std::span<const EarWeights> weights) {
  reference_ = ComputeFeatures(weights);
  has_reference_ = true;
}

CombinedSnr Evaluator::TrialSession::EvaluateTarget(
    std::span<const EarWeights> weights, ModelDiagnostics* diagnostics) {
  if (!has_reference_)
    throw std::logic_error("TrialSession: reference not set");
  const StimulusFeatures target = ComputeFeatures(weights);
  return eval_.Compare(target, reference_, diagnostics);
}

ToneResponse ComputeToneResponse(const Evaluator& evaluator,
                                 const ToneResponseQuery& query) {
  const ModelConfig& config = evaluator.config();
  ToneSpec tone;
  tone.frequency_hz = query.tone_hz;
  tone.duration_s = query.duration_s;
  tone.ramp_s = query.ramp_s;
  tone.sample_rate = config.sample_rate;

  tone.level_db = query.level_db + query.ild_db / 2.0;
  const Signal left = MakeTone(tone);
  tone.level_db = query.level_db - query.ild_db / 2.0 + query.right_offset_db;
  tone.phase_rad = -query.ipd_rad;
  const Signal right = MakeTone(tone);

  StereoSignal stimulus;
  stimulus.sample_rate = config.sample_rate;
  stimulus.left = left.samples;
  stimulus.right = right.samples;

  const JitterState none =
      JitterState::None(evaluator.filterbank().num_channels());
  const BmfdBanks banks =
      evaluator.DecodeBanks(stimulus, none, ChannelSubset::kAll5);

  ToneResponse response;
  const auto& centers = evaluator.centers();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < centers.size(); ++p) {
    const double d = std::abs(std::log(centers[p] / query.tone_hz));
    if (d < best) {
      best = d;
      response.channel_index = static_cast<int>(p);
    }
  }

  const std::size_t lo =
      static_cast<std::size_t>(std::lround(0.35 * query.duration_s *
                                           config.sample_rate));
  const std::size_t hi =
      static_cast<std::size_t>(std::lround(0.85 * query.duration_s *
                                           config.sample_rate));
  for (int c = 0; c < kNumBmfdChannels; ++c) {
    const ChannelBank& bank = banks.channel[c];
    if (bank.num_channels() == 0) continue;
    const auto x = bank.channel(response.channel_index);
    double sum = 0.0;
    for (std::size_t i = lo; i < hi && i < x.size(); ++i) sum += x[i] * x[i];
    response.power[c] = sum / static_cast<double>(hi - lo);
  }
  return response;
}

}  // namespace bmfd
