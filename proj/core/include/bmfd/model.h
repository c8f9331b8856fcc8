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

#ifndef BMFD_MODEL_H_
#define BMFD_MODEL_H_

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "bmfd/bmfd_stage.h"
#include "bmfd/decision.h"
#include "bmfd/features.h"
#include "bmfd/gammatone.h"
#include "bmfd/model_config.h"
#include "bmfd/periphery.h"
#include "bmfd/signal.h"

namespace bmfd {

// Per-component, per-ear weights for stimuli expressed as linear
// combinations of cached components.
struct EarWeights {
  double left = 0.0;
  double right = 0.0;
};

struct ModelDiagnostics {
  PooledSnr pooled;
  std::array<CombinedSnr, kNumBmfdChannels> per_channel{};
  std::array<bool, kNumBmfdChannels> channel_present{};
};

// End-to-end model: audibility weighting, gammatone filtering, internal
// gain/timing noise, rectification, divisive adaptation, the five-channel
// decoder, and the envelope/power feature reduction.
class Evaluator {
 public:
  class TrialSession;

  explicit Evaluator(const ModelConfig& config);
  ~Evaluator();
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  const ModelConfig& config() const { return config_; }
  const std::vector<double>& centers() const { return fbank_.centers(); }
  const GammatoneFilterbank& filterbank() const { return fbank_; }
  const EarWeightingFilter& ear_filter() const { return ear_; }
  const FeatureParams& feature_params() const { return feat_; }

  // A fresh draw of the internal noise (the identity when jitter is
  // disabled). One draw must be shared by the two evaluations of a trial.
  JitterState DrawJitter(std::uint64_t seed) const;

  // Decoder-channel banks for a stimulus; channels outside the subset stay
  // empty.
  BmfdBanks DecodeBanks(const StereoSignal& stimulus,
                        const JitterState& jitter,
                        ChannelSubset subset) const;

  struct StimulusFeatures {
    std::array<DcGrid, kNumBmfdChannels> dc;
    std::array<EnvGrid, kNumBmfdChannels> env;
  };
  StimulusFeatures Process(const StereoSignal& stimulus,
                           const JitterState& jitter) const;

  CombinedSnr Compare(const StimulusFeatures& target,
                      const StimulusFeatures& reference,
                      ModelDiagnostics* diagnostics = nullptr) const;

  // One-shot evaluation of target-plus-masker against masker-alone with a
  // single shared jitter draw.
  CombinedSnr Evaluate(const StereoSignal& target_plus_masker,
                       const StereoSignal& masker_alone,
                       std::uint64_t jitter_seed,
                       ModelDiagnostics* diagnostics = nullptr) const;

  // Opens a trial over fixed stereo components. The session caches the
  // linear per-channel decompositions (including the jitter and
  // contralateral delays), so that stimuli which are linear combinations
  // of the components can be evaluated repeatedly at low cost.
  std::unique_ptr<TrialSession> BeginTrial(
      const std::vector<StereoSignal>& components,
      const JitterState& jitter) const;

 private:
  void AccumulateFeatures(const BmfdBanks& banks, StimulusFeatures* out) const;

  ModelConfig config_;
  EarWeightingFilter ear_;
  GammatoneFilterbank fbank_;
  FeatureParams feat_;
  ModulationFilterbank mod_bank_;
};

class Evaluator::TrialSession {
 public:
  ~TrialSession();

  int num_components() const { return static_cast<int>(components_.size()); }

  // Caches the reference (e.g. masker-alone) features for the trial.
  void SetReference(std::span<const EarWeights> weights);
  bool has_reference() const { return has_reference_; }

  CombinedSnr EvaluateTarget(std::span<const EarWeights> weights,
                             ModelDiagnostics* diagnostics = nullptr);

 private:
  friend class Evaluator;

  struct ComponentBank {
    // [variant][ear]: channel-major float block, empty if that ear of the
    // component is silent. Variant 0 carries the jitter delay, variant 1
    // additionally the contralateral delay.
    std::array<std::array<std::vector<float>, 2>, 2> data;
  };

  TrialSession(const Evaluator& evaluator,
               const std::vector<StereoSignal>& components,
               const JitterState& jitter);
  StimulusFeatures ComputeFeatures(std::span<const EarWeights> weights) const;

  const Evaluator& eval_;
  JitterState jitter_;
  std::size_t num_samples_ = 0;
  std::vector<ComponentBank> components_;
  bool need_[2][2] = {{false, false}, {false, false}};  // [ear][variant]
  bool has_reference_ = false;
  StimulusFeatures reference_;
};

// Steady-state power of each decoder channel in response to a tone with a
// given interaural configuration, measured on the on-frequency channel.
// Positive ipd_rad means the left ear leads; positive ild_db makes the
// left ear more intense (split across the ears); right_offset_db is an
// additional right-ear level offset.
struct ToneResponseQuery {
  double tone_hz = 500.0;
  double level_db = 65.0;
  double ipd_rad = 0.0;
  double ild_db = 0.0;
  double right_offset_db = 0.0;
  double duration_s = 0.3;
  double ramp_s = 0.02;
};
struct ToneResponse {
  std::array<double, kNumBmfdChannels> power{};
  int channel_index = -1;
};
ToneResponse ComputeToneResponse(const Evaluator& evaluator,
                                 const ToneResponseQuery& query);

}  // namespace bmfd

#endif  // BMFD_MODEL_H_
