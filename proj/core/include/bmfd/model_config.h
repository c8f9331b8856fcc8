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

#ifndef BMFD_MODEL_CONFIG_H_
#define BMFD_MODEL_CONFIG_H_

#include <cstdint>
#include <string>

#include "bmfd/bmfd_stage.h"
#include "bmfd/decision.h"
#include "bmfd/features.h"
#include "bmfd/periphery.h"

namespace bmfd {

struct ModelConfig {
  double sample_rate = 48000.0;
  double channel_low_hz = 63.0;
  double channel_high_hz = 12500.0;
  int ear_filter_taps = 4097;
  AdaptationParams adaptation;
  BmfdParams bmfd;
  ChannelSubset subset = ChannelSubset::kAll5;
  FeatureParams features;
  DecisionParams decision;
  ObserverParams observer;
  // Restricts channels to the speech range and enables band-importance
  // weighting of the power-domain ratios.
  bool intelligibility_mode = false;

  // Returns a copy with mode-dependent fields resolved (channel range and
  // band-importance flag under intelligibility mode).
  ModelConfig Normalized() const;

  static ModelConfig FromJsonText(const std::string& text);
  static ModelConfig FromJsonFile(const std::string& path);
  std::string ToJsonText() const;
  std::uint64_t Hash() const;
};

}  // namespace bmfd

#endif  // BMFD_MODEL_CONFIG_H_
