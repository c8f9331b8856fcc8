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

#ifndef BMFD_BMFD_STAGE_H_
#define BMFD_BMFD_STAGE_H_

#include <array>
#include <string>
#include <vector>

#include "bmfd/rng.h"
#include "bmfd/signal.h"

namespace bmfd {

// The five decoder channels: two better-ear pass-throughs, two
// contralaterally inhibited channels, and one correlation-like channel.
enum class BmfdChannel { kBeL = 0, kBeR = 1, kBiL = 2, kBiC = 3, kBiR = 4 };
inline constexpr int kNumBmfdChannels = 5;

const char* ToString(BmfdChannel channel);

enum class ChannelSubset { kAll5, kBiLcr, kBiLr, kBiCOnly, kBeLOnly };

const char* ToString(ChannelSubset subset);
ChannelSubset ParseChannelSubset(const std::string& name);
bool SubsetIncludes(ChannelSubset subset, BmfdChannel channel);

struct BmfdParams {
  double inhibition_weight = 3.0;
  // Contralateral delay in cycles of the channel center: tau = cycles / fc.
  double contra_delay_cycles = 0.125;
  double gain_jitter_sd = 0.25;
  double delay_jitter_sd_s = 105e-6;
  bool jitter_enabled = true;
};

double ContralateralDelaySeconds(const BmfdParams& params, double center_hz);

// One draw of internal gain and timing noise, shared by the two stimulus
// evaluations of a trial. Gains are 1 + eps. Both ears are always drawn,
// in a fixed order, so a given seed yields the same left-ear values no
// matter which decoder channels are later used.
struct JitterState {
  std::vector<double> gain_left, gain_right;
  std::vector<double> delay_left_s, delay_right_s;

  static JitterState Draw(int num_channels, const BmfdParams& params,
                          RandomStream* rng);
  static JitterState None(int num_channels);
};

// Decoder outputs; banks for channels excluded by the subset are empty.
struct BmfdBanks {
  std::array<ChannelBank, kNumBmfdChannels> channel;

  bool present(BmfdChannel c) const {
    return channel[static_cast<int>(c)].num_channels() > 0;
  }
};

// Combines the four adapted ear banks into the decoder channels:
//   BE_L = L                    BE_R = R
//   BI_L = max(L - w R_tau, 0)  BI_R = max(R - w L_tau, 0)
//   BI_C = sqrt(L R)
// where L_tau / R_tau are the same ear signals with the per-channel
// contralateral delay applied upstream, and w is the inhibition weight.
// Inputs must already be nonnegative (post-rectification).
BmfdBanks CombineBmfd(const ChannelBank& left, const ChannelBank& left_tau,
                      const ChannelBank& right, const ChannelBank& right_tau,
                      double inhibition_weight, ChannelSubset subset);

}  // namespace bmfd

#endif  // BMFD_BMFD_STAGE_H_
