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

#include "bmfd/bmfd_stage.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bmfd {

const char* ToString(BmfdChannel channel) {
  switch (channel) {
    case BmfdChannel::kBeL: return "BE_L";
    case BmfdChannel::kBeR: return "BE_R";
    case BmfdChannel::kBiL: return "BI_L";
    case BmfdChannel::kBiC: return "BI_C";
    case BmfdChannel::kBiR: return "BI_R";
  }
  return "?";
}

const char* ToString(ChannelSubset subset) {
  switch (subset) {
    case ChannelSubset::kAll5: return "all5";
    case ChannelSubset::kBiLcr: return "lcr";
    case ChannelSubset::kBiLr: return "lr";
    case ChannelSubset::kBiCOnly: return "c";
    case ChannelSubset::kBeLOnly: return "be_l";
  }
  return "?";
}

ChannelSubset ParseChannelSubset(const std::string& name) {
  if (name == "all5") return ChannelSubset::kAll5;
  if (name == "lcr") return ChannelSubset::kBiLcr;
  if (name == "lr") return ChannelSubset::kBiLr;
  if (name == "c") return ChannelSubset::kBiCOnly;
  if (name == "be_l") return ChannelSubset::kBeLOnly;
  throw std::invalid_argument("unknown channel subset: " + name +
                              " (expected all5, lcr, lr, c, or be_l)");
}

bool SubsetIncludes(ChannelSubset subset, BmfdChannel channel) {
  switch (subset) {
    case ChannelSubset::kAll5:
      return true;
    case ChannelSubset::kBiLcr:
      return channel == BmfdChannel::kBiL || channel == BmfdChannel::kBiC ||
             channel == BmfdChannel::kBiR;
    case ChannelSubset::kBiLr:
      return channel == BmfdChannel::kBiL || channel == BmfdChannel::kBiR;
    case ChannelSubset::kBiCOnly:
      return channel == BmfdChannel::kBiC;
    case ChannelSubset::kBeLOnly:
      return channel == BmfdChannel::kBeL;
  }
  return false;
}

double ContralateralDelaySeconds(const BmfdParams& params, double center_hz) {
  if (center_hz <= 0)
    throw std::invalid_argument("ContralateralDelaySeconds: bad center");
  return params.contra_delay_cycles / center_hz;
}

JitterState JitterState::Draw(int num_channels, const BmfdParams& params,
                              RandomStream* rng) {
  if (rng == nullptr) throw std::invalid_argument("JitterState: null rng");
  JitterState state = None(num_channels);
  for (int p = 0; p < num_channels; ++p) {
    state.gain_left[p] = 1.0 + params.gain_jitter_sd * rng->Gaussian();
    state.delay_left_s[p] = params.delay_jitter_sd_s * rng->Gaussian();
    state.gain_right[p] = 1.0 + params.gain_jitter_sd * rng->Gaussian();
    state.delay_right_s[p] = params.delay_jitter_sd_s * rng->Gaussian();
  }
  return state;
}

JitterState JitterState::None(int num_channels) {
  JitterState state;
  state.gain_left.assign(num_channels, 1.0);
  state.gain_right.assign(num_channels, 1.0);
  state.delay_left_s.assign(num_channels, 0.0);
  state.delay_right_s.assign(num_channels, 0.0);
  return state;
}

BmfdBanks CombineBmfd(const ChannelBank& left, const ChannelBank& left_tau,
                      const ChannelBank& right, const ChannelBank& right_tau,
                      double inhibition_weight, ChannelSubset subset) {
  const int num_channels = left.num_channels();
  const std::size_t n = left.num_samples();
  for (const ChannelBank* bank : {&left_tau, &right, &right_tau}) {
    if (bank->num_channels() != num_channels || bank->num_samples() != n)
      throw std::invalid_argument("CombineBmfd: bank shape mismatch");
  }

  BmfdBanks out;
  const auto alloc = [&](BmfdChannel c) -> ChannelBank* {
    if (!SubsetIncludes(subset, c)) return nullptr;
    ChannelBank& bank = out.channel[static_cast<int>(c)];
    bank = ChannelBank(left.center_frequencies(), n, left.sample_rate());
    return &bank;
  };
  ChannelBank* be_l = alloc(BmfdChannel::kBeL);
  ChannelBank* be_r = alloc(BmfdChannel::kBeR);
  ChannelBank* bi_l = alloc(BmfdChannel::kBiL);
  ChannelBank* bi_c = alloc(BmfdChannel::kBiC);
  ChannelBank* bi_r = alloc(BmfdChannel::kBiR);

  for (int p = 0; p < num_channels; ++p) {
    const auto l = left.channel(p);
    const auto lt = left_tau.channel(p);
    const auto r = right.channel(p);
    const auto rt = right_tau.channel(p);
    if (be_l != nullptr) std::copy(l.begin(), l.end(), be_l->channel(p).begin());
    if (be_r != nullptr) std::copy(r.begin(), r.end(), be_r->channel(p).begin());
    if (bi_l != nullptr) {
      auto o = bi_l->channel(p);
      for (std::size_t i = 0; i < n; ++i)
        o[i] = std::max(l[i] - inhibition_weight * rt[i], 0.0);
    }
    if (bi_r != nullptr) {
      auto o = bi_r->channel(p);
      for (std::size_t i = 0; i < n; ++i)
        o[i] = std::max(r[i] - inhibition_weight * lt[i], 0.0);
    }
    if (bi_c != nullptr) {
      auto o = bi_c->channel(p);
      for (std::size_t i = 0; i < n; ++i)
        o[i] = std::sqrt(std::max(l[i], 0.0) * std::max(r[i], 0.0));
    }
  }
  return out;
}

}  // namespace bmfd
