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
#include <string>
#include <vector>

#include "bmfd/bmfd_stage.h"
#include "bmfd/rng.h"
#include "bmfd/signal.h"
#include "doctest.h"

namespace bmfd {
namespace {

ChannelBank MakeBank(const std::vector<double>& values) {
  ChannelBank bank({1000.0}, values.size(), 48000.0);
  auto ch = bank.channel(0);
  for (std::size_t i = 0; i < values.size(); ++i) ch[i] = values[i];
  return bank;
}

TEST_CASE("channel names round trip") {
  CHECK(std::string(ToString(BmfdChannel::kBeL)) == "be_l");
  CHECK(std::string(ToString(BmfdChannel::kBeR)) == "be_r");
  CHECK(std::string(ToString(BmfdChannel::kBiL)) == "bi_l");
  CHECK(std::string(ToString(BmfdChannel::kBiC)) == "bi_c");
  CHECK(std::string(ToString(BmfdChannel::kBiR)) == "bi_r");

  for (ChannelSubset s :
       {ChannelSubset::kAll5, ChannelSubset::kBiLcr, ChannelSubset::kBiLr,
        ChannelSubset::kBiCOnly, ChannelSubset::kBeLOnly}) {
    CHECK(ParseChannelSubset(ToString(s)) == s);
  }
  CHECK_THROWS(ParseChannelSubset("everything"));
}

TEST_CASE("subset membership follows the nesting all5 > lcr > lr") {
  using C = BmfdChannel;
  const auto in = [](ChannelSubset s, C c) { return SubsetIncludes(s, c); };

  for (C c : {C::kBeL, C::kBeR, C::kBiL, C::kBiC, C::kBiR}) {
    CHECK(in(ChannelSubset::kAll5, c));
  }

  CHECK_FALSE(in(ChannelSubset::kBiLcr, C::kBeL));
  CHECK_FALSE(in(ChannelSubset::kBiLcr, C::kBeR));
  CHECK(in(ChannelSubset::kBiLcr, C::kBiL));
  CHECK(in(ChannelSubset::kBiLcr, C::kBiC));
  CHECK(in(ChannelSubset::kBiLcr, C::kBiR));

  CHECK_FALSE(in(ChannelSubset::kBiLr, C::kBiC));
  CHECK(in(ChannelSubset::kBiLr, C::kBiL));
  CHECK(in(ChannelSubset::kBiLr, C::kBiR));
  CHECK_FALSE(in(ChannelSubset::kBiLr, C::kBeL));

  CHECK(in(ChannelSubset::kBiCOnly, C::kBiC));
  CHECK_FALSE(in(ChannelSubset::kBiCOnly, C::kBiL));
  CHECK(in(ChannelSubset::kBeLOnly, C::kBeL));
  CHECK_FALSE(in(ChannelSubset::kBeLOnly, C::kBiC));

  // Every channel of a smaller subset is in the bigger one.
  for (C c : {C::kBeL, C::kBeR, C::kBiL, C::kBiC, C::kBiR}) {
    if (in(ChannelSubset::kBiLr, c)) CHECK(in(ChannelSubset::kBiLcr, c));
    if (in(ChannelSubset::kBiLcr, c)) CHECK(in(ChannelSubset::kAll5, c));
  }
}

TEST_CASE("contralateral delay is an eighth of the center period") {
  const BmfdParams params;
  CHECK(ContralateralDelaySeconds(params, 500.0) ==
        doctest::Approx(1.0 / (8.0 * 500.0)).epsilon(1e-12));
  CHECK(ContralateralDelaySeconds(params, 2000.0) ==
        doctest::Approx(62.5e-6).epsilon(1e-12));

  BmfdParams quarter = params;
  quarter.contra_delay_cycles = 0.25;
  CHECK(ContralateralDelaySeconds(quarter, 500.0) ==
        doctest::Approx(0.5e-3).epsilon(1e-12));
}

TEST_CASE("jitter draws are seeded and sized per ear and channel") {
  const BmfdParams params;
  RandomStream rng_a(42), rng_b(42), rng_c(43);
  const JitterState a = JitterState::Draw(24, params, &rng_a);
  const JitterState b = JitterState::Draw(24, params, &rng_b);
  const JitterState c = JitterState::Draw(24, params, &rng_c);

  REQUIRE(a.gain_left.size() == 24);
  REQUIRE(a.gain_right.size() == 24);
  REQUIRE(a.delay_left_s.size() == 24);
  REQUIRE(a.delay_right_s.size() == 24);

  for (int p = 0; p < 24; ++p) {
    CHECK(a.gain_left[p] == b.gain_left[p]);
    CHECK(a.delay_right_s[p] == b.delay_right_s[p]);
  }
  bool any_different = false;
  for (int p = 0; p < 24; ++p) {
    if (a.gain_left[p] != c.gain_left[p]) any_different = true;
  }
  CHECK(any_different);

  // Gains scatter around 1, delays around 0, at the configured spread.
  double gain_sum = 0, delay_abs_max = 0;
  for (int p = 0; p < 24; ++p) {
    gain_sum += a.gain_left[p] + a.gain_right[p];
    delay_abs_max = std::max(delay_abs_max, std::abs(a.delay_left_s[p]));
  }
  CHECK(gain_sum / 48.0 == doctest::Approx(1.0).scale(1.0).epsilon(0.2));
  CHECK(delay_abs_max < 6.0 * params.delay_jitter_sd_s);
  CHECK(delay_abs_max > 0.0);
}

TEST_CASE("disabled jitter is the exact identity") {
  const JitterState none = JitterState::None(24);
  for (int p = 0; p < 24; ++p) {
    CHECK(none.gain_left[p] == 1.0);
    CHECK(none.gain_right[p] == 1.0);
    CHECK(none.delay_left_s[p] == 0.0);
    CHECK(none.delay_right_s[p] == 0.0);
  }

  BmfdParams off;
  off.jitter_enabled = false;
  RandomStream rng(5);
  const JitterState drawn = JitterState::Draw(24, off, &rng);
  for (int p = 0; p < 24; ++p) {
    CHECK(drawn.gain_left[p] == 1.0);
    CHECK(drawn.delay_right_s[p] == 0.0);
  }
}

TEST_CASE("decoder combination matches the channel formulas") {
  const ChannelBank left = MakeBank({2.0, 0.5, 4.0, 1.0});
  const ChannelBank left_tau = MakeBank({1.0, 2.0, 0.5, 3.0});
  const ChannelBank right = MakeBank({1.0, 3.0, 0.25, 2.0});
  const ChannelBank right_tau = MakeBank({0.5, 0.1, 2.0, 1.0});
  const double w = 3.0;

  const BmfdBanks banks = CombineBmfd(left, left_tau, right, right_tau, w,
                                      ChannelSubset::kAll5);
  for (int c = 0; c < kNumBmfdChannels; ++c) {
    REQUIRE(banks.channel[c].num_channels() == 1);
    REQUIRE(banks.channel[c].num_samples() == 4);
  }

  const auto be_l = banks.channel[static_cast<int>(BmfdChannel::kBeL)].channel(0);
  const auto be_r = banks.channel[static_cast<int>(BmfdChannel::kBeR)].channel(0);
  const auto bi_l = banks.channel[static_cast<int>(BmfdChannel::kBiL)].channel(0);
  const auto bi_c = banks.channel[static_cast<int>(BmfdChannel::kBiC)].channel(0);
  const auto bi_r = banks.channel[static_cast<int>(BmfdChannel::kBiR)].channel(0);

  for (int i = 0; i < 4; ++i) {
    const double L = left.channel(0)[i];
    const double Lt = left_tau.channel(0)[i];
    const double R = right.channel(0)[i];
    const double Rt = right_tau.channel(0)[i];
    CHECK(be_l[i] == doctest::Approx(L).epsilon(1e-12));
    CHECK(be_r[i] == doctest::Approx(R).epsilon(1e-12));
    CHECK(bi_l[i] == doctest::Approx(std::max(L - w * Rt, 0.0)).epsilon(1e-12));
    CHECK(bi_r[i] == doctest::Approx(std::max(R - w * Lt, 0.0)).epsilon(1e-12));
    CHECK(bi_c[i] == doctest::Approx(std::sqrt(L * R)).epsilon(1e-12));
  }

  // Spot-check one fully inhibited sample: L=0.5, w*Rt=0.3 -> 0.2 and
  // L=2.0, w*Rt=1.5 -> 0.5 stay positive; L=4.0, w*Rt=6.0 clamps to zero.
  CHECK(bi_l[2] == 0.0);
}

TEST_CASE("excluded channels come back empty") {
  const ChannelBank bank = MakeBank({1.0, 2.0});
  const BmfdBanks lr = CombineBmfd(bank, bank, bank, bank, 3.0,
                                   ChannelSubset::kBiLr);
  CHECK_FALSE(lr.present(BmfdChannel::kBeL));
  CHECK_FALSE(lr.present(BmfdChannel::kBeR));
  CHECK(lr.present(BmfdChannel::kBiL));
  CHECK_FALSE(lr.present(BmfdChannel::kBiC));
  CHECK(lr.present(BmfdChannel::kBiR));

  const BmfdBanks c_only = CombineBmfd(bank, bank, bank, bank, 3.0,
                                       ChannelSubset::kBiCOnly);
  CHECK(c_only.present(BmfdChannel::kBiC));
  CHECK_FALSE(c_only.present(BmfdChannel::kBiL));

  const BmfdBanks be_only = CombineBmfd(bank, bank, bank, bank, 3.0,
                                        ChannelSubset::kBeLOnly);
  CHECK(be_only.present(BmfdChannel::kBeL));
  CHECK_FALSE(be_only.present(BmfdChannel::kBiR));
}

TEST_CASE("correlation channel nulls when either ear is silent") {
  const ChannelBank active = MakeBank({1.0, 4.0, 9.0});
  const ChannelBank silent = MakeBank({0.0, 0.0, 0.0});
  const BmfdBanks banks = CombineBmfd(active, active, silent, silent, 3.0,
                                      ChannelSubset::kAll5);
  const auto bi_c = banks.channel[static_cast<int>(BmfdChannel::kBiC)].channel(0);
  const auto bi_l = banks.channel[static_cast<int>(BmfdChannel::kBiL)].channel(0);
  for (int i = 0; i < 3; ++i) {
    CHECK(bi_c[i] == 0.0);
    // Nothing to inhibit: BI_L reduces to the left ear itself.
    CHECK(bi_l[i] == doctest::Approx(active.channel(0)[i]).epsilon(1e-12));
  }
}

}  // namespace
}  // namespace bmfd
