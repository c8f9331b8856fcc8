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

#include "bmfd/rng.h"

#include <cmath>
#include <numbers>

namespace bmfd {

RandomStream::RandomStream(std::uint64_t seed) : engine_(seed) {}

double RandomStream::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::Gaussian() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_gaussian_;
  }
  // Draw u1 in (0, 1] so the log is finite.
  double u1 = 1.0 - Uniform();
  double u2 = Uniform();
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * std::numbers::pi * u2;
  cached_gaussian_ = radius * std::sin(angle);
  have_cached_ = true;
  return radius * std::cos(angle);
}

std::uint64_t SplitMix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t HashTag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t MixSeed(std::uint64_t base, std::string_view tag,
                      std::uint64_t index, std::uint64_t subindex) {
  std::uint64_t state = base;
  std::uint64_t out = SplitMix64(state);
  state ^= HashTag(tag);
  out ^= SplitMix64(state);
  state ^= 0x5851f42d4c957f2dULL * (index + 1);
  out ^= SplitMix64(state);
  state ^= 0x14057b7ef767814fULL * (subindex + 1);
  out ^= SplitMix64(state);
  return out;
}

}  // namespace bmfd
