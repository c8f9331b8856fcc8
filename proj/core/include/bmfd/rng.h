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

#ifndef BMFD_RNG_H_
#define BMFD_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace bmfd {

// Deterministic random stream. The generator and all distribution transforms
// are fully specified here, so a given seed produces the same sample sequence
// on every platform and in every build mode.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  // Uniform in [0, 1) with 53 random bits.
  double Uniform();

  // Standard normal via the Box-Muller transform (polar-free, paired).
  double Gaussian();

  std::uint64_t NextU64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double cached_gaussian_ = 0.0;
  bool have_cached_ = false;
};

// SplitMix64 step, used as the seed-mixing primitive.
std::uint64_t SplitMix64(std::uint64_t& state);

// Collapses an arbitrary tag string into 64 bits (FNV-1a).
std::uint64_t HashTag(std::string_view tag);

// Derives an independent stream seed from a base seed and tag/index parts.
// Distinct part tuples give decorrelated streams.
std::uint64_t MixSeed(std::uint64_t base, std::string_view tag,
                      std::uint64_t index = 0, std::uint64_t subindex = 0);

}  // namespace bmfd

#endif  // BMFD_RNG_H_
