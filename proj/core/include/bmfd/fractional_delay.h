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

#ifndef BMFD_FRACTIONAL_DELAY_H_
#define BMFD_FRACTIONAL_DELAY_H_

#include <span>
#include <vector>

namespace bmfd {

inline constexpr int kDelayKernelHalfWidth = 12;

// Delays a block by an arbitrary (possibly fractional, possibly negative)
// number of samples using a Hann-windowed sinc interpolator. Output length
// equals input length; samples shifted in from outside the block are zero.
// Integer delays take an exact copy path.
void FractionalDelay(std::span<const double> in, double delay_samples,
                     std::span<double> out,
                     int half_width = kDelayKernelHalfWidth);

std::vector<double> Delayed(std::span<const double> in, double delay_samples,
                            int half_width = kDelayKernelHalfWidth);

}  // namespace bmfd

#endif  // BMFD_FRACTIONAL_DELAY_H_
