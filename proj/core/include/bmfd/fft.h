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

#ifndef BMFD_FFT_H_
#define BMFD_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bmfd {

// Forward real FFT; returns the n/2 + 1 non-redundant bins.
std::vector<std::complex<double>> RealFft(std::span<const double> x);

// Inverse of RealFft for an output of n real samples, scaled so that
// InverseRealFft(RealFft(x), x.size()) == x.
std::vector<double> InverseRealFft(std::span<const std::complex<double>> bins,
                                   std::size_t n);

// Full linear convolution via FFT; output length x.size() + h.size() - 1.
std::vector<double> FftConvolve(std::span<const double> x,
                                std::span<const double> h);

}  // namespace bmfd

#endif  // BMFD_FFT_H_
