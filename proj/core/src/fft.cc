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

#include "bmfd/fft.h"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace bmfd {
namespace {

// FFTW planning is not thread safe; execution of a ready plan is.
std::mutex& PlanMutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::vector<std::complex<double>> RealFft(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("RealFft: empty input");
  const std::size_t n = x.size();
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(PlanMutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("RealFft: planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(PlanMutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<double> InverseRealFft(std::span<const std::complex<double>> bins,
                                   std::size_t n) {
  if (n == 0 || bins.size() != n / 2 + 1)
    throw std::invalid_argument("InverseRealFft: bin count does not match n");
  std::vector<std::complex<double>> in(bins.begin(), bins.end());
  std::vector<double> out(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(PlanMutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                reinterpret_cast<fftw_complex*>(in.data()),
                                out.data(), FFTW_ESTIMATE);
  }
  if (plan == nullptr)
    throw std::runtime_error("InverseRealFft: planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(PlanMutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

std::vector<double> FftConvolve(std::span<const double> x,
                                std::span<const double> h) {
  if (x.empty() || h.empty())
    throw std::invalid_argument("FftConvolve: empty input");
  const std::size_t out_len = x.size() + h.size() - 1;
  std::size_t n = 1;
  while (n < out_len) n <<= 1;
  std::vector<double> xp(n, 0.0);
  std::vector<double> hp(n, 0.0);
  std::memcpy(xp.data(), x.data(), x.size() * sizeof(double));
  std::memcpy(hp.data(), h.data(), h.size() * sizeof(double));
  auto xf = RealFft(xp);
  auto hf = RealFft(hp);
  for (std::size_t i = 0; i < xf.size(); ++i) xf[i] *= hf[i];
  auto full = InverseRealFft(xf, n);
  full.resize(out_len);
  return full;
}

}  // namespace bmfd
