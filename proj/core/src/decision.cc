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

#include "bmfd/decision.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bmfd {
namespace {

double NormalPdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

PooledSnr PoolAcrossChannels(std::span<const SnrGrids* const> per_channel) {
  if (per_channel.empty())
    throw std::invalid_argument("PoolAcrossChannels: no grids");
  const SnrGrids& first = *per_channel.front();
  const std::size_t num_channels = first.dc.size();

  PooledSnr pooled;
  pooled.dc.resize(num_channels, 0.0);
  pooled.env.resize(num_channels);

  for (std::size_t p = 0; p < num_channels; ++p) {
    const std::size_t dc_frames = first.dc[p].size();
    double dc_sum = 0.0;
    for (std::size_t i = 0; i < dc_frames; ++i) {
      double best = 0.0;
      for (const SnrGrids* g : per_channel) {
        if (g->dc[p].size() != dc_frames)
          throw std::invalid_argument("PoolAcrossChannels: frame mismatch");
        best = std::max(best, g->dc[p][i]);
      }
      dc_sum += best;
    }
    pooled.dc[p] = dc_frames > 0 ? dc_sum / static_cast<double>(dc_frames) : 0;

    const std::size_t bands = first.env[p].size();
    pooled.env[p].resize(bands, 0.0);
    for (std::size_t m = 0; m < bands; ++m) {
      const std::size_t frames = first.env[p][m].size();
      double sum = 0.0;
      for (std::size_t i = 0; i < frames; ++i) {
        double best = 0.0;
        for (const SnrGrids* g : per_channel) {
          if (g->env[p].size() != bands || g->env[p][m].size() != frames)
            throw std::invalid_argument("PoolAcrossChannels: band mismatch");
          best = std::max(best, g->env[p][m][i]);
        }
        sum += best;
      }
      pooled.env[p][m] = frames > 0 ? sum / static_cast<double>(frames) : 0;
    }
  }
  return pooled;
}

CombinedSnr CombineDomains(const PooledSnr& pooled,
                           const DecisionParams& params) {
  double env_sq = 0.0;
  for (const auto& row : pooled.env)
    for (double v : row) env_sq += v * v;
  double dc_sq = 0.0;
  for (double v : pooled.dc) dc_sq += v * v;

  CombinedSnr out;
  out.env_norm = std::sqrt(env_sq);
  out.dc_norm = std::sqrt(dc_sq);
  out.snr = std::max(params.env_weight * out.env_norm,
                     params.dc_weight * out.dc_norm);
  out.d_prime = std::sqrt(2.0 * out.snr);
  out.detected = out.snr > params.criterion_snr;
  return out;
}

double SiDprime(double snr, const ObserverParams& params) {
  if (snr < 0) throw std::invalid_argument("SiDprime: negative snr");
  return params.k * std::pow(snr, params.q);
}

OrderStats MaxOfStandardNormals(int count) {
  if (count < 1)
    throw std::invalid_argument("MaxOfStandardNormals: count must be >= 1");
  if (count == 1) return {0.0, 1.0};

  // Density of the maximum: count * phi(x) * Phi(x)^(count - 1). Simpson
  // integration on a fixed fine grid over a range where the density mass
  // outside is far below the tolerance.
  const double lo = -12.0, hi = 12.0;
  const int steps = 4800;  // even
  const double h = (hi - lo) / steps;
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double x = lo + i * h;
    const double density =
        count * NormalPdf(x) * std::pow(NormalCdf(x), count - 1);
    const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    m0 += w * density;
    m1 += w * density * x;
    m2 += w * density * x * x;
  }
  m0 *= h / 3.0;
  m1 *= h / 3.0;
  m2 *= h / 3.0;

  OrderStats stats;
  stats.mu = m1 / m0;
  stats.sigma = std::sqrt(std::max(m2 / m0 - stats.mu * stats.mu, 0.0));
  return stats;
}

double NormalCdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double PercentCorrect(double d_prime, const ObserverParams& params) {
  const OrderStats noise = MaxOfStandardNormals(params.num_alternatives - 1);
  const double spread = std::sqrt(noise.sigma * noise.sigma +
                                  params.sigma_s * params.sigma_s);
  return NormalCdf((d_prime - noise.mu) / spread);
}

}  // namespace bmfd
