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

#ifndef BMFD_DECISION_H_
#define BMFD_DECISION_H_

#include <span>
#include <vector>

#include "bmfd/features.h"

namespace bmfd {

struct DecisionParams {
  double env_weight = 0.21;   // beta
  double dc_weight = 0.45;    // gamma
  double criterion_snr = 0.25;
};

// Per-frame elementwise maximum across the decoder channels, then the
// time average over frames, leaving one value per (channel, band) in the
// envelope domain and one per channel in the power domain.
struct PooledSnr {
  std::vector<std::vector<double>> env;  // [channel][band]
  std::vector<double> dc;                // [channel]
};
PooledSnr PoolAcrossChannels(std::span<const SnrGrids* const> per_channel);

struct CombinedSnr {
  double env_norm = 0;  // sqrt of the summed squared envelope-domain ratios
  double dc_norm = 0;   // sqrt of the summed squared power-domain ratios
  double snr = 0;       // max of the weighted norms
  double d_prime = 0;   // sqrt(2 snr)
  bool detected = false;
};
CombinedSnr CombineDomains(const PooledSnr& pooled,
                           const DecisionParams& params);

// Intelligibility observer: d' = k snr^q, converted to proportion correct
// in an m-alternative task against the largest of m - 1 standard normal
// draws, with response noise sigma_s.
struct ObserverParams {
  double k = 0.6;
  double q = 0.5;
  int num_alternatives = 50;
  double sigma_s = 0.6;
};

double SiDprime(double snr, const ObserverParams& params);

struct OrderStats {
  double mu = 0;
  double sigma = 0;
};
// Mean and standard deviation of the maximum of `count` independent
// standard normal variables, by numeric quadrature of the order-statistic
// density (absolute tolerance ~1e-6 on both moments).
OrderStats MaxOfStandardNormals(int count);

double NormalCdf(double x);

double PercentCorrect(double d_prime, const ObserverParams& params);

}  // namespace bmfd

#endif  // BMFD_DECISION_H_
