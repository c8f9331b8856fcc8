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

#ifndef BMFD_EXPERIMENTS_H_
#define BMFD_EXPERIMENTS_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bmfd/model.h"
#include "bmfd/signal.h"

namespace bmfd {

// Keys and values of an experiment's parameter block (numbers and strings).
class ParamMap {
 public:
  void SetNumber(const std::string& key, double value);
  void SetString(const std::string& key, std::string value);
  void SetList(const std::string& key, std::vector<double> values);

  bool Has(const std::string& key) const;
  double Num(const std::string& key) const;
  double Num(const std::string& key, double fallback) const;
  std::string Str(const std::string& key) const;
  std::string Str(const std::string& key, const std::string& fallback) const;
  const std::vector<double>& List(const std::string& key) const;

 private:
  std::map<std::string, double> numbers_;
  std::map<std::string, std::string> strings_;
  std::map<std::string, std::vector<double>> lists_;
};

struct SearchSpec {
  double lo = 0, hi = 1, resolution = 0.1;
};

struct ExperimentPoint {
  std::string condition;
  double abscissa = 0;
  ParamMap params;  // family defaults merged with per-point overrides
};

struct ReferencePoint {
  std::string condition;
  double abscissa = 0;
  double value = 0;
  std::string source;
};

enum class ExperimentKind { kThreshold, kDprimeGrid, kSrt };

struct ExperimentSpec {
  std::string id;
  std::string title;
  std::string family;
  ExperimentKind kind = ExperimentKind::kThreshold;
  std::string tracked_label;  // name and unit of the tracked variable
  bool binaural = false;
  bool intelligibility = false;
  // Default search procedure; run options may force either procedure.
  bool staircase_default = false;
  SearchSpec search;
  std::vector<ExperimentPoint> points;
  std::vector<ReferencePoint> references;
  std::vector<std::string> assumptions;
  std::string model_overrides_json;  // "{}" when absent
};

// All experiment definitions packaged under data/experiments, loaded once,
// ordered by filename.
const std::vector<ExperimentSpec>& ExperimentRegistry();
const ExperimentSpec& FindExperiment(const std::string& id);
std::vector<std::string> ExperimentIds();

// Builds the per-trial stimulus components for one benchmark point, and
// maps the tracked variable to component weights. The tracked variable is
// oriented so that larger values are easier to detect.
class TrialFactory {
 public:
  virtual ~TrialFactory() = default;

  // Fresh stimulus components for one trial (noise tokens are drawn from
  // token_seed; deterministic stimuli ignore it).
  virtual std::vector<StereoSignal> MakeComponents(
      std::uint64_t token_seed) const = 0;

  virtual std::vector<EarWeights> TargetWeights(double probe) const = 0;
  virtual std::vector<EarWeights> ReferenceWeights() const = 0;

  // Point-specific restriction of the search range (e.g. keeping an
  // interaural delay below a quarter period).
  virtual SearchSpec AdjustSearch(const SearchSpec& search) const {
    return search;
  }
};

std::unique_ptr<TrialFactory> MakeTrialFactory(const ExperimentSpec& spec,
                                               const ExperimentPoint& point,
                                               double sample_rate);

}  // namespace bmfd

#endif  // BMFD_EXPERIMENTS_H_
