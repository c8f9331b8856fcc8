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

#ifndef BMFD_HARNESS_H_
#define BMFD_HARNESS_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bmfd/experiments.h"
#include "bmfd/model.h"
#include "bmfd/model_config.h"

namespace bmfd {

struct RunOptions {
  std::uint64_t seed = 1234;
  int trials = 10;
  int jobs = 1;
  int max_probes = 48;
  // Unset follows each experiment's default search procedure; set forces
  // the 2-down-1-up staircase (true) or mean-d' bisection (false).
  std::optional<bool> staircase;
  std::string channels;     // channel subset override, empty keeps default
  std::string config_path;  // base model configuration file, empty = defaults
};

struct ProbeRecord {
  double probe = 0;
  double mean = 0;  // mean d' (threshold runs) or mean Pc (SRT runs)
  double sd = 0;
  int trials = 0;
};

struct ThresholdResult {
  std::string experiment_id;
  std::string condition;
  double abscissa = 0;
  double threshold = std::numeric_limits<double>::quiet_NaN();
  bool valid = false;
  bool monotonic_warning = false;
  std::string error;
  int trials_used = 0;
  std::vector<ProbeRecord> trace;
};

struct TradingCell {
  double probe = 0;
  double mean_d_prime = 0;
  double sd_d_prime = 0;
};

struct TradingRow {
  std::string condition;
  double abscissa = 0;  // interaural delay in microseconds
  double best_probe = 0;
  double best_mean_d_prime = 0;
  std::vector<TradingCell> cells;
};

struct ExperimentOutcome {
  std::string id;
  std::vector<ThresholdResult> thresholds;
  std::vector<TradingRow> trading;
  double rmse = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  int matched_references = 0;
};

struct SuiteOutcome {
  RunOptions options;
  std::vector<ExperimentOutcome> experiments;
};

// Base configuration merged with the experiment's model overrides plus any
// command-line subset override.
ModelConfig ResolveModelConfig(const ExperimentSpec& spec,
                               const RunOptions& options);

// Simulated adaptive threshold search for one benchmark point: bisection on
// the mean decision metric over a fixed set of concurrent trials, with
// trial-count widening when the initial bracket fails. The same option seed
// reproduces the same stimuli regardless of execution order.
ThresholdResult FindThreshold(const Evaluator& evaluator,
                              const ExperimentSpec& spec,
                              const ExperimentPoint& point,
                              const RunOptions& options);

// Transformed 2-down-1-up staircase variant of the same search.
ThresholdResult FindThresholdStaircase(const Evaluator& evaluator,
                                       const ExperimentSpec& spec,
                                       const ExperimentPoint& point,
                                       const RunOptions& options);

ExperimentOutcome RunExperiment(const ExperimentSpec& spec,
                                const RunOptions& options);

SuiteOutcome RunSuite(const std::vector<std::string>& ids,
                      const RunOptions& options);

void ScoreAgainstReferences(const ExperimentSpec& spec,
                            ExperimentOutcome* outcome);

// Deterministic text serializations (byte-identical for identical inputs).
std::string SuiteCsv(const SuiteOutcome& outcome);
std::string TradingCsv(const ExperimentOutcome& outcome);
std::string SuiteJson(const SuiteOutcome& outcome);
std::string PlotData(const ExperimentSpec& spec,
                     const ExperimentOutcome& outcome);
void WriteTextFile(const std::string& path, const std::string& text);

struct CalibrationResult {
  std::vector<double> per_seed_k;
  double k_mean = 0;
  double k_sd = 0;
};

// Fits the observer efficiency k so that the intelligibility observer scores
// 50% correct at a prescribed reception threshold, independently per seed.
CalibrationResult CalibrateObserver(const ExperimentSpec& spec,
                                    const ExperimentPoint& point,
                                    double target_srt_db, int num_seeds,
                                    const RunOptions& options);

}  // namespace bmfd

#endif  // BMFD_HARNESS_H_
