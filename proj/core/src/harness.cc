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

#include "bmfd/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "bmfd/decision.h"
#include "bmfd/rng.h"
#include "json.hpp"

namespace bmfd {
namespace {

using Json = nlohmann::ordered_json;

std::string Fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string PointKey(const ExperimentPoint& point) {
  return point.condition + "@" + Fmt(point.abscissa);
}

enum class DecisionMetric { kDprime, kPercentCorrect };

using SessionList = std::vector<std::unique_ptr<Evaluator::TrialSession>>;

// Seeds depend only on the option seed, the experiment point and the trial
// index, so identical stimuli are drawn no matter which runs share a process.
void AppendSessions(const Evaluator& evaluator, const TrialFactory& factory,
                    const std::string& scope, std::uint64_t seed, int begin,
                    int end, SessionList* sessions) {
  for (int t = begin; t < end; ++t) {
    const std::uint64_t token_seed =
        MixSeed(seed, scope, static_cast<std::uint64_t>(t), 1);
    const std::uint64_t jitter_seed =
        MixSeed(seed, scope, static_cast<std::uint64_t>(t), 2);
    auto session = evaluator.BeginTrial(factory.MakeComponents(token_seed),
                                        evaluator.DrawJitter(jitter_seed));
    session->SetReference(factory.ReferenceWeights());
    sessions->push_back(std::move(session));
  }
}

ProbeRecord EvalProbe(const SessionList& sessions, const TrialFactory& factory,
                      double probe, DecisionMetric metric,
                      const ObserverParams& observer) {
  const std::vector<EarWeights> weights = factory.TargetWeights(probe);
  double sum = 0, sum_sq = 0;
  for (const auto& session : sessions) {
    const CombinedSnr combined = session->EvaluateTarget(weights);
    double value = combined.d_prime;
    if (metric == DecisionMetric::kPercentCorrect) {
      value = PercentCorrect(SiDprime(combined.snr, observer), observer);
    }
    sum += value;
    sum_sq += value * value;
  }
  ProbeRecord record;
  record.probe = probe;
  record.trials = static_cast<int>(sessions.size());
  const double n = static_cast<double>(sessions.size());
  record.mean = sum / n;
  if (sessions.size() > 1) {
    const double var = (sum_sq - sum * sum / n) / (n - 1.0);
    record.sd = std::sqrt(std::max(var, 0.0));
  }
  return record;
}

void FlagNonMonotonicity(ThresholdResult* result) {
  std::vector<ProbeRecord> sorted = result->trace;
  std::sort(sorted.begin(), sorted.end(),
            [](const ProbeRecord& a, const ProbeRecord& b) {
              return a.probe < b.probe;
            });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i].probe == sorted[i + 1].probe) continue;
    const double slack = std::max(0.25, sorted[i].sd + sorted[i + 1].sd);
    if (sorted[i].mean > sorted[i + 1].mean + slack) {
      result->monotonic_warning = true;
      return;
    }
  }
}

double MeanOf(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

void RunIndexed(int count, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        fn(i);
      }
    });
  }
  for (auto& worker : workers) worker.join();
}

Json DeepMerge(Json base, const Json& patch) {
  if (!base.is_object() || !patch.is_object()) return patch;
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (base.contains(it.key())) {
      base[it.key()] = DeepMerge(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
  return base;
}

TradingRow RunTradingPoint(const Evaluator& evaluator,
                           const ExperimentSpec& spec,
                           const ExperimentPoint& point,
                           const RunOptions& options) {
  const auto factory =
      MakeTrialFactory(spec, point, evaluator.config().sample_rate);
  const std::string scope = spec.id + "/" + PointKey(point);
  SessionList sessions;
  AppendSessions(evaluator, *factory, scope, options.seed, 0, options.trials,
                 &sessions);

  TradingRow row;
  row.condition = point.condition;
  row.abscissa = point.abscissa;
  const std::vector<double>& grid = point.params.List("probe_grid");
  for (double probe : grid) {
    const ProbeRecord record =
        EvalProbe(sessions, *factory, probe, DecisionMetric::kDprime,
                  evaluator.config().observer);
    TradingCell cell;
    cell.probe = probe;
    cell.mean_d_prime = record.mean;
    cell.sd_d_prime = record.sd;
    row.cells.push_back(cell);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.cells.size(); ++i) {
    if (row.cells[i].mean_d_prime < row.cells[best].mean_d_prime) best = i;
  }
  row.best_probe = row.cells[best].probe;
  row.best_mean_d_prime = row.cells[best].mean_d_prime;
  return row;
}

}  // namespace

ModelConfig ResolveModelConfig(const ExperimentSpec& spec,
                               const RunOptions& options) {
  ModelConfig base = options.config_path.empty()
                         ? ModelConfig{}
                         : ModelConfig::FromJsonFile(options.config_path);
  Json merged = DeepMerge(Json::parse(base.ToJsonText()),
                          Json::parse(spec.model_overrides_json));
  ModelConfig config = ModelConfig::FromJsonText(merged.dump());
  if (spec.intelligibility) config.intelligibility_mode = true;
  if (!options.channels.empty()) {
    config.subset = ParseChannelSubset(options.channels);
  }
  return config;
}

ThresholdResult FindThreshold(const Evaluator& evaluator,
                              const ExperimentSpec& spec,
                              const ExperimentPoint& point,
                              const RunOptions& options) {
  ThresholdResult result;
  result.experiment_id = spec.id;
  result.condition = point.condition;
  result.abscissa = point.abscissa;

  const auto factory =
      MakeTrialFactory(spec, point, evaluator.config().sample_rate);
  const SearchSpec search = factory->AdjustSearch(spec.search);
  const DecisionMetric metric = spec.kind == ExperimentKind::kSrt
                                    ? DecisionMetric::kPercentCorrect
                                    : DecisionMetric::kDprime;
  const double criterion =
      metric == DecisionMetric::kPercentCorrect
          ? 0.5
          : std::sqrt(2.0 * evaluator.config().decision.criterion_snr);
  const ObserverParams& observer = evaluator.config().observer;

  const std::string scope = spec.id + "/" + PointKey(point);
  SessionList sessions;
  AppendSessions(evaluator, *factory, scope, options.seed, 0, options.trials,
                 &sessions);

  auto probe = [&](double x) {
    const ProbeRecord record =
        EvalProbe(sessions, *factory, x, metric, observer);
    result.trace.push_back(record);
    return record;
  };

  ProbeRecord lo_rec = probe(search.lo);
  ProbeRecord hi_rec = probe(search.hi);
  if (lo_rec.mean >= criterion || hi_rec.mean < criterion) {
    // Widen once: double the trial count and retry the bracket.
    AppendSessions(evaluator, *factory, scope, options.seed, options.trials,
                   2 * options.trials, &sessions);
    lo_rec = probe(search.lo);
    hi_rec = probe(search.hi);
  }
  result.trials_used = static_cast<int>(sessions.size());
  if (lo_rec.mean >= criterion) {
    result.error = "decision metric above criterion at search floor";
    return result;
  }
  if (hi_rec.mean < criterion) {
    result.error = "decision metric below criterion at search ceiling";
    return result;
  }

  double lo = search.lo, hi = search.hi;
  int probes = 2;
  while (hi - lo > search.resolution && probes < options.max_probes) {
    const double mid = 0.5 * (lo + hi);
    const ProbeRecord record = probe(mid);
    if (record.mean >= criterion) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++probes;
  }
  result.threshold = 0.5 * (lo + hi);
  result.valid = true;
  FlagNonMonotonicity(&result);
  return result;
}

ThresholdResult FindThresholdStaircase(const Evaluator& evaluator,
                                       const ExperimentSpec& spec,
                                       const ExperimentPoint& point,
                                       const RunOptions& options) {
  ThresholdResult result;
  result.experiment_id = spec.id;
  result.condition = point.condition;
  result.abscissa = point.abscissa;
  if (spec.kind != ExperimentKind::kThreshold) {
    result.error = "staircase mode supports threshold experiments only";
    return result;
  }

  const auto factory =
      MakeTrialFactory(spec, point, evaluator.config().sample_rate);
  const SearchSpec search = factory->AdjustSearch(spec.search);
  const double criterion =
      std::sqrt(2.0 * evaluator.config().decision.criterion_snr);

  const std::string scope = spec.id + "/" + PointKey(point);
  SessionList sessions;
  AppendSessions(evaluator, *factory, scope, options.seed, 0, options.trials,
                 &sessions);
  result.trials_used = static_cast<int>(sessions.size());

  double level = search.hi;
  double step = 8.0 * search.resolution;
  int correct_in_row = 0;
  int direction = 0;
  std::vector<double> reversals;
  constexpr int kMaxTrials = 400;
  constexpr int kTargetReversals = 8;

  for (int t = 0; t < kMaxTrials && reversals.size() < kTargetReversals; ++t) {
    const auto& session = sessions[static_cast<std::size_t>(t) %
                                   sessions.size()];
    const CombinedSnr combined =
        session->EvaluateTarget(factory->TargetWeights(level));
    result.trace.push_back(
        ProbeRecord{level, combined.d_prime, 0.0, 1});
    const bool heard = combined.d_prime > criterion;

    int move = 0;
    if (heard) {
      if (++correct_in_row == 2) {
        correct_in_row = 0;
        move = -1;
      }
    } else {
      correct_in_row = 0;
      move = +1;
    }
    if (move != 0) {
      if (direction != 0 && move != direction) {
        reversals.push_back(level);
        step = std::max(0.5 * step, search.resolution);
      }
      direction = move;
      level = std::min(search.hi,
                       std::max(search.lo, level + move * step));
    }
  }
  if (reversals.size() < kTargetReversals) {
    result.error = "staircase did not converge";
    return result;
  }
  const std::size_t tail = reversals.size() - 4;
  result.threshold =
      MeanOf(std::vector<double>(reversals.begin() + tail, reversals.end()));
  result.valid = true;
  return result;
}

void ScoreAgainstReferences(const ExperimentSpec& spec,
                            ExperimentOutcome* outcome) {
  std::vector<double> model, ref;
  for (const ReferencePoint& reference : spec.references) {
    for (const ThresholdResult& r : outcome->thresholds) {
      if (r.condition != reference.condition || !r.valid) continue;
      const double tol = 1e-6 * std::max(1.0, std::abs(reference.abscissa));
      if (std::abs(r.abscissa - reference.abscissa) > tol) continue;
      model.push_back(r.threshold);
      ref.push_back(reference.value);
      break;
    }
  }
  outcome->matched_references = static_cast<int>(model.size());
  if (model.empty()) return;
  double ss_res = 0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    ss_res += (model[i] - ref[i]) * (model[i] - ref[i]);
  }
  outcome->rmse = std::sqrt(ss_res / static_cast<double>(model.size()));
  if (model.size() >= 2) {
    const double ref_mean = MeanOf(ref);
    double ss_tot = 0;
    for (double r : ref) ss_tot += (r - ref_mean) * (r - ref_mean);
    if (ss_tot > 0) outcome->r2 = 1.0 - ss_res / ss_tot;
  }
}

ExperimentOutcome RunExperiment(const ExperimentSpec& spec,
                                const RunOptions& options) {
  ExperimentOutcome outcome;
  outcome.id = spec.id;
  const ModelConfig config = ResolveModelConfig(spec, options);
  const Evaluator evaluator(config);

  if (spec.kind == ExperimentKind::kDprimeGrid) {
    outcome.trading.resize(spec.points.size());
    RunIndexed(static_cast<int>(spec.points.size()), options.jobs,
               [&](int i) {
                 outcome.trading[static_cast<std::size_t>(i)] =
                     RunTradingPoint(evaluator, spec,
                                     spec.points[static_cast<std::size_t>(i)],
                                     options);
               });
    return outcome;
  }

  outcome.thresholds.resize(spec.points.size());
  const bool staircase = options.staircase.value_or(spec.staircase_default);
  RunIndexed(static_cast<int>(spec.points.size()), options.jobs, [&](int i) {
    const ExperimentPoint& point = spec.points[static_cast<std::size_t>(i)];
    outcome.thresholds[static_cast<std::size_t>(i)] =
        staircase ? FindThresholdStaircase(evaluator, spec, point, options)
                  : FindThreshold(evaluator, spec, point, options);
  });
  ScoreAgainstReferences(spec, &outcome);
  return outcome;
}

SuiteOutcome RunSuite(const std::vector<std::string>& ids,
                      const RunOptions& options) {
  SuiteOutcome suite;
  suite.options = options;
  for (const std::string& id : ids) {
    suite.experiments.push_back(RunExperiment(FindExperiment(id), options));
  }
  return suite;
}

std::string SuiteCsv(const SuiteOutcome& outcome) {
  std::string out =
      "experiment,condition,abscissa,threshold,valid,monotonic_warning,"
      "trials,error\n";
  for (const ExperimentOutcome& experiment : outcome.experiments) {
    for (const ThresholdResult& r : experiment.thresholds) {
      out += experiment.id + "," + r.condition + "," + Fmt(r.abscissa) + "," +
             Fmt(r.threshold) + "," + (r.valid ? "1" : "0") + "," +
             (r.monotonic_warning ? "1" : "0") + "," +
             std::to_string(r.trials_used) + "," + r.error + "\n";
    }
  }
  return out;
}

std::string TradingCsv(const ExperimentOutcome& outcome) {
  std::string out =
      "experiment,condition,itd_us,iid_db,mean_d_prime,sd_d_prime,is_best\n";
  for (const TradingRow& row : outcome.trading) {
    for (const TradingCell& cell : row.cells) {
      out += outcome.id + "," + row.condition + "," + Fmt(row.abscissa) + "," +
             Fmt(cell.probe) + "," + Fmt(cell.mean_d_prime) + "," +
             Fmt(cell.sd_d_prime) + "," +
             (cell.probe == row.best_probe ? "1" : "0") + "\n";
    }
  }
  return out;
}

std::string SuiteJson(const SuiteOutcome& outcome) {
  Json root;
  root["options"] = {{"seed", outcome.options.seed},
                     {"trials", outcome.options.trials},
                     {"channels", outcome.options.channels},
                     {"config", outcome.options.config_path},
                     {"procedure", outcome.options.staircase.has_value()
                                       ? (*outcome.options.staircase
                                              ? "staircase"
                                              : "bisect")
                                       : "default"}};
  root["experiments"] = Json::array();
  for (const ExperimentOutcome& experiment : outcome.experiments) {
    Json e;
    e["id"] = experiment.id;
    e["rmse"] = experiment.rmse;
    e["r2"] = experiment.r2;
    e["matched_references"] = experiment.matched_references;
    e["thresholds"] = Json::array();
    for (const ThresholdResult& r : experiment.thresholds) {
      Json jr;
      jr["condition"] = r.condition;
      jr["abscissa"] = r.abscissa;
      jr["threshold"] = r.threshold;
      jr["valid"] = r.valid;
      jr["monotonic_warning"] = r.monotonic_warning;
      jr["trials"] = r.trials_used;
      jr["error"] = r.error;
      Json trace = Json::array();
      for (const ProbeRecord& p : r.trace) {
        trace.push_back({{"probe", p.probe},
                         {"mean", p.mean},
                         {"sd", p.sd},
                         {"trials", p.trials}});
      }
      jr["trace"] = trace;
      e["thresholds"].push_back(jr);
    }
    e["trading"] = Json::array();
    for (const TradingRow& row : experiment.trading) {
      Json jrow;
      jrow["condition"] = row.condition;
      jrow["itd_us"] = row.abscissa;
      jrow["best_iid_db"] = row.best_probe;
      jrow["best_mean_d_prime"] = row.best_mean_d_prime;
      Json cells = Json::array();
      for (const TradingCell& cell : row.cells) {
        cells.push_back({{"iid_db", cell.probe},
                         {"mean_d_prime", cell.mean_d_prime},
                         {"sd_d_prime", cell.sd_d_prime}});
      }
      jrow["cells"] = cells;
      e["trading"].push_back(jrow);
    }
    root["experiments"].push_back(e);
  }
  return root.dump(2) + "\n";
}

std::string PlotData(const ExperimentSpec& spec,
                     const ExperimentOutcome& outcome) {
  std::string out = "# " + spec.id + ": " + spec.title + "\n";
  out += "# condition abscissa model reference\n";
  std::string last_condition;
  for (const ThresholdResult& r : outcome.thresholds) {
    if (!last_condition.empty() && r.condition != last_condition) out += "\n";
    last_condition = r.condition;
    double reference = std::numeric_limits<double>::quiet_NaN();
    for (const ReferencePoint& ref : spec.references) {
      const double tol = 1e-6 * std::max(1.0, std::abs(ref.abscissa));
      if (ref.condition == r.condition &&
          std::abs(ref.abscissa - r.abscissa) <= tol) {
        reference = ref.value;
        break;
      }
    }
    out += r.condition + " " + Fmt(r.abscissa) + " " + Fmt(r.threshold) + " " +
           Fmt(reference) + "\n";
  }
  return out;
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

CalibrationResult CalibrateObserver(const ExperimentSpec& spec,
                                    const ExperimentPoint& point,
                                    double target_srt_db, int num_seeds,
                                    const RunOptions& options) {
  if (spec.kind != ExperimentKind::kSrt) {
    throw std::invalid_argument(
        "observer calibration requires an SRT experiment");
  }
  const ModelConfig config = ResolveModelConfig(spec, options);
  const Evaluator evaluator(config);
  const auto factory = MakeTrialFactory(spec, point, config.sample_rate);
  const std::string scope = spec.id + "/" + PointKey(point);
  const std::vector<EarWeights> weights =
      factory->TargetWeights(target_srt_db);

  CalibrationResult result;
  for (int s = 0; s < num_seeds; ++s) {
    const std::uint64_t seed =
        MixSeed(options.seed, "observer-calibration",
                static_cast<std::uint64_t>(s));
    SessionList sessions;
    AppendSessions(evaluator, *factory, scope, seed, 0, options.trials,
                   &sessions);
    std::vector<double> snrs;
    for (const auto& session : sessions) {
      snrs.push_back(session->EvaluateTarget(weights).snr);
    }

    auto mean_pc = [&](double k) {
      ObserverParams observer = config.observer;
      observer.k = k;
      double sum = 0;
      for (double snr : snrs) {
        sum += PercentCorrect(SiDprime(snr, observer), observer);
      }
      return sum / static_cast<double>(snrs.size());
    };

    double lo = 1e-4, hi = 100.0;
    if (mean_pc(hi) < 0.5) {
      throw std::runtime_error(
          "calibration target is inaudible at the requested threshold");
    }
    for (int iter = 0; iter < 60; ++iter) {
      const double mid = std::sqrt(lo * hi);
      if (mean_pc(mid) >= 0.5) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    result.per_seed_k.push_back(std::sqrt(lo * hi));
  }

  result.k_mean = MeanOf(result.per_seed_k);
  double ss = 0;
  for (double k : result.per_seed_k) {
    ss += (k - result.k_mean) * (k - result.k_mean);
  }
  result.k_sd = result.per_seed_k.size() > 1
                    ? std::sqrt(ss / static_cast<double>(
                                         result.per_seed_k.size() - 1))
                    : 0.0;
  return result;
}

}  // namespace bmfd
