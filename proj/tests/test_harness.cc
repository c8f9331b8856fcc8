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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bmfd/experiments.h"
#include "bmfd/harness.h"
#include "doctest.h"
#include "json.hpp"

namespace bmfd {
namespace {

TEST_CASE("the experiment registry holds the full benchmark set") {
  const auto ids = ExperimentIds();
  REQUIRE(ids.size() == 14);
  const std::vector<std::string> expected = {
      "quiet_thresholds",        "intensity_jnd",
      "tone_duration_in_noise",  "spectral_masking",
      "am_detection",            "am_depth_discrimination",
      "am_masking",              "itd_discrimination",
      "iid_discrimination",      "binaural_masked_tone",
      "n0spi_duration",          "phase_transition",
      "time_intensity_trading",  "speech_reception"};
  for (const std::string& id : expected) {
    CHECK(std::find(ids.begin(), ids.end(), id) != ids.end());
    CHECK(FindExperiment(id).id == id);
  }
  CHECK_THROWS(FindExperiment("tuning_curves"));

  for (const ExperimentSpec& spec : ExperimentRegistry()) {
    CHECK_FALSE(spec.title.empty());
    CHECK_FALSE(spec.points.empty());
    CHECK(spec.search.resolution > 0.0);
    CHECK(spec.search.lo < spec.search.hi);
  }
}

TEST_CASE("lateralization experiments default to the staircase procedure") {
  for (const ExperimentSpec& spec : ExperimentRegistry()) {
    const bool lateralization = spec.id == "itd_discrimination" ||
                                spec.id == "iid_discrimination";
    CHECK(spec.staircase_default == lateralization);
  }
}

TEST_CASE("experiment kinds and modes are wired correctly") {
  CHECK(FindExperiment("quiet_thresholds").kind == ExperimentKind::kThreshold);
  CHECK(FindExperiment("time_intensity_trading").kind ==
        ExperimentKind::kDprimeGrid);
  CHECK(FindExperiment("speech_reception").kind == ExperimentKind::kSrt);
  CHECK(FindExperiment("speech_reception").intelligibility);
  CHECK(FindExperiment("speech_reception").binaural);
  CHECK(FindExperiment("binaural_masked_tone").binaural);
  CHECK(FindExperiment("n0spi_duration").binaural);
  CHECK_FALSE(FindExperiment("quiet_thresholds").binaural);
  CHECK_FALSE(FindExperiment("am_detection").intelligibility);
}

TEST_CASE("every benchmark point builds a consistent trial factory") {
  for (const ExperimentSpec& spec : ExperimentRegistry()) {
    for (const ExperimentPoint& point : spec.points) {
      CAPTURE(spec.id);
      CAPTURE(point.condition);
      const auto factory = MakeTrialFactory(spec, point, 48000.0);
      REQUIRE(factory != nullptr);

      const auto components = factory->MakeComponents(7);
      REQUIRE_FALSE(components.empty());
      const std::size_t n = components.front().size();
      CHECK(n > 0);
      for (const StereoSignal& c : components) {
        CHECK(c.left.size() == n);
        CHECK(c.right.size() == n);
        CHECK(c.sample_rate == 48000.0);
      }

      const SearchSpec search = factory->AdjustSearch(spec.search);
      CHECK(search.lo < search.hi);
      CHECK(search.resolution > 0.0);
      for (double probe : {search.lo, 0.5 * (search.lo + search.hi), search.hi}) {
        CHECK(factory->TargetWeights(probe).size() == components.size());
      }
      CHECK(factory->ReferenceWeights().size() == components.size());
    }
  }
}

TEST_CASE("fresh noise tokens change with the token seed") {
  const ExperimentSpec& spec = FindExperiment("binaural_masked_tone");
  const auto factory = MakeTrialFactory(spec, spec.points.front(), 48000.0);
  const auto a = factory->MakeComponents(1);
  const auto b = factory->MakeComponents(1);
  const auto c = factory->MakeComponents(2);
  REQUIRE(a.size() == b.size());
  CHECK(a.front().left == b.front().left);
  CHECK(a.front().left != c.front().left);
}

TEST_CASE("model configuration resolves experiment and option overrides") {
  const ModelConfig speech =
      ResolveModelConfig(FindExperiment("speech_reception"), RunOptions{});
  CHECK(speech.intelligibility_mode);
  CHECK(speech.channel_high_hz == 8000.0);
  CHECK(speech.features.use_band_importance);

  const ModelConfig plain =
      ResolveModelConfig(FindExperiment("quiet_thresholds"), RunOptions{});
  CHECK_FALSE(plain.intelligibility_mode);
  CHECK(plain.channel_high_hz == 12500.0);

  RunOptions narrowed;
  narrowed.channels = "lr";
  const ModelConfig overridden =
      ResolveModelConfig(FindExperiment("binaural_masked_tone"), narrowed);
  CHECK(overridden.subset == ChannelSubset::kBiLr);

  RunOptions broken;
  broken.channels = "stereo";
  CHECK_THROWS(ResolveModelConfig(FindExperiment("quiet_thresholds"), broken));
}

TEST_CASE("threshold searches are reproducible for a fixed seed") {
  const ExperimentSpec& spec = FindExperiment("intensity_jnd");
  const Evaluator evaluator(ResolveModelConfig(spec, RunOptions{}));
  RunOptions options;
  options.trials = 2;

  const ThresholdResult a =
      FindThreshold(evaluator, spec, spec.points.front(), options);
  const ThresholdResult b =
      FindThreshold(evaluator, spec, spec.points.front(), options);
  CHECK(a.valid);
  CHECK(a.threshold == b.threshold);
  CHECK(a.trials_used == b.trials_used);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].probe == b.trace[i].probe);
    CHECK(a.trace[i].mean == b.trace[i].mean);
  }

  RunOptions other_seed = options;
  other_seed.seed = 4321;
  const ThresholdResult c =
      FindThreshold(evaluator, spec, spec.points.front(), other_seed);
  CHECK(c.valid);
  // Different stimulus tokens and jitter draws change the probe metrics.
  bool any_mean_changed = false;
  for (const ProbeRecord& p : c.trace) {
    for (const ProbeRecord& q : a.trace) {
      if (p.probe == q.probe && p.mean != q.mean) any_mean_changed = true;
    }
  }
  CHECK(any_mean_changed);
}

TEST_CASE("staircase searches are reproducible for a fixed seed") {
  const ExperimentSpec& spec = FindExperiment("iid_discrimination");
  const Evaluator evaluator(ResolveModelConfig(spec, RunOptions{}));
  RunOptions options;
  options.trials = 2;
  options.max_probes = 40;

  const ThresholdResult a =
      FindThresholdStaircase(evaluator, spec, spec.points.front(), options);
  const ThresholdResult b =
      FindThresholdStaircase(evaluator, spec, spec.points.front(), options);
  CHECK(a.valid);
  CHECK(a.threshold == b.threshold);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].probe == b.trace[i].probe);
  }
}

TEST_CASE("reference scoring computes rmse and r2 over matched points") {
  ExperimentSpec spec;
  spec.id = "synthetic";
  spec.references = {{"a", 500.0, 40.0, "bench"},
                     {"a", 1000.0, 50.0, "bench"},
                     {"b", 500.0, 60.0, "bench"}};

  ExperimentOutcome outcome;
  ThresholdResult r1;
  r1.condition = "a";
  r1.abscissa = 500.0;
  r1.threshold = 42.0;
  r1.valid = true;
  ThresholdResult r2;
  r2.condition = "a";
  r2.abscissa = 1000.0;
  r2.threshold = 49.0;
  r2.valid = true;
  ThresholdResult r3;  // invalid: must not be matched
  r3.condition = "b";
  r3.abscissa = 500.0;
  r3.threshold = 61.0;
  r3.valid = false;
  outcome.thresholds = {r1, r2, r3};

  ScoreAgainstReferences(spec, &outcome);
  CHECK(outcome.matched_references == 2);
  CHECK(outcome.rmse == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
  CHECK(outcome.r2 == doctest::Approx(0.9).epsilon(1e-12));

  ExperimentOutcome unmatched;
  ScoreAgainstReferences(spec, &unmatched);
  CHECK(unmatched.matched_references == 0);
  CHECK(std::isnan(unmatched.rmse));
}

SuiteOutcome TinySuite() {
  SuiteOutcome suite;
  suite.options.seed = 9;
  suite.options.trials = 3;
  ExperimentOutcome experiment;
  experiment.id = "demo";
  ThresholdResult r;
  r.condition = "a";
  r.abscissa = 500.0;
  r.threshold = 42.25;
  r.valid = true;
  r.trials_used = 3;
  r.trace = {{40.0, 0.5, 0.1, 3}, {44.0, 1.2, 0.2, 3}};
  experiment.thresholds.push_back(r);
  ThresholdResult bad;
  bad.condition = "b";
  bad.abscissa = 1000.0;
  bad.error = "no bracket";
  experiment.thresholds.push_back(bad);
  suite.experiments.push_back(experiment);
  return suite;
}

TEST_CASE("suite csv is stable and carries errors in the last column") {
  const SuiteOutcome suite = TinySuite();
  const std::string csv = SuiteCsv(suite);
  CHECK(csv == SuiteCsv(suite));
  CHECK(csv ==
        "experiment,condition,abscissa,threshold,valid,monotonic_warning,"
        "trials,error\n"
        "demo,a,500,42.25,1,0,3,\n"
        "demo,b,1000,nan,0,0,0,no bracket\n");
}

TEST_CASE("suite json carries options and the search procedure") {
  SuiteOutcome suite = TinySuite();
  const auto parsed = nlohmann::json::parse(SuiteJson(suite));
  CHECK(parsed["options"]["seed"] == 9);
  CHECK(parsed["options"]["trials"] == 3);
  CHECK(parsed["options"]["procedure"] == "default");
  REQUIRE(parsed["experiments"].size() == 1);
  const auto& e = parsed["experiments"][0];
  CHECK(e["id"] == "demo");
  REQUIRE(e["thresholds"].size() == 2);
  CHECK(e["thresholds"][0]["condition"] == "a");
  CHECK(e["thresholds"][0]["threshold"] == doctest::Approx(42.25));
  CHECK(e["thresholds"][0]["trace"].size() == 2);
  CHECK(e["thresholds"][1]["valid"] == false);
  CHECK(e["thresholds"][1]["error"] == "no bracket");

  suite.options.staircase = true;
  CHECK(nlohmann::json::parse(
            SuiteJson(suite))["options"]["procedure"] == "staircase");
  suite.options.staircase = false;
  CHECK(nlohmann::json::parse(
            SuiteJson(suite))["options"]["procedure"] == "bisect");

  CHECK(SuiteJson(suite) == SuiteJson(suite));
}

TEST_CASE("observer calibration rejects non reception experiments") {
  const ExperimentSpec& spec = FindExperiment("quiet_thresholds");
  CHECK_THROWS(CalibrateObserver(spec, spec.points.front(), -5.0, 1,
                                 RunOptions{}));
}

}  // namespace
}  // namespace bmfd
