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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bmfd/bmfd_stage.h"
#include "bmfd/decision.h"
#include "bmfd/experiments.h"
#include "bmfd/features.h"
#include "bmfd/gammatone.h"
#include "bmfd/harness.h"
#include "bmfd/model.h"
#include "bmfd/model_config.h"
#include "bmfd/periphery.h"
#include "bmfd/wav.h"

namespace {

namespace fs = std::filesystem;

std::string Fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

bmfd::ModelConfig LoadBaseConfig(const std::string& config_path) {
  return config_path.empty() ? bmfd::ModelConfig{}
                             : bmfd::ModelConfig::FromJsonFile(config_path);
}

void WriteExperimentOutputs(const bmfd::ExperimentSpec& spec,
                            const bmfd::SuiteOutcome& wrapped,
                            const std::string& out_dir) {
  fs::create_directories(out_dir);
  const bmfd::ExperimentOutcome& outcome = wrapped.experiments.front();
  bmfd::WriteTextFile(out_dir + "/" + spec.id + ".json",
                      bmfd::SuiteJson(wrapped));
  if (!outcome.trading.empty()) {
    bmfd::WriteTextFile(out_dir + "/" + spec.id + "_trading.csv",
                        bmfd::TradingCsv(outcome));
  }
  if (!outcome.thresholds.empty()) {
    bmfd::WriteTextFile(out_dir + "/" + spec.id + ".csv",
                        bmfd::SuiteCsv(wrapped));
    bmfd::WriteTextFile(out_dir + "/" + spec.id + ".dat",
                        bmfd::PlotData(spec, outcome));
  }
}

void PrintOutcome(const bmfd::ExperimentSpec& spec,
                  const bmfd::ExperimentOutcome& outcome) {
  std::printf("%s: %s\n", spec.id.c_str(), spec.title.c_str());
  for (const bmfd::ThresholdResult& r : outcome.thresholds) {
    if (r.valid) {
      std::printf("  %-16s %10s  ->  %s%s\n", r.condition.c_str(),
                  Fmt(r.abscissa).c_str(), Fmt(r.threshold, "%.2f").c_str(),
                  r.monotonic_warning ? "  [non-monotonic]" : "");
    } else {
      std::printf("  %-16s %10s  ->  failed (%s)\n", r.condition.c_str(),
                  Fmt(r.abscissa).c_str(), r.error.c_str());
    }
  }
  for (const bmfd::TradingRow& row : outcome.trading) {
    std::printf("  %-16s delay %6s us  ->  best level offset %s dB (d' %s)\n",
                row.condition.c_str(), Fmt(row.abscissa).c_str(),
                Fmt(row.best_probe, "%.2f").c_str(),
                Fmt(row.best_mean_d_prime, "%.3f").c_str());
  }
  if (outcome.matched_references > 0) {
    std::printf("  rmse %s dB over %d reference points",
                Fmt(outcome.rmse, "%.2f").c_str(), outcome.matched_references);
    if (!std::isnan(outcome.r2)) {
      std::printf(", r^2 %s", Fmt(outcome.r2, "%.3f").c_str());
    }
    std::printf("\n");
  }
}

int CommandList() {
  for (const bmfd::ExperimentSpec& spec : bmfd::ExperimentRegistry()) {
    const char* kind = spec.kind == bmfd::ExperimentKind::kThreshold
                           ? "threshold"
                           : spec.kind == bmfd::ExperimentKind::kSrt
                                 ? "srt"
                                 : "dprime_grid";
    std::printf("%-24s %-11s %-8s %3zu points  %s\n", spec.id.c_str(), kind,
                spec.binaural ? "binaural" : "monaural", spec.points.size(),
                spec.title.c_str());
  }
  return 0;
}

int CommandRun(const std::string& id, const bmfd::RunOptions& options,
               const std::string& out_dir) {
  const bmfd::ExperimentSpec& spec = bmfd::FindExperiment(id);
  bmfd::SuiteOutcome wrapped;
  wrapped.options = options;
  wrapped.experiments.push_back(bmfd::RunExperiment(spec, options));
  PrintOutcome(spec, wrapped.experiments.front());
  if (!out_dir.empty()) WriteExperimentOutputs(spec, wrapped, out_dir);
  for (const bmfd::ThresholdResult& r : wrapped.experiments.front().thresholds) {
    if (!r.valid) return 1;
  }
  return 0;
}

int CommandSuite(std::vector<std::string> ids, const bmfd::RunOptions& options,
                 const std::string& out_dir) {
  if (ids.empty()) ids = bmfd::ExperimentIds();
  bmfd::SuiteOutcome suite;
  suite.options = options;
  bool all_valid = true;
  for (const std::string& id : ids) {
    const bmfd::ExperimentSpec& spec = bmfd::FindExperiment(id);
    bmfd::ExperimentOutcome outcome = bmfd::RunExperiment(spec, options);
    PrintOutcome(spec, outcome);
    for (const bmfd::ThresholdResult& r : outcome.thresholds) {
      all_valid = all_valid && r.valid;
    }
    if (!out_dir.empty()) {
      bmfd::SuiteOutcome wrapped;
      wrapped.options = options;
      wrapped.experiments.push_back(outcome);
      WriteExperimentOutputs(spec, wrapped, out_dir);
    }
    suite.experiments.push_back(std::move(outcome));
  }
  if (!out_dir.empty()) {
    bmfd::WriteTextFile(out_dir + "/suite.csv", bmfd::SuiteCsv(suite));
    bmfd::WriteTextFile(out_dir + "/suite.json", bmfd::SuiteJson(suite));
  }
  std::printf("\nsummary:\n");
  for (const bmfd::ExperimentOutcome& outcome : suite.experiments) {
    std::printf("  %-24s rmse %8s  r^2 %8s  (%d refs)\n", outcome.id.c_str(),
                Fmt(outcome.rmse, "%.2f").c_str(),
                Fmt(outcome.r2, "%.3f").c_str(), outcome.matched_references);
  }
  return all_valid ? 0 : 1;
}

int CommandAnalyze(const std::string& target_path,
                   const std::string& reference_path,
                   const std::string& config_path,
                   const std::string& channels, std::uint64_t seed) {
  bmfd::ModelConfig config = LoadBaseConfig(config_path);
  if (!channels.empty()) config.subset = bmfd::ParseChannelSubset(channels);
  if (seed == 0) config.bmfd.jitter_enabled = false;

  bmfd::StereoSignal target = bmfd::ToStereo(bmfd::ReadWav(target_path));
  bmfd::StereoSignal reference = bmfd::ToStereo(bmfd::ReadWav(reference_path));
  if (target.sample_rate != config.sample_rate ||
      reference.sample_rate != config.sample_rate) {
    throw std::runtime_error(
        "wav sample rate does not match the model sample rate (" +
        Fmt(config.sample_rate) + " Hz)");
  }

  bmfd::Evaluator evaluator(config);
  bmfd::ModelDiagnostics diagnostics;
  const bmfd::CombinedSnr combined =
      evaluator.Evaluate(target, reference, seed, &diagnostics);

  std::printf("snr        %s\n", Fmt(combined.snr).c_str());
  std::printf("d_prime    %s\n", Fmt(combined.d_prime).c_str());
  std::printf("detected   %s\n", combined.detected ? "yes" : "no");
  std::printf("env_norm   %s\n", Fmt(combined.env_norm).c_str());
  std::printf("dc_norm    %s\n", Fmt(combined.dc_norm).c_str());
  std::printf("per-channel d':\n");
  for (int c = 0; c < bmfd::kNumBmfdChannels; ++c) {
    if (!diagnostics.channel_present[static_cast<std::size_t>(c)]) continue;
    std::printf("  %-5s %s\n",
                bmfd::ToString(static_cast<bmfd::BmfdChannel>(c)),
                Fmt(diagnostics.per_channel[static_cast<std::size_t>(c)]
                        .d_prime)
                    .c_str());
  }
  return combined.detected ? 0 : 1;
}

int CommandResponseCurves(const std::string& config_path,
                          const std::string& out_dir) {
  bmfd::ModelConfig config = LoadBaseConfig(config_path);
  bmfd::Evaluator evaluator(config);
  fs::create_directories(out_dir);

  {
    std::string text = "# frequency_hz gain_db\n";
    for (int i = 0; i <= 200; ++i) {
      const double f =
          20.0 * std::pow(1000.0, static_cast<double>(i) / 200.0);
      text += Fmt(f) + " " + Fmt(evaluator.ear_filter().GainDb(f)) + "\n";
    }
    bmfd::WriteTextFile(out_dir + "/ear_weighting.dat", text);
  }
  {
    std::string text = "# center_hz measured_erb_hz nominal_erb_hz\n";
    const bmfd::GammatoneFilterbank& bank = evaluator.filterbank();
    for (std::size_t p = 0; p < bank.num_channels(); ++p) {
      const double fc = bank.centers()[p];
      text += Fmt(fc) + " " + Fmt(bank.MeasuredErbHz(p)) + " " +
              Fmt(bmfd::ErbHz(fc)) + "\n";
    }
    bmfd::WriteTextFile(out_dir + "/auditory_filters.dat", text);
  }
  {
    const double env_rate =
        config.sample_rate /
        static_cast<double>(config.features.decimation_factor);
    bmfd::ModulationFilterbank mod_bank(config.features, env_rate);
    std::string text = "# frequency_hz";
    for (std::size_t b = 0; b < mod_bank.num_bands(); ++b) {
      text += " band" + std::to_string(b) + "_gain_db";
    }
    text += "\n";
    for (int i = 0; i <= 240; ++i) {
      const double f =
          0.25 * std::pow(4096.0, static_cast<double>(i) / 240.0);
      text += Fmt(f);
      for (std::size_t b = 0; b < mod_bank.num_bands(); ++b) {
        text += " " + Fmt(mod_bank.GainDb(b, f));
      }
      text += "\n";
    }
    bmfd::WriteTextFile(out_dir + "/modulation_filters.dat", text);
  }
  {
    std::string text =
        "# ipd_deg be_l be_r bi_l bi_c bi_r (on-channel mean square output, "
        "500 Hz tone at 65 dB)\n";
    for (int deg = -180; deg <= 180; ++deg) {
      bmfd::ToneResponseQuery query;
      query.ipd_rad = static_cast<double>(deg) * 3.14159265358979323846 /
                      180.0;
      const bmfd::ToneResponse response =
          bmfd::ComputeToneResponse(evaluator, query);
      text += std::to_string(deg);
      for (double power : response.power) text += " " + Fmt(power);
      text += "\n";
    }
    bmfd::WriteTextFile(out_dir + "/binaural_response.dat", text);
  }
  std::printf("wrote response curves to %s\n", out_dir.c_str());
  return 0;
}

int CommandCalibrate(const std::string& id, const std::string& condition,
                     double target_srt, int num_seeds,
                     const bmfd::RunOptions& options) {
  const bmfd::ExperimentSpec& spec = bmfd::FindExperiment(id);
  const bmfd::ExperimentPoint* point = nullptr;
  for (const bmfd::ExperimentPoint& p : spec.points) {
    if (p.condition == condition) {
      point = &p;
      break;
    }
  }
  if (point == nullptr) {
    throw std::runtime_error("experiment \"" + id + "\" has no condition \"" +
                             condition + "\"");
  }
  const bmfd::CalibrationResult result = bmfd::CalibrateObserver(
      spec, *point, target_srt, num_seeds, options);
  for (std::size_t s = 0; s < result.per_seed_k.size(); ++s) {
    std::printf("seed %zu: k = %s\n", s,
                Fmt(result.per_seed_k[s], "%.5f").c_str());
  }
  std::printf("k = %s +/- %s (n = %d)\n", Fmt(result.k_mean, "%.5f").c_str(),
              Fmt(result.k_sd, "%.5f").c_str(),
              static_cast<int>(result.per_seed_k.size()));
  return 0;
}

int CommandConfig(const std::string& config_path, bool normalized) {
  bmfd::ModelConfig config = LoadBaseConfig(config_path);
  if (normalized) config = config.Normalized();
  std::printf("%s\n", config.ToJsonText().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Binaural matrix feature decoder: psychoacoustic threshold and "
      "intelligibility-sensitivity prediction from two-channel audio"};
  app.require_subcommand(1);

  bmfd::RunOptions options;
  std::string out_dir;
  std::string config_path;
  std::string channels;

  auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("--seed", options.seed, "Random seed for the run");
    cmd->add_option("--trials", options.trials,
                    "Simulated trials per probe level")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", options.jobs, "Worker threads across points")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-probes", options.max_probes,
                    "Probe budget per threshold search")
        ->check(CLI::PositiveNumber);
    cmd->add_flag_callback(
        "--staircase", [&options] { options.staircase = true; },
        "Force the 2-down-1-up staircase search");
    cmd->add_flag_callback(
        "--bisect", [&options] { options.staircase = false; },
        "Force the mean-d' bisection search");
    cmd->add_option("--channels", channels,
                    "Decoder channel subset (all5, lcr, lr, c, be_l)");
    cmd->add_option("--config", config_path, "Model configuration JSON file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "Output directory for result files");
  };

  CLI::App* cmd_list = app.add_subcommand("list", "List the experiments");

  std::string run_id;
  CLI::App* cmd_run = app.add_subcommand("run", "Run one experiment");
  cmd_run->add_option("experiment", run_id, "Experiment id")->required();
  add_run_options(cmd_run);

  std::vector<std::string> suite_ids;
  CLI::App* cmd_suite =
      app.add_subcommand("suite", "Run the benchmark suite");
  cmd_suite->add_option("--experiments", suite_ids,
                        "Subset of experiment ids (default: all)");
  add_run_options(cmd_suite);

  std::string analyze_target, analyze_reference;
  std::uint64_t analyze_seed = 0;
  CLI::App* cmd_analyze = app.add_subcommand(
      "analyze", "Compare a target wav against a reference wav");
  cmd_analyze->add_option("target", analyze_target, "Target stimulus wav")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_analyze
      ->add_option("--reference", analyze_reference, "Reference stimulus wav")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_analyze->add_option("--config", config_path,
                          "Model configuration JSON file")
      ->check(CLI::ExistingFile);
  cmd_analyze->add_option("--channels", channels, "Decoder channel subset");
  cmd_analyze->add_option("--seed", analyze_seed,
                          "Jitter seed (0 disables jitter)");

  CLI::App* cmd_curves = app.add_subcommand(
      "response-curves", "Write filter and decoder response curves");
  cmd_curves->add_option("--config", config_path,
                         "Model configuration JSON file")
      ->check(CLI::ExistingFile);
  cmd_curves->add_option("--out", out_dir, "Output directory")->required();

  std::string cal_id = "speech_reception";
  std::string cal_condition = "colocated";
  double cal_target = 65.0;
  int cal_seeds = 5;
  CLI::App* cmd_calibrate = app.add_subcommand(
      "calibrate", "Fit the observer efficiency to a target threshold");
  cmd_calibrate->add_option("--experiment", cal_id, "SRT experiment id");
  cmd_calibrate->add_option("--condition", cal_condition, "Condition name");
  cmd_calibrate->add_option("--target-srt", cal_target,
                            "Target reception threshold (dB SPL)");
  cmd_calibrate->add_option("--seeds", cal_seeds, "Number of seeds")
      ->check(CLI::PositiveNumber);
  add_run_options(cmd_calibrate);

  bool config_normalized = false;
  CLI::App* cmd_config =
      app.add_subcommand("config", "Print the model configuration JSON");
  cmd_config->add_option("--file", config_path, "Configuration file to load")
      ->check(CLI::ExistingFile);
  cmd_config->add_flag("--normalized", config_normalized,
                       "Apply mode-dependent normalization before printing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  options.channels = channels;
  options.config_path = config_path;

  try {
    if (cmd_list->parsed()) return CommandList();
    if (cmd_run->parsed()) return CommandRun(run_id, options, out_dir);
    if (cmd_suite->parsed()) return CommandSuite(suite_ids, options, out_dir);
    if (cmd_analyze->parsed()) {
      return CommandAnalyze(analyze_target, analyze_reference, config_path,
                            channels, analyze_seed);
    }
    if (cmd_curves->parsed()) {
      return CommandResponseCurves(config_path, out_dir);
    }
    if (cmd_calibrate->parsed()) {
      return CommandCalibrate(cal_id, cal_condition, cal_target, cal_seeds,
                              options);
    }
    if (cmd_config->parsed()) {
      return CommandConfig(config_path, config_normalized);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
