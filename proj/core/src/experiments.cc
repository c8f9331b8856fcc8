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

#include "bmfd/experiments.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bmfd/rng.h"
#include "bmfd/stimulus.h"
#include "bmfd/tables.h"
#include "json.hpp"

namespace bmfd {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void Fail(const std::string& context, const std::string& message) {
  throw std::runtime_error("experiment registry: " + context + ": " + message);
}

// ---------------------------------------------------------------------------
// Stimulus helpers shared by the trial factories.

Signal PlaceInSilence(const Signal& s, std::size_t total_samples,
                      double onset_s) {
  Signal out;
  out.sample_rate = s.sample_rate;
  out.samples.assign(total_samples, 0.0);
  auto onset = static_cast<std::size_t>(
      std::llround(std::max(0.0, onset_s) * s.sample_rate));
  for (std::size_t i = 0; i < s.size() && onset + i < total_samples; ++i) {
    out.samples[onset + i] = s.samples[i];
  }
  return out;
}

StereoSignal StereoFromPhase(const Signal& s, const std::string& phase,
                             const std::string& context) {
  if (phase == "0") return ToStereo(s, InterauralMode::kDiotic);
  if (phase == "pi") return ToStereo(s, InterauralMode::kAntiphasic);
  if (phase == "m") return ToStereo(s, InterauralMode::kLeftOnly);
  Fail(context, "unknown interaural phase \"" + phase + "\"");
}

// Elementwise product with a phase-zero sinusoid, used to build modulator
// components that share the carrier token.
Signal TimesSine(const Signal& carrier, double rate_hz) {
  Signal out = carrier;
  const double w = 2.0 * kPi * rate_hz / carrier.sample_rate;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] *= std::sin(w * static_cast<double>(i));
  }
  return out;
}

ToneSpec ToneFromParams(const ParamMap& p, const std::string& prefix,
                        double sample_rate) {
  ToneSpec spec;
  spec.frequency_hz = p.Num(prefix + "frequency_hz");
  spec.level_db = p.Num(prefix + "level_db");
  spec.duration_s = p.Num(prefix + "duration_s");
  spec.ramp_s = p.Num(prefix + "ramp_s", kDefaultRampSeconds);
  spec.sample_rate = sample_rate;
  return spec;
}

// ---------------------------------------------------------------------------
// Trial factories, one per experiment family.

class ToneInQuietFactory : public TrialFactory {
 public:
  ToneInQuietFactory(const ExperimentPoint& point, double sample_rate)
      : base_level_db_(point.params.Num("signal_base_level_db", 40.0)) {
    spec_.frequency_hz = point.params.Num("signal_frequency_hz");
    spec_.level_db = base_level_db_;
    spec_.duration_s = point.params.Num("signal_duration_s", 0.5);
    spec_.ramp_s = point.params.Num("signal_ramp_s", kDefaultRampSeconds);
    spec_.sample_rate = sample_rate;
  }

  std::vector<StereoSignal> MakeComponents(std::uint64_t) const override {
    return {ToStereo(MakeTone(spec_), InterauralMode::kLeftOnly)};
  }

  std::vector<EarWeights> TargetWeights(double probe) const override {
    const double g = std::pow(10.0, (probe - base_level_db_) / 20.0);
    return {{g, g}};
  }

  std::vector<EarWeights> ReferenceWeights() const override {
    return {{0.0, 0.0}};
  }

 private:
  double base_level_db_;
  ToneSpec spec_;
};

class IntensityJndFactory : public TrialFactory {
 public:
  IntensityJndFactory(const ExperimentPoint& point, double sample_rate) {
    spec_.frequency_hz = point.params.Num("signal_frequency_hz", 1000.0);
    spec_.level_db = point.params.Num("pedestal_level_db");
    spec_.duration_s = point.params.Num("signal_duration_s", 0.5);
    spec_.ramp_s = point.params.Num("signal_ramp_s", kDefaultRampSeconds);
    spec_.sample_rate = sample_rate;
  }

  std::vector<StereoSignal> MakeComponents(std::uint64_t) const override {
    return {ToStereo(MakeTone(spec_), InterauralMode::kLeftOnly)};
  }

  // probe is the level increment in dB applied to the pedestal.
  std::vector<EarWeights> TargetWeights(double probe) const override {
    const double g = std::pow(10.0, probe / 20.0);
    return {{g, g}};
  }

  std::vector<EarWeights> ReferenceWeights() const override {
    return {{1.0, 1.0}};
  }

 private:
  ToneSpec spec_;
};

class MaskedToneFactory : public TrialFactory {
 public:
  MaskedToneFactory(const ExperimentPoint& point, double sample_rate)
      : sample_rate_(sample_rate), params_(point.params) {
    masker_kind_ = params_.Str("masker_kind", "band_noise");
    masker_duration_s_ = params_.Num("masker_duration_s");
    signal_base_level_db_ = params_.Num("signal_base_level_db", 60.0);
    signal_.frequency_hz = params_.Num("signal_frequency_hz");
    signal_.level_db = signal_base_level_db_;
    signal_.duration_s = params_.Num("signal_duration_s");
    signal_.ramp_s = params_.Num("signal_ramp_s", kDefaultRampSeconds);
    signal_.sample_rate = sample_rate;
    double onset = params_.Num("signal_onset_s", -1.0);
    if (onset < 0.0) onset = 0.5 * (masker_duration_s_ - signal_.duration_s);
    signal_onset_s_ = onset;
  }

  std::vector<StereoSignal> MakeComponents(
      std::uint64_t token_seed) const override {
    Signal masker;
    if (masker_kind_ == "tone") {
      masker = MakeTone(ToneFromParams(params_, "masker_", sample_rate_));
    } else {
      BandNoiseSpec spec;
      spec.low_hz = params_.Num("masker_low_hz");
      spec.high_hz = params_.Num("masker_high_hz");
      spec.level_db = params_.Num("masker_level_db");
      spec.level_is_spectrum_db_hz = false;
      spec.duration_s = masker_duration_s_;
      spec.ramp_s = params_.Num("masker_ramp_s", kDefaultRampSeconds);
      spec.sample_rate = sample_rate_;
      masker = MakeBandNoise(spec, token_seed);
    }
    const auto total = static_cast<std::size_t>(
        std::llround(masker_duration_s_ * sample_rate_));
    Signal placed = PlaceInSilence(MakeTone(signal_), total, signal_onset_s_);
    return {ToStereo(masker, InterauralMode::kLeftOnly),
            ToStereo(placed, InterauralMode::kLeftOnly)};
  }

  std::vector<EarWeights> TargetWeights(double probe) const override {
    const double g = std::pow(10.0, (probe - signal_base_level_db_) / 20.0);
    return {{1.0, 1.0}, {g, g}};
  }

  std::vector<EarWeights> ReferenceWeights() const override {
    return {{1.0, 1.0}, {0.0, 0.0}};
  }

 private:
  double sample_rate_;
  ParamMap params_;
  std::string masker_kind_;
  double masker_duration_s_;
  double signal_base_level_db_;
  double signal_onset_s_ = 0;
  ToneSpec signal_;
};

class AmDetectionFactory : public TrialFactory {
 public:
  AmDetectionFactory(const ExperimentPoint& point, double sample_rate)
      : rate_hz_(point.params.Num("rate_hz")),
        equal_power_(point.params.Num("equal_power", 1.0) != 0.0) {
    carrier_.low_hz = point.params.Num("carrier_low_hz");
    carrier_.high_hz = point.params.Num("carrier_high_hz");
    carrier_.level_db = point.params.Num("carrier_level_db");
    carrier_.level_is_spectrum_db_hz = false;
    carrier_.duration_s = point.params.Num("carrier_duration_s");
    carrier_.ramp_s = point.params.Num("carrier_ramp_s", kDefaultRampSeconds);
    carrier_.sample_rate = sample_rate;
  }

  std::vector<StereoSignal> MakeComponents(
      std::uint64_t token_seed) const override {
    Signal carrier = MakeBandNoise(carrier_, token_seed);
    Signal mod = TimesSine(carrier, rate_hz_);
    return {ToStereo(carrier, InterauralMode::kLeftOnly),
            ToStereo(mod, InterauralMode::kLeftOnly)};
  }

  // probe is the modulation depth in dB (20*log10 m).
  std::vector<EarWeights> TargetWeights(double probe) const override {
    const double m = std::pow(10.0, probe / 20.0);
    const double s = equal_power_ ? std::sqrt(1.0 + 0.5 * m * m) : 1.0;
    return {{1.0 / s, 1.0 / s}, {m / s, m / s}};
  }

  std::vector<EarWeights> ReferenceWeights() const override {
    return {{1.0, 1.0}, {0.0, 0.0}};
  }

 private:
  double rate_hz_;
  bool equal_power_;
  BandNoiseSpec carrier_;
};

class AmDepthDiscriminationFactory : public TrialFactory {
 public:
  AmDepthDiscriminationFactory(const ExperimentPoint& point,
                               double sample_rate)
      : sample_rate_(sample_rate),
        params_(point.params),
        rate_hz_(point.params.Num("rate_hz", 16.0)),
        standard_depth_(
            std::pow(10.0, point.params.Num("standard_depth_db") / 20.0)) {}

  std::vector<StereoSignal> MakeComponents(
      std::uint64_t token_seed) const override {
    Signal carrier;
    if (params_.Str("carrier_kind", "band_noise") == "tone") {
      carrier = MakeTone(ToneFromParams(params_, "carrier_", sample_rate_));
    } else {
      BandNoiseSpec spec;
      spec.low_hz = params_.Num("carrier_low_hz");
      spec.high_hz = params_.Num("carrier_high_hz");
      spec.level_db = params_.Num("carrier_level_db");
      spec.duration_s = params_.Num("carrier_duration_s");
      spec.ramp_s = params_.Num("carrier_ramp_s", kDefaultRampSeconds);
      spec.sample_rate = sample_rate_;
      carrier = MakeBandNoise(spec, token_seed);
    }
    Signal mod = TimesSine(carrier, rate_hz_);
    return {ToStereo(carrier, InterauralMode::kLeftOnly),
            ToStereo(mod, InterauralMode::kLeftOnly)};
  }

  // probe is 10*log10 of the relative modulation-power increment.
  std::vector<EarWeights> TargetWeights(double probe) const override {
    const double increment = std::pow(10.0, probe / 10.0);
    const double m = standard_depth_ * std::sqrt(1.0 + increment);
    return {{1.0, 1.0}, {m, m}};
  }

  std::vector<EarWeights> ReferenceWeights() const override {
    return {{1.0, 1.0}, {standard_depth_, standard_depth_}};
  }

  SearchSpec AdjustSearch(const SearchSpec& search) const override {
    // Keep the comparison depth at or below full modulation.
    SearchSpec out = search;
    const double headroom =
        1.0 / (standard_depth_ * standard_depth_) - 1.0;
    if (headroom > 0.0) {
      out.hi = std::min(out.hi, 10.0 * std::log10(headroom));
    }
    out.hi = std::max(out.hi, out.lo + 4.0 * out.resolution);
    return out;
  }

 private:
  double sample_rate_;
  ParamMap params_;
  double rate_hz_;
  double standard_depth_;
};

class AmMaskingFactory : public TrialFactory {
 public:
  AmMaskingFactory(const ExperimentPoint& point, double sample_rate)
      : masker_rate_hz_(point.params.Num("masker_rate_hz")),
        masker_depth_(point.params.Num("masker_depth", 0.5)),
        target_rate_hz_(point.params.Num("target_rate_hz")) {
    carrier_.low_hz = point.params.Num("carrier_low_hz");
    carrier_.high_hz = point.params.Num("carrier_high_hz");
    carrier_.level_db = point.params.Num("carrier_level_db");
    carrier_.duration_s = point.params.Num("carrier_duration_s");
    carrier_.ramp_s = point.params.Num("carrier_ramp_s", kDefaultRampSeconds);
    carrier_.sample_rate = sample_rate;
  }

  std::vector<StereoSignal> MakeComponents(
      std::uint64_t token_seed) const override {
    Signal carrier = MakeBandNoise(carrier_, token_seed);
    Signal masked = carrier;
    const double w = 2.0 * kPi * masker_rate_hz_ / carrier.sample_rate;
    for (std::size_t i = 0; i < masked.samples.size(); ++i) {
      masked.samples[i] *=
          1.0 + masker_depth_ * std::sin(w * static_cast<double>(i));
    }
    Signal probe_mod = TimesSine(carrier, target_rate_hz_);
    return {ToStereo(masked, InterauralMode::kLeftOnly),
            ToStereo(probe_mod, InterauralMode::kLeftOnly)};
  }

  std::vector<EarWeights> TargetWeights(double probe) const override {
    const double m = std::pow(10.0, probe / 20.0);
    return {{1.0, 1.0}, {m, m}};
  }

  std::vector<EarWeights> ReferenceWeights() const override {
    return {{1.0, 1.0}, {0.0, 0.0}};
  }

 private:
  double masker_rate_hz_;
  double masker_depth_;
  double target_rate_hz_;
  BandNoiseSpec carrier_;
};

// Tone lateralization by interaural time difference. The target is built
// from an in-phase and a quadrature component so that any right-ear phase
// can be expressed as fixed weights over shared components.
class ItdFactory : public TrialFactory {
 public:
  ItdFactory(const ExperimentPoint& point, double sample_rate)
      : frequency_hz_(point.params.Num("signal_frequency_hz")) {
    spec_.frequency_hz = frequency_hz_;
    spec_.level_db = point.params.Num("signal_level_db", 65.0);
    spec_.duration_s = point.params.Num("signal_duration_s", 0.5);
    spec_.ramp_s = point.params.Num("signal_ramp_s", 0.05);
    spec_.sample_rate = sample_rate;
  }

  std::vector<StereoSignal> MakeComponents(std::uint64_t) const override {
    ToneSpec quad = spec_;
    quad.phase_rad = 0.5 * kPi;
    return {ToStereo(MakeTone(spec_), InterauralMode::kDiotic),
            ToStereo(MakeTone(quad), InterauralMode::kDiotic)};
  }

  // probe is the interaural delay in microseconds, left leading.
  std::vector<EarWeights> TargetWeights(double probe) const override {
    const double phi = 2.0 * kPi * frequency_hz_ * probe * 1e-6;
    return {{1.0, std::cos(phi)}, {0.0, -std::sin(phi)}};
  }

  std::vector<EarWeights> ReferenceWeights() const override {
    return {{1.0, 1.0}, {0.0, 0.0}};
  }

  SearchSpec AdjustSearch(const SearchSpec& search) const override {
    // Stay below a quarter period so the phase cue cannot wrap.
    SearchSpec out = search;
    out.hi = std::min(out.hi, 0.25 / frequency_hz_ * 1e6);
    out.hi = std::max(out.hi, out.lo + 4.0 * out.resolution);
    return out;
  }

 private:
  double frequency_hz_;
  ToneSpec spec_;
};

class IidFactory : public TrialFactory {
 public:
  IidFactory(const ExperimentPoint& point, double sample_rate) {
    spec_.frequency_hz = point.params.Num("signal_frequency_hz");
    spec_.level_db = point.params.Num("signal_level_db", 65.0);
    spec_.duration_s = point.params.Num("signal_duration_s", 0.5);
    spec_.ramp_s = point.params.Num("signal_ramp_s", 0.05);
    spec_.sample_rate = sample_rate;
  }

  std::vector<StereoSignal> MakeComponents(std::uint64_t) const override {
    return {ToStereo(MakeTone(spec_), InterauralMode::kDiotic)};
  }

  // probe is the interaural level difference in dB, split evenly.
  std::vector<EarWeights> TargetWeights(double probe) const override {
    const double g = std::pow(10.0, probe / 40.0);
    return {{g, 1.0 / g}};
  }

  std::vector<EarWeights> ReferenceWeights() const override {
    return {{1.0, 1.0}};
  }

 private:
  ToneSpec spec_;
};

class BinauralMaskedToneFactory : public TrialFactory {
 public:
  BinauralMaskedToneFactory(const ExperimentPoint& point, double sample_rate)
      : sample_rate_(sample_rate), params_(point.params) {
    masker_.low_hz = params_.Num("masker_low_hz");
    masker_.high_hz = params_.Num("masker_high_hz");
    masker_.level_db = params_.Num("masker_spectrum_level_db_hz");
    masker_.level_is_spectrum_db_hz = true;
    masker_.duration_s = params_.Num("masker_duration_s");
    masker_.ramp_s = params_.Num("masker_ramp_s", kDefaultRampSeconds);
    masker_.sample_rate = sample_rate;
    masker_phase_ = params_.Str("masker_phase", "0");

    signal_base_level_db_ = params_.Num("signal_base_level_db", 60.0);
    signal_phase_ = params_.Str("signal_phase", "pi");
    signal_.frequency_hz = params_.Num("signal_frequency_hz");
    signal_.level_db = signal_base_level_db_;
    signal_.duration_s = params_.Num("signal_duration_s");
    double ramp = params_.Num("signal_ramp_s", -1.0);
    if (ramp < 0.0) ramp = std::min(0.002, 0.25 * signal_.duration_s);
    signal_.ramp_s = ramp;
    signal_.sample_rate = sample_rate;
    double onset = params_.Num("signal_onset_s", -1.0);
    if (onset < 0.0) onset = 0.5 * (masker_.duration_s - signal_.duration_s);
    signal_onset_s_ = onset;
  }

  std::vector<StereoSignal> MakeComponents(
      std::uint64_t token_seed) const override {
    Signal masker = MakeBandNoise(masker_, token_seed);
    const auto total = static_cast<std::size_t>(
        std::llround(masker_.duration_s * sample_rate_));
    Signal placed = PlaceInSilence(MakeTone(signal_), total, signal_onset_s_);
    return {StereoFromPhase(masker, masker_phase_, "masker"),
            StereoFromPhase(placed, signal_phase_, "signal")};
  }

  std::vector<EarWeights> TargetWeights(double probe) const override {
    const double g = std::pow(10.0, (probe - signal_base_level_db_) / 20.0);
    return {{1.0, 1.0}, {g, g}};
  }

  std::vector<EarWeights> ReferenceWeights() const override {
    return {{1.0, 1.0}, {0.0, 0.0}};
  }

 private:
  double sample_rate_;
  ParamMap params_;
  BandNoiseSpec masker_;
  std::string masker_phase_;
  ToneSpec signal_;
  std::string signal_phase_;
  double signal_base_level_db_;
  double signal_onset_s_ = 0;
};

class PhaseTransitionFactory : public TrialFactory {
 public:
  PhaseTransitionFactory(const ExperimentPoint& point, double sample_rate)
      : sample_rate_(sample_rate) {
    masker_.low_hz = point.params.Num("masker_low_hz", 100.0);
    masker_.high_hz = point.params.Num("masker_high_hz", 2000.0);
    masker_.spectrum_level_db_hz =
        point.params.Num("masker_spectrum_level_db_hz", 40.0);
    masker_.duration_s = point.params.Num("masker_duration_s", 0.75);
    masker_.transition_s = point.params.Num("masker_transition_s", 0.375);
    masker_.first_sign = point.params.Num("first_sign", 1.0) < 0.0 ? -1 : 1;
    masker_.second_sign = point.params.Num("second_sign", -1.0) < 0.0 ? -1 : 1;
    masker_.first_offset_db = point.params.Num("first_offset_db", 0.0);
    masker_.second_offset_db = point.params.Num("second_offset_db", 0.0);
    masker_.ramp_s = point.params.Num("masker_ramp_s", kDefaultRampSeconds);
    masker_.sample_rate = sample_rate;

    signal_base_level_db_ = point.params.Num("signal_base_level_db", 60.0);
    signal_.frequency_hz = point.params.Num("signal_frequency_hz", 500.0);
    signal_.level_db = signal_base_level_db_;
    signal_.duration_s = point.params.Num("signal_duration_s", 0.02);
    signal_.ramp_s = point.params.Num("signal_ramp_s", 0.005);
    signal_.sample_rate = sample_rate;
    // The signal centre is placed relative to the masker transition.
    const double offset_s = point.params.Num("signal_offset_ms") * 1e-3;
    signal_onset_s_ =
        masker_.transition_s + offset_s - 0.5 * signal_.duration_s;
  }

  std::vector<StereoSignal> MakeComponents(
      std::uint64_t token_seed) const override {
    StereoSignal masker = MakePhaseTransitionMasker(masker_, token_seed);
    const auto total = static_cast<std::size_t>(
        std::llround(masker_.duration_s * sample_rate_));
    Signal placed = PlaceInSilence(MakeTone(signal_), total, signal_onset_s_);
    return {masker, ToStereo(placed, InterauralMode::kAntiphasic)};
  }

  std::vector<EarWeights> TargetWeights(double probe) const override {
    const double g = std::pow(10.0, (probe - signal_base_level_db_) / 20.0);
    return {{1.0, 1.0}, {g, g}};
  }

  std::vector<EarWeights> ReferenceWeights() const override {
    return {{1.0, 1.0}, {0.0, 0.0}};
  }

 private:
  double sample_rate_;
  PhaseTransitionSpec masker_;
  ToneSpec signal_;
  double signal_base_level_db_;
  double signal_onset_s_ = 0;
};

// Time-intensity trading: the point fixes the interaural delay, the probe
// axis is the opposing level difference (negative favours the lagging ear).
class TradingFactory : public TrialFactory {
 public:
  TradingFactory(const ExperimentPoint& point, double sample_rate)
      : frequency_hz_(point.params.Num("signal_frequency_hz", 500.0)),
        itd_us_(point.abscissa) {
    spec_.frequency_hz = frequency_hz_;
    spec_.level_db = point.params.Num("signal_level_db", 65.0);
    spec_.duration_s = point.params.Num("signal_duration_s", 0.5);
    spec_.ramp_s = point.params.Num("signal_ramp_s", 0.05);
    spec_.sample_rate = sample_rate;
  }

  std::vector<StereoSignal> MakeComponents(std::uint64_t) const override {
    ToneSpec quad = spec_;
    quad.phase_rad = 0.5 * kPi;
    return {ToStereo(MakeTone(spec_), InterauralMode::kDiotic),
            ToStereo(MakeTone(quad), InterauralMode::kDiotic)};
  }

  std::vector<EarWeights> TargetWeights(double probe) const override {
    const double phi = 2.0 * kPi * frequency_hz_ * itd_us_ * 1e-6;
    const double gl = std::pow(10.0, probe / 40.0);
    const double gr = 1.0 / gl;
    return {{gl, gr * std::cos(phi)}, {0.0, -gr * std::sin(phi)}};
  }

  std::vector<EarWeights> ReferenceWeights() const override {
    return {{1.0, 1.0}, {0.0, 0.0}};
  }

 private:
  double frequency_hz_;
  double itd_us_;
  ToneSpec spec_;
};

// Intelligibility surrogate: an envelope-modulated target token in two
// independent modulated maskers that are either co-located or pulled to the
// sides by opposite interaural delays.
class SpeechReceptionFactory : public TrialFactory {
 public:
  SpeechReceptionFactory(const ExperimentPoint& point, double sample_rate)
      : sample_rate_(sample_rate),
        masker_itd_s_(point.params.Num("masker_itd_ms") * 1e-3),
        target_base_level_db_(
            point.params.Num("target_base_level_db", 60.0)) {
    masker_.level_db = point.params.Num("masker_level_db", 65.0);
    masker_.duration_s = point.params.Num("duration_s", 1.0);
    masker_.envelope_cutoff_hz = point.params.Num("envelope_cutoff_hz", 4.0);
    masker_.ramp_s = point.params.Num("ramp_s", kDefaultRampSeconds);
    masker_.sample_rate = sample_rate;
    target_ = masker_;
    target_.level_db = target_base_level_db_;
  }

  std::vector<StereoSignal> MakeComponents(
      std::uint64_t token_seed) const override {
    StereoSignal m1 = ToStereo(
        MakeSpeechEnvelopeNoise(masker_, MixSeed(token_seed, "masker", 1)),
        InterauralMode::kDiotic);
    StereoSignal m2 = ToStereo(
        MakeSpeechEnvelopeNoise(masker_, MixSeed(token_seed, "masker", 2)),
        InterauralMode::kDiotic);
    if (masker_itd_s_ != 0.0) {
      ApplyItd(&m1, masker_itd_s_);
      ApplyItd(&m2, -masker_itd_s_);
    }
    StereoSignal target = ToStereo(
        MakeSpeechEnvelopeNoise(target_, MixSeed(token_seed, "target")),
        InterauralMode::kDiotic);
    return {m1, m2, target};
  }

  std::vector<EarWeights> TargetWeights(double probe) const override {
    const double g = std::pow(10.0, (probe - target_base_level_db_) / 20.0);
    return {{1.0, 1.0}, {1.0, 1.0}, {g, g}};
  }

  std::vector<EarWeights> ReferenceWeights() const override {
    return {{1.0, 1.0}, {1.0, 1.0}, {0.0, 0.0}};
  }

 private:
  double sample_rate_;
  double masker_itd_s_;
  double target_base_level_db_;
  SpeechEnvelopeNoiseSpec masker_;
  SpeechEnvelopeNoiseSpec target_;
};

// ---------------------------------------------------------------------------
// Registry loading.

ParamMap ParamsFromJson(const Json& obj, const std::string& context) {
  ParamMap out;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const Json& v = it.value();
    if (v.is_number()) {
      out.SetNumber(it.key(), v.get<double>());
    } else if (v.is_boolean()) {
      out.SetNumber(it.key(), v.get<bool>() ? 1.0 : 0.0);
    } else if (v.is_string()) {
      out.SetString(it.key(), v.get<std::string>());
    } else if (v.is_array()) {
      std::vector<double> list;
      for (const Json& e : v) {
        if (!e.is_number()) Fail(context, "list values must be numbers");
        list.push_back(e.get<double>());
      }
      out.SetList(it.key(), std::move(list));
    } else {
      Fail(context, "unsupported parameter type for key \"" + it.key() + "\"");
    }
  }
  return out;
}

ExperimentSpec ParseExperiment(const Json& j, const std::string& file) {
  static const std::vector<std::string> known = {
      "id",     "title",  "family", "kind",       "tracked",
      "binaural", "intelligibility", "procedure", "search", "model",
      "params", "points", "references", "assumptions"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      Fail(file, "unknown key \"" + it.key() + "\"");
    }
  }

  ExperimentSpec spec;
  spec.id = j.at("id").get<std::string>();
  spec.title = j.at("title").get<std::string>();
  spec.family = j.at("family").get<std::string>();
  const std::string kind = j.value("kind", std::string("threshold"));
  if (kind == "threshold") {
    spec.kind = ExperimentKind::kThreshold;
  } else if (kind == "dprime_grid") {
    spec.kind = ExperimentKind::kDprimeGrid;
  } else if (kind == "srt") {
    spec.kind = ExperimentKind::kSrt;
  } else {
    Fail(file, "unknown kind \"" + kind + "\"");
  }
  spec.tracked_label = j.value("tracked", std::string("threshold"));
  spec.binaural = j.value("binaural", false);
  spec.intelligibility = j.value("intelligibility", false);
  const std::string procedure = j.value("procedure", std::string("bisect"));
  if (procedure == "staircase") {
    spec.staircase_default = true;
  } else if (procedure != "bisect") {
    Fail(file, "unknown procedure \"" + procedure + "\"");
  }

  if (j.contains("search")) {
    const Json& s = j.at("search");
    spec.search.lo = s.at("lo").get<double>();
    spec.search.hi = s.at("hi").get<double>();
    spec.search.resolution = s.at("resolution").get<double>();
  }
  spec.model_overrides_json =
      j.contains("model") ? j.at("model").dump() : std::string("{}");

  Json shared = j.contains("params") ? j.at("params") : Json::object();

  for (const Json& p : j.at("points")) {
    ExperimentPoint point;
    point.condition = p.value("condition", std::string("default"));
    point.abscissa = p.at("abscissa").get<double>();
    Json merged = shared;
    if (p.contains("params")) {
      for (auto it = p.at("params").begin(); it != p.at("params").end();
           ++it) {
        merged[it.key()] = it.value();
      }
    }
    point.params = ParamsFromJson(merged, file + ":params");
    spec.points.push_back(std::move(point));
  }
  if (spec.points.empty()) Fail(file, "no points");

  if (j.contains("references")) {
    for (const Json& r : j.at("references")) {
      ReferencePoint ref;
      ref.condition = r.value("condition", std::string("default"));
      ref.abscissa = r.at("abscissa").get<double>();
      ref.value = r.at("value").get<double>();
      ref.source = r.value("source", std::string());
      spec.references.push_back(std::move(ref));
    }
  }
  if (j.contains("assumptions")) {
    for (const Json& a : j.at("assumptions")) {
      spec.assumptions.push_back(a.get<std::string>());
    }
  }
  return spec;
}

std::vector<ExperimentSpec> LoadRegistry() {
  namespace fs = std::filesystem;
  const std::string dir = DataFile("experiments");
  if (!fs::exists(dir)) {
    throw std::runtime_error("experiment registry directory not found: " +
                             dir);
  }
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<ExperimentSpec> registry;
  for (const std::string& file : files) {
    std::ifstream in(file);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const std::exception& e) {
      Fail(file, e.what());
    }
    registry.push_back(ParseExperiment(j, fs::path(file).filename().string()));
  }
  if (registry.empty()) {
    throw std::runtime_error("experiment registry is empty: " + dir);
  }
  return registry;
}

}  // namespace

// ---------------------------------------------------------------------------
// ParamMap

void ParamMap::SetNumber(const std::string& key, double value) {
  numbers_[key] = value;
}

void ParamMap::SetString(const std::string& key, std::string value) {
  strings_[key] = std::move(value);
}

void ParamMap::SetList(const std::string& key, std::vector<double> values) {
  lists_[key] = std::move(values);
}

bool ParamMap::Has(const std::string& key) const {
  return numbers_.count(key) > 0 || strings_.count(key) > 0 ||
         lists_.count(key) > 0;
}

double ParamMap::Num(const std::string& key) const {
  auto it = numbers_.find(key);
  if (it == numbers_.end()) {
    throw std::runtime_error("missing experiment parameter \"" + key + "\"");
  }
  return it->second;
}

double ParamMap::Num(const std::string& key, double fallback) const {
  auto it = numbers_.find(key);
  return it == numbers_.end() ? fallback : it->second;
}

std::string ParamMap::Str(const std::string& key) const {
  auto it = strings_.find(key);
  if (it == strings_.end()) {
    throw std::runtime_error("missing experiment parameter \"" + key + "\"");
  }
  return it->second;
}

std::string ParamMap::Str(const std::string& key,
                          const std::string& fallback) const {
  auto it = strings_.find(key);
  return it == strings_.end() ? fallback : it->second;
}

const std::vector<double>& ParamMap::List(const std::string& key) const {
  auto it = lists_.find(key);
  if (it == lists_.end()) {
    throw std::runtime_error("missing experiment parameter list \"" + key +
                             "\"");
  }
  return it->second;
}

// ---------------------------------------------------------------------------
// Registry

const std::vector<ExperimentSpec>& ExperimentRegistry() {
  static const std::vector<ExperimentSpec> registry = LoadRegistry();
  return registry;
}

const ExperimentSpec& FindExperiment(const std::string& id) {
  for (const ExperimentSpec& spec : ExperimentRegistry()) {
    if (spec.id == id) return spec;
  }
  throw std::runtime_error("unknown experiment \"" + id + "\"");
}

std::vector<std::string> ExperimentIds() {
  std::vector<std::string> ids;
  for (const ExperimentSpec& spec : ExperimentRegistry()) {
    ids.push_back(spec.id);
  }
  return ids;
}

std::unique_ptr<TrialFactory> MakeTrialFactory(const ExperimentSpec& spec,
                                               const ExperimentPoint& point,
                                               double sample_rate) {
  const std::string& f = spec.family;
  if (f == "tone_in_quiet") {
    return std::make_unique<ToneInQuietFactory>(point, sample_rate);
  }
  if (f == "intensity_jnd") {
    return std::make_unique<IntensityJndFactory>(point, sample_rate);
  }
  if (f == "masked_tone") {
    return std::make_unique<MaskedToneFactory>(point, sample_rate);
  }
  if (f == "am_detection") {
    return std::make_unique<AmDetectionFactory>(point, sample_rate);
  }
  if (f == "am_depth_discrimination") {
    return std::make_unique<AmDepthDiscriminationFactory>(point, sample_rate);
  }
  if (f == "am_masking") {
    return std::make_unique<AmMaskingFactory>(point, sample_rate);
  }
  if (f == "itd_discrimination") {
    return std::make_unique<ItdFactory>(point, sample_rate);
  }
  if (f == "iid_discrimination") {
    return std::make_unique<IidFactory>(point, sample_rate);
  }
  if (f == "binaural_masked_tone") {
    return std::make_unique<BinauralMaskedToneFactory>(point, sample_rate);
  }
  if (f == "phase_transition") {
    return std::make_unique<PhaseTransitionFactory>(point, sample_rate);
  }
  if (f == "time_intensity_trading") {
    return std::make_unique<TradingFactory>(point, sample_rate);
  }
  if (f == "speech_reception") {
    return std::make_unique<SpeechReceptionFactory>(point, sample_rate);
  }
  throw std::runtime_error("unknown experiment family \"" + f + "\"");
}

}  // namespace bmfd
