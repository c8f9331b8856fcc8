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

#include "bmfd/model_config.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bmfd/rng.h"
#include "json.hpp"

namespace bmfd {
namespace {

using nlohmann::ordered_json;

// Strict object reader: every present key must be consumed.
class Reader {
 public:
  explicit Reader(const ordered_json& j, std::string context)
      : j_(j), context_(std::move(context)) {
    if (!j.is_object())
      throw std::invalid_argument("config: " + context_ +
                                  " must be a JSON object");
  }

  double Number(const char* key, double fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    if (!j_[key].is_number())
      throw std::invalid_argument(Where(key) + " must be a number");
    return j_[key].get<double>();
  }

  int Int(const char* key, int fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    if (!j_[key].is_number_integer())
      throw std::invalid_argument(Where(key) + " must be an integer");
    return j_[key].get<int>();
  }

  bool Bool(const char* key, bool fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    if (!j_[key].is_boolean())
      throw std::invalid_argument(Where(key) + " must be a boolean");
    return j_[key].get<bool>();
  }

  std::string String(const char* key, const std::string& fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    if (!j_[key].is_string())
      throw std::invalid_argument(Where(key) + " must be a string");
    return j_[key].get<std::string>();
  }

  std::vector<double> NumberArray(const char* key,
                                  const std::vector<double>& fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    if (!j_[key].is_array())
      throw std::invalid_argument(Where(key) + " must be an array");
    std::vector<double> out;
    for (const auto& v : j_[key]) {
      if (!v.is_number())
        throw std::invalid_argument(Where(key) + " must hold numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }

  const ordered_json* Object(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) return nullptr;
    if (!j_[key].is_object())
      throw std::invalid_argument(Where(key) + " must be an object");
    return &j_[key];
  }

  void Finish() {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key))
        throw std::invalid_argument("config: unknown key '" + key + "' in " +
                                    context_);
    }
  }

 private:
  std::string Where(const char* key) const {
    return "config: " + context_ + "." + key;
  }

  const ordered_json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

ModelConfig Parse(const ordered_json& j) {
  ModelConfig c;
  Reader top(j, "root");
  c.sample_rate = top.Number("sample_rate", c.sample_rate);
  c.channel_low_hz = top.Number("channel_low_hz", c.channel_low_hz);
  c.channel_high_hz = top.Number("channel_high_hz", c.channel_high_hz);
  c.ear_filter_taps = top.Int("ear_filter_taps", c.ear_filter_taps);
  c.subset = ParseChannelSubset(top.String("channels", ToString(c.subset)));
  c.intelligibility_mode =
      top.Bool("intelligibility_mode", c.intelligibility_mode);

  if (const ordered_json* obj = top.Object("adaptation")) {
    Reader r(*obj, "adaptation");
    c.adaptation.cutoff_hz = r.Number("cutoff_hz", c.adaptation.cutoff_hz);
    c.adaptation.divisor_floor =
        r.Number("divisor_floor", c.adaptation.divisor_floor);
    r.Finish();
  }
  if (const ordered_json* obj = top.Object("bmfd")) {
    Reader r(*obj, "bmfd");
    c.bmfd.inhibition_weight =
        r.Number("inhibition_weight", c.bmfd.inhibition_weight);
    c.bmfd.contra_delay_cycles =
        r.Number("contra_delay_cycles", c.bmfd.contra_delay_cycles);
    c.bmfd.gain_jitter_sd = r.Number("gain_jitter_sd", c.bmfd.gain_jitter_sd);
    c.bmfd.delay_jitter_sd_s =
        r.Number("delay_jitter_sd_s", c.bmfd.delay_jitter_sd_s);
    c.bmfd.jitter_enabled = r.Bool("jitter_enabled", c.bmfd.jitter_enabled);
    r.Finish();
  }
  if (const ordered_json* obj = top.Object("features")) {
    Reader r(*obj, "features");
    FeatureParams& f = c.features;
    f.envelope_cutoff_hz = r.Number("envelope_cutoff_hz", f.envelope_cutoff_hz);
    f.envelope_scale = r.Number("envelope_scale", f.envelope_scale);
    f.decimation_factor = r.Int("decimation_factor", f.decimation_factor);
    f.decimation_cutoff_hz =
        r.Number("decimation_cutoff_hz", f.decimation_cutoff_hz);
    f.decimation_order = r.Int("decimation_order", f.decimation_order);
    f.dc_window_long_s = r.Number("dc_window_long_s", f.dc_window_long_s);
    f.dc_window_short_s = r.Number("dc_window_short_s", f.dc_window_short_s);
    f.dc_floor = r.Number("dc_floor", f.dc_floor);
    f.dc_contrast_floor_db =
        r.Number("dc_contrast_floor_db", f.dc_contrast_floor_db);
    f.mod_bandpass_centers_hz =
        r.NumberArray("mod_bandpass_centers_hz", f.mod_bandpass_centers_hz);
    f.mod_lowpass_cutoff_hz =
        r.Number("mod_lowpass_cutoff_hz", f.mod_lowpass_cutoff_hz);
    f.mod_bandpass_q = r.Number("mod_bandpass_q", f.mod_bandpass_q);
    f.mod_population_ratio =
        r.Number("mod_population_ratio", f.mod_population_ratio);
    f.env_floor = r.Number("env_floor", f.env_floor);
    f.level_weight_knee_db =
        r.Number("level_weight_knee_db", f.level_weight_knee_db);
    r.Finish();
  }
  if (const ordered_json* obj = top.Object("decision")) {
    Reader r(*obj, "decision");
    c.decision.env_weight = r.Number("env_weight", c.decision.env_weight);
    c.decision.dc_weight = r.Number("dc_weight", c.decision.dc_weight);
    c.decision.criterion_snr =
        r.Number("criterion_snr", c.decision.criterion_snr);
    r.Finish();
  }
  if (const ordered_json* obj = top.Object("observer")) {
    Reader r(*obj, "observer");
    c.observer.k = r.Number("k", c.observer.k);
    c.observer.q = r.Number("q", c.observer.q);
    c.observer.num_alternatives =
        r.Int("num_alternatives", c.observer.num_alternatives);
    c.observer.sigma_s = r.Number("sigma_s", c.observer.sigma_s);
    r.Finish();
  }
  top.Finish();
  return c;
}

}  // namespace

ModelConfig ModelConfig::Normalized() const {
  ModelConfig c = *this;
  if (c.intelligibility_mode) {
    c.channel_high_hz = std::min(c.channel_high_hz, 8000.0);
    c.features.use_band_importance = true;
  }
  return c;
}

ModelConfig ModelConfig::FromJsonText(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") +
                                e.what());
  }
  return Parse(j);
}

ModelConfig ModelConfig::FromJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return FromJsonText(buffer.str());
}

std::string ModelConfig::ToJsonText() const {
  ordered_json j;
  j["sample_rate"] = sample_rate;
  j["channel_low_hz"] = channel_low_hz;
  j["channel_high_hz"] = channel_high_hz;
  j["ear_filter_taps"] = ear_filter_taps;
  j["channels"] = ToString(subset);
  j["intelligibility_mode"] = intelligibility_mode;
  j["adaptation"] = {{"cutoff_hz", adaptation.cutoff_hz},
                     {"divisor_floor", adaptation.divisor_floor}};
  j["bmfd"] = {{"inhibition_weight", bmfd.inhibition_weight},
               {"contra_delay_cycles", bmfd.contra_delay_cycles},
               {"gain_jitter_sd", bmfd.gain_jitter_sd},
               {"delay_jitter_sd_s", bmfd.delay_jitter_sd_s},
               {"jitter_enabled", bmfd.jitter_enabled}};
  j["features"] = {{"envelope_cutoff_hz", features.envelope_cutoff_hz},
                   {"envelope_scale", features.envelope_scale},
                   {"decimation_factor", features.decimation_factor},
                   {"decimation_cutoff_hz", features.decimation_cutoff_hz},
                   {"decimation_order", features.decimation_order},
                   {"dc_window_long_s", features.dc_window_long_s},
                   {"dc_window_short_s", features.dc_window_short_s},
                   {"dc_floor", features.dc_floor},
                   {"dc_contrast_floor_db", features.dc_contrast_floor_db},
                   {"mod_bandpass_centers_hz", features.mod_bandpass_centers_hz},
                   {"mod_lowpass_cutoff_hz", features.mod_lowpass_cutoff_hz},
                   {"mod_bandpass_q", features.mod_bandpass_q},
                   {"mod_population_ratio", features.mod_population_ratio},
                   {"env_floor", features.env_floor},
                   {"level_weight_knee_db", features.level_weight_knee_db}};
  j["decision"] = {{"env_weight", decision.env_weight},
                   {"dc_weight", decision.dc_weight},
                   {"criterion_snr", decision.criterion_snr}};
  j["observer"] = {{"k", observer.k},
                   {"q", observer.q},
                   {"num_alternatives", observer.num_alternatives},
                   {"sigma_s", observer.sigma_s}};
  return j.dump(2);
}

std::uint64_t ModelConfig::Hash() const { return HashTag(ToJsonText()); }

}  // namespace bmfd
