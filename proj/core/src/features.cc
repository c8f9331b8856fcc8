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

#include "bmfd/features.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bmfd/periphery.h"
#include "bmfd/tables.h"

namespace bmfd {
namespace {

bool AllZero(std::span<const double> x) {
  for (double v : x)
    if (v != 0.0) return false;
  return true;
}

double FrameMean(std::span<const double> x, const Frame& f) {
  double sum = 0.0;
  for (std::size_t i = f.begin; i < f.end; ++i) sum += x[i];
  return sum / static_cast<double>(f.size());
}

double FrameVariance(std::span<const double> x, const Frame& f) {
  const double mean = FrameMean(x, f);
  double sum = 0.0;
  for (std::size_t i = f.begin; i < f.end; ++i) {
    const double d = x[i] - mean;
    sum += d * d;
  }
  return sum / static_cast<double>(f.size());
}

}  // namespace

std::vector<Biquad> ButterworthLowpass(int order, double cutoff_hz,
                                       double sample_rate) {
  if (order < 1 || order > 8)
    throw std::invalid_argument("ButterworthLowpass: unsupported order");
  if (cutoff_hz <= 0 || cutoff_hz >= sample_rate / 2.0)
    throw std::invalid_argument("ButterworthLowpass: bad cutoff");
  const double warped =
      std::tan(std::numbers::pi * cutoff_hz / sample_rate);

  std::vector<Biquad> sections;
  // Analog poles at warped * exp(j pi (2k + order - 1) / (2 order)) for the
  // left-half-plane half; bilinear transform z = (1 + s) / (1 - s).
  for (int k = 0; k < order / 2; ++k) {
    const double angle =
        std::numbers::pi * (2.0 * k + order + 1.0) / (2.0 * order);
    const std::complex<double> s = warped * std::polar(1.0, angle);
    const std::complex<double> zp = (1.0 + s) / (1.0 - s);
    Biquad q;
    q.a1 = -2.0 * zp.real();
    q.a2 = std::norm(zp);
    const double k_dc = (1.0 + q.a1 + q.a2) / 4.0;
    q.b0 = k_dc;
    q.b1 = 2.0 * k_dc;
    q.b2 = k_dc;
    sections.push_back(q);
  }
  if (order % 2 == 1) {
    const double s = -warped;
    const double zp = (1.0 + s) / (1.0 - s);
    Biquad q;
    q.a1 = -zp;
    const double k_dc = (1.0 + q.a1) / 2.0;
    q.b0 = k_dc;
    q.b1 = k_dc;
    sections.push_back(q);
  }
  return sections;
}

Biquad BandpassBiquad(double center_hz, double q_factor, double sample_rate) {
  if (center_hz <= 0 || center_hz >= sample_rate / 2.0)
    throw std::invalid_argument("BandpassBiquad: bad center");
  const double w0 = 2.0 * std::numbers::pi * center_hz / sample_rate;
  const double alpha = std::sin(w0) / (2.0 * q_factor);
  const double a0 = 1.0 + alpha;
  Biquad q;
  q.b0 = alpha / a0;
  q.b1 = 0.0;
  q.b2 = -alpha / a0;
  q.a1 = -2.0 * std::cos(w0) / a0;
  q.a2 = (1.0 - alpha) / a0;
  return q;
}

void RunBiquadCascade(std::span<const Biquad> sections,
                      std::span<const double> in, std::span<double> out) {
  if (in.size() != out.size())
    throw std::invalid_argument("RunBiquadCascade: size mismatch");
  if (sections.empty()) {
    std::copy(in.begin(), in.end(), out.begin());
    return;
  }
  std::vector<double> s1(sections.size(), 0.0);
  std::vector<double> s2(sections.size(), 0.0);
  for (std::size_t i = 0; i < in.size(); ++i) {
    double x = in[i];
    for (std::size_t s = 0; s < sections.size(); ++s) {
      const Biquad& q = sections[s];
      const double y = q.b0 * x + s1[s];
      s1[s] = q.b1 * x - q.a1 * y + s2[s];
      s2[s] = q.b2 * x - q.a2 * y;
      x = y;
    }
    out[i] = x;
  }
}

std::complex<double> CascadeResponse(std::span<const Biquad> sections,
                                     double frequency_hz, double sample_rate) {
  const double w = 2.0 * std::numbers::pi * frequency_hz / sample_rate;
  const std::complex<double> z1 = std::polar(1.0, -w);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h = 1.0;
  for (const Biquad& q : sections) {
    h *= (q.b0 + q.b1 * z1 + q.b2 * z2) / (1.0 + q.a1 * z1 + q.a2 * z2);
  }
  return h;
}

ModulationFilterbank::ModulationFilterbank(const FeatureParams& params,
                                           double sample_rate)
    : sample_rate_(sample_rate) {
  bands_.push_back(
      ButterworthLowpass(3, params.mod_lowpass_cutoff_hz, sample_rate));
  rates_.push_back(params.mod_lowpass_cutoff_hz);
  for (double f : params.mod_bandpass_centers_hz) {
    bands_.push_back({BandpassBiquad(f, params.mod_bandpass_q, sample_rate)});
    rates_.push_back(f);
  }
}

void ModulationFilterbank::Filter(int band, std::span<const double> in,
                                  std::span<double> out) const {
  RunBiquadCascade(bands_[static_cast<std::size_t>(band)], in, out);
}

double ModulationFilterbank::GainDb(int band, double frequency_hz) const {
  const double mag =
      std::abs(CascadeResponse(bands_[static_cast<std::size_t>(band)],
                               frequency_hz, sample_rate_));
  return 20.0 * std::log10(std::max(mag, 1e-300));
}

ChannelBank ExtractEnvelope(const ChannelBank& bank,
                            const FeatureParams& params) {
  if (params.decimation_factor < 1)
    throw std::invalid_argument("ExtractEnvelope: bad decimation factor");
  const std::size_t n = bank.num_samples();
  const std::size_t out_n =
      (n + static_cast<std::size_t>(params.decimation_factor) - 1) /
      static_cast<std::size_t>(params.decimation_factor);
  const double out_rate =
      bank.sample_rate() / static_cast<double>(params.decimation_factor);
  ChannelBank out(bank.center_frequencies(), out_n, out_rate);

  const auto anti_alias = ButterworthLowpass(
      params.decimation_order, params.decimation_cutoff_hz, bank.sample_rate());
  std::vector<double> smooth(n);
  std::vector<double> filtered(n);
  for (int p = 0; p < bank.num_channels(); ++p) {
    const auto in = bank.channel(p);
    auto dst = out.channel(p);
    if (AllZero(in)) continue;  // output stays zero
    OnePoleLowpass lp(params.envelope_cutoff_hz, bank.sample_rate());
    for (std::size_t i = 0; i < n; ++i)
      smooth[i] = params.envelope_scale * lp.Step(in[i]);
    RunBiquadCascade(anti_alias, smooth, filtered);
    for (std::size_t i = 0; i < out_n; ++i)
      dst[i] = filtered[i * static_cast<std::size_t>(params.decimation_factor)];
  }
  return out;
}

std::vector<Frame> SegmentFrames(std::size_t n, std::size_t nominal) {
  if (n == 0) throw std::invalid_argument("SegmentFrames: empty block");
  if (nominal == 0) throw std::invalid_argument("SegmentFrames: zero frame");
  std::vector<Frame> frames;
  if (n < nominal) {
    frames.push_back({0, n});
    return frames;
  }
  const std::size_t whole = n / nominal;
  for (std::size_t k = 0; k < whole; ++k)
    frames.push_back({k * nominal, (k + 1) * nominal});
  const std::size_t tail = n - whole * nominal;
  if (tail == 0) return frames;
  if (2 * tail >= nominal) {
    frames.push_back({whole * nominal, n});
  } else {
    frames.back().end = n;
  }
  return frames;
}

double DcWindowSeconds(const FeatureParams& params, double center_hz,
                       double lowest_hz, double highest_hz) {
  if (center_hz <= 0 || lowest_hz <= 0 || highest_hz <= 0)
    throw std::invalid_argument("DcWindowSeconds: bad frequency");
  if (highest_hz <= lowest_hz) return params.dc_window_long_s;
  const double t = std::clamp((std::log(center_hz) - std::log(lowest_hz)) /
                                  (std::log(highest_hz) - std::log(lowest_hz)),
                              0.0, 1.0);
  return params.dc_window_long_s *
         std::pow(params.dc_window_short_s / params.dc_window_long_s, t);
}

DcGrid ComputeDcGrid(const ChannelBank& envelope, const FeatureParams& params) {
  const int num_channels = envelope.num_channels();
  const double lowest = envelope.center_frequency(0);
  const double highest = envelope.center_frequency(num_channels - 1);
  DcGrid grid;
  grid.power.resize(num_channels);
  grid.level_db.resize(num_channels);
  for (int p = 0; p < num_channels; ++p) {
    const double window_s =
        DcWindowSeconds(params, envelope.center_frequency(p), lowest, highest);
    const std::size_t nominal = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::lround(window_s * envelope.sample_rate())));
    const auto frames = SegmentFrames(envelope.num_samples(), nominal);
    const auto x = envelope.channel(p);
    for (const Frame& f : frames) {
      const double mean = FrameMean(x, f);
      const double level =
          mean > 0 ? 20.0 * std::log10(mean) : kSilenceLevelDb;
      double power;
      if (level < params.audibility_floor_db) {
        power = params.dc_floor;
      } else {
        power = std::max(0.5 * mean * mean, params.dc_floor);
      }
      grid.power[p].push_back(power);
      grid.level_db[p].push_back(level);
    }
  }
  return grid;
}

EnvGrid ComputeEnvGrid(const ChannelBank& envelope,
                       const ModulationFilterbank& mod_bank,
                       const FeatureParams& params) {
  const int num_channels = envelope.num_channels();
  const std::size_t n = envelope.num_samples();
  EnvGrid grid;
  grid.power.resize(num_channels);
  grid.level_db.resize(num_channels);
  grid.bands_per_channel.resize(num_channels);

  std::vector<double> filtered(n);
  for (int p = 0; p < num_channels; ++p) {
    const double fc = envelope.center_frequency(p);
    int bands = 0;
    while (bands < mod_bank.num_bands() &&
           mod_bank.band_rate_hz(bands) <= params.mod_population_ratio * fc)
      ++bands;
    grid.bands_per_channel[p] = bands;
    grid.power[p].resize(bands);
    grid.level_db[p].resize(bands);

    const auto x = envelope.channel(p);
    const bool silent = AllZero(x);
    for (int m = 0; m < bands; ++m) {
      const std::size_t nominal = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::lround(
                 envelope.sample_rate() / mod_bank.band_rate_hz(m))));
      const auto frames = SegmentFrames(n, nominal);
      auto& power_row = grid.power[p][m];
      auto& level_row = grid.level_db[p][m];
      power_row.reserve(frames.size());
      level_row.reserve(frames.size());
      if (silent) {
        power_row.assign(frames.size(), params.env_floor);
        level_row.assign(frames.size(), kSilenceLevelDb);
        continue;
      }
      mod_bank.Filter(m, x, filtered);
      for (const Frame& f : frames) {
        const double mean = FrameMean(x, f);
        const double level =
            mean > 0 ? 20.0 * std::log10(mean) : kSilenceLevelDb;
        double power;
        if (level < params.audibility_floor_db) {
          power = params.env_floor;
        } else {
          power = std::max(FrameVariance(filtered, f) / (mean * mean),
                           params.env_floor);
        }
        power_row.push_back(power);
        level_row.push_back(level);
      }
    }
  }
  return grid;
}

BandImportance::BandImportance() {
  const Table table = LoadTwoColumnTable(DataFile("band_importance.txt"));
  x_ = table.x;
  w_ = table.y;
  const double max_w = *std::max_element(w_.begin(), w_.end());
  if (max_w <= 0) throw std::runtime_error("band importance: bad weights");
  for (double& w : w_) w /= max_w;
}

const BandImportance& BandImportance::Shared() {
  static const BandImportance instance;
  return instance;
}

double BandImportance::Weight(double frequency_hz) const {
  Table t;
  t.x = x_;
  t.y = w_;
  return InterpLogX(t, frequency_hz);
}

SnrGrids ComputeSnr(const DcGrid& target_dc, const EnvGrid& target_env,
                    const DcGrid& reference_dc, const EnvGrid& reference_env,
                    const FeatureParams& params,
                    const std::vector<double>& centers) {
  const std::size_t num_channels = target_dc.power.size();
  if (reference_dc.power.size() != num_channels ||
      target_env.power.size() != num_channels ||
      reference_env.power.size() != num_channels ||
      centers.size() != num_channels)
    throw std::invalid_argument("ComputeSnr: shape mismatch");

  SnrGrids grids;
  grids.dc.resize(num_channels);
  grids.env.resize(num_channels);
  // Power-path denominators. A target frame that turns audible against a
  // reference frame gated to the silence value is a detection event: it
  // scores the ratio of target power to the just-audible frame power, capped
  // at one unit of contrast. Audible reference frames divide by at least the
  // contrast-floor power, which bounds how finely two supra-threshold powers
  // can be distinguished.
  const double audible_power =
      0.5 * std::pow(10.0, params.audibility_floor_db / 10.0);
  const double contrast_power =
      0.5 * std::pow(10.0, params.dc_contrast_floor_db / 10.0);
  for (std::size_t p = 0; p < num_channels; ++p) {
    const double importance =
        params.use_band_importance ? BandImportance::Shared().Weight(centers[p])
                                   : 1.0;
    const auto& t_dc = target_dc.power[p];
    const auto& r_dc = reference_dc.power[p];
    if (t_dc.size() != r_dc.size())
      throw std::invalid_argument("ComputeSnr: frame mismatch (power path)");
    grids.dc[p].resize(t_dc.size());
    for (std::size_t i = 0; i < t_dc.size(); ++i) {
      double snr;
      if (r_dc[i] <= params.dc_floor) {
        snr = std::min(std::max(t_dc[i] - r_dc[i], 0.0) / audible_power, 1.0);
      } else {
        snr = std::max(t_dc[i] - r_dc[i], 0.0) /
              std::max(r_dc[i], contrast_power);
      }
      grids.dc[p][i] = importance * snr;
    }

    const std::size_t bands = target_env.power[p].size();
    if (reference_env.power[p].size() != bands)
      throw std::invalid_argument("ComputeSnr: band mismatch");
    grids.env[p].resize(bands);
    for (std::size_t m = 0; m < bands; ++m) {
      const auto& t_env = target_env.power[p][m];
      const auto& r_env = reference_env.power[p][m];
      if (t_env.size() != r_env.size())
        throw std::invalid_argument("ComputeSnr: frame mismatch (env path)");
      grids.env[p][m].resize(t_env.size());
      for (std::size_t i = 0; i < t_env.size(); ++i) {
        double snr = std::max(t_env[i] - r_env[i], 0.0) / r_env[i];
        const double level = target_env.level_db[p][m][i];
        if (level < params.level_weight_knee_db) {
          snr *= std::pow(10.0, (level - params.level_weight_knee_db) / 20.0);
        }
        grids.env[p][m][i] = snr;
      }
    }
  }
  return grids;
}

}  // namespace bmfd
