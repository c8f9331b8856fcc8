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

#include "bmfd/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace bmfd {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xfffe;

template <typename T>
T ReadLe(const std::uint8_t* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return value;  // little-endian hosts only, matching the file layout
}

template <typename T>
void AppendLe(std::vector<std::uint8_t>* out, T value) {
  const std::uint8_t* p = reinterpret_cast<const std::uint8_t*>(&value);
  out->insert(out->end(), p, p + sizeof(T));
}

void AppendTag(std::vector<std::uint8_t>* out, const char* tag) {
  out->insert(out->end(), tag, tag + 4);
}

}  // namespace

WavData ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open wav file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error("not a RIFF/WAVE file: " + path);

  std::uint16_t format_code = 0;
  std::uint16_t num_channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
  const std::uint8_t* data = nullptr;
  std::uint32_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* tag = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t chunk_size = ReadLe<std::uint32_t>(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_size > bytes.size())
      throw std::runtime_error("truncated wav chunk in " + path);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw std::runtime_error("bad fmt chunk: " + path);
      format_code = ReadLe<std::uint16_t>(bytes.data() + body);
      num_channels = ReadLe<std::uint16_t>(bytes.data() + body + 2);
      sample_rate = ReadLe<std::uint32_t>(bytes.data() + body + 4);
      bits_per_sample = ReadLe<std::uint16_t>(bytes.data() + body + 14);
      if (format_code == kFormatExtensible && chunk_size >= 40)
        format_code = ReadLe<std::uint16_t>(bytes.data() + body + 24);
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }
  if (num_channels == 0 || data == nullptr)
    throw std::runtime_error("wav file missing fmt or data chunk: " + path);

  const bool pcm16 = format_code == kFormatPcm && bits_per_sample == 16;
  const bool float32 = format_code == kFormatFloat && bits_per_sample == 32;
  if (!pcm16 && !float32)
    throw std::runtime_error(
        "unsupported wav sample format in " + path + ": format code " +
        std::to_string(format_code) + ", " + std::to_string(bits_per_sample) +
        " bits per sample (supported: 16-bit PCM, 32-bit float)");

  const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
  const std::size_t frame_size = bytes_per_sample * num_channels;
  const std::size_t num_frames = data_size / frame_size;

  WavData out;
  out.sample_rate = sample_rate;
  out.channels.assign(num_channels, std::vector<double>(num_frames));
  for (std::size_t i = 0; i < num_frames; ++i) {
    for (std::uint16_t c = 0; c < num_channels; ++c) {
      const std::uint8_t* p = data + i * frame_size + c * bytes_per_sample;
      if (pcm16) {
        out.channels[c][i] = ReadLe<std::int16_t>(p) / 32768.0;
      } else {
        out.channels[c][i] = ReadLe<float>(p);
      }
    }
  }
  return out;
}

StereoSignal ToStereo(const WavData& data) {
  if (data.channels.empty())
    throw std::runtime_error("wav data has no channels");
  if (data.channels.size() > 2)
    throw std::runtime_error("wav data has more than two channels");
  StereoSignal out;
  out.sample_rate = data.sample_rate;
  out.left = data.channels[0];
  out.right = data.channels.size() == 2 ? data.channels[1] : data.channels[0];
  return out;
}

void WriteWav(const std::string& path, const StereoSignal& signal,
              WavFormat format) {
  const std::size_t n = signal.size();
  if (signal.right.size() != n)
    throw std::invalid_argument("WriteWav: channel length mismatch");
  const std::uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const std::uint16_t block_align = 2 * bits / 8;
  const std::uint32_t data_size = static_cast<std::uint32_t>(n * block_align);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  AppendTag(&out, "RIFF");
  AppendLe<std::uint32_t>(&out, 36 + data_size);
  AppendTag(&out, "WAVE");
  AppendTag(&out, "fmt ");
  AppendLe<std::uint32_t>(&out, 16);
  AppendLe<std::uint16_t>(&out,
                          format == WavFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  AppendLe<std::uint16_t>(&out, 2);
  AppendLe<std::uint32_t>(&out, static_cast<std::uint32_t>(signal.sample_rate));
  AppendLe<std::uint32_t>(&out, static_cast<std::uint32_t>(signal.sample_rate) *
                                    block_align);
  AppendLe<std::uint16_t>(&out, block_align);
  AppendLe<std::uint16_t>(&out, bits);
  AppendTag(&out, "data");
  AppendLe<std::uint32_t>(&out, data_size);
  for (std::size_t i = 0; i < n; ++i) {
    for (const double* ch : {&signal.left[i], &signal.right[i]}) {
      if (format == WavFormat::kPcm16) {
        const double clipped = std::clamp(*ch, -1.0, 1.0 - 1.0 / 32768.0);
        AppendLe<std::int16_t>(
            &out, static_cast<std::int16_t>(std::lround(clipped * 32768.0)));
      } else {
        AppendLe<float>(&out, static_cast<float>(*ch));
      }
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write wav file: " + path);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
}

}  // namespace bmfd
