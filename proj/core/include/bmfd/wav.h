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

#ifndef BMFD_WAV_H_
#define BMFD_WAV_H_

#include <string>
#include <vector>

#include "bmfd/signal.h"

namespace bmfd {

enum class WavFormat { kPcm16, kFloat32 };

struct WavData {
  double sample_rate = 0;
  std::vector<std::vector<double>> channels;
};

// Reads 16-bit PCM or 32-bit float RIFF/WAVE files. Other sample formats
// (including 24-bit PCM) raise std::runtime_error with a clear message.
WavData ReadWav(const std::string& path);

// Mono becomes diotic; two channels map to left/right; more is an error.
StereoSignal ToStereo(const WavData& data);

void WriteWav(const std::string& path, const StereoSignal& signal,
              WavFormat format = WavFormat::kFloat32);

}  // namespace bmfd

#endif  // BMFD_WAV_H_
