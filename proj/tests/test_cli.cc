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

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bmfd/stimulus.h"
#include "bmfd/wav.h"
#include "doctest.h"
#include "json.hpp"

namespace bmfd {
namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

std::string ToolPath() {
  const char* path = std::getenv("BMFD_TOOL");
  REQUIRE_MESSAGE(path != nullptr, "BMFD_TOOL must point at the cli binary");
  return path;
}

CommandResult RunTool(const std::string& args) {
  const std::string command = ToolPath() + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CommandResult result;
  char buffer[4096];
  while (std::fgets(buffer, sizeof buffer, pipe) != nullptr) {
    result.output += buffer;
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string Slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::filesystem::path ScratchDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

TEST_CASE("list names every experiment") {
  const CommandResult result = RunTool("list");
  CHECK(result.exit_code == 0);
  for (const char* id :
       {"quiet_thresholds", "intensity_jnd", "tone_duration_in_noise",
        "spectral_masking", "am_detection", "am_depth_discrimination",
        "am_masking", "itd_discrimination", "iid_discrimination",
        "binaural_masked_tone", "n0spi_duration", "phase_transition",
        "time_intensity_trading", "speech_reception"}) {
    CHECK(result.output.find(id) != std::string::npos);
  }
}

TEST_CASE("unknown experiments fail with a clear error") {
  const CommandResult result = RunTool("run tuning_curves");
  CHECK(result.exit_code == 1);
  CHECK(result.output.find("error:") != std::string::npos);
  CHECK(result.output.find("tuning_curves") != std::string::npos);

  const CommandResult missing = RunTool("run");
  CHECK(missing.exit_code != 0);
}

TEST_CASE("config prints the resolved model configuration as json") {
  const CommandResult result = RunTool("config");
  REQUIRE(result.exit_code == 0);
  const auto parsed = nlohmann::json::parse(result.output);
  CHECK(parsed["sample_rate"] == doctest::Approx(48000.0));
  CHECK(parsed["channels"] == "all5");
  CHECK(parsed["bmfd"]["inhibition_weight"] == doctest::Approx(3.0));

  const CommandResult narrowed = RunTool("config --channels lr");
  const auto lr = nlohmann::json::parse(narrowed.output);
  CHECK(lr["channels"] == "lr");

  const CommandResult broken = RunTool("config --channels stereo");
  CHECK(broken.exit_code == 1);
  CHECK(broken.output.find("error:") != std::string::npos);
}

TEST_CASE("response curves are byte identical across runs") {
  const auto dir_a = ScratchDir("bmfd_cli_curves_a");
  const auto dir_b = ScratchDir("bmfd_cli_curves_b");
  CHECK(RunTool("response-curves --out " + dir_a.string()).exit_code == 0);
  CHECK(RunTool("response-curves --out " + dir_b.string()).exit_code == 0);

  const char* names[] = {"ear_weighting.dat", "auditory_filters.dat",
                         "modulation_filters.dat", "binaural_response.dat"};
  for (const char* name : names) {
    REQUIRE(std::filesystem::exists(dir_a / name));
    CHECK(Slurp(dir_a / name) == Slurp(dir_b / name));
    CHECK(Slurp(dir_a / name).size() > 0);
  }
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("analyze reports a detection verdict for wav input") {
  const auto dir = ScratchDir("bmfd_cli_analyze");
  BandNoiseSpec noise;
  noise.low_hz = 200.0;
  noise.high_hz = 2000.0;
  noise.level_db = 65.0;
  noise.duration_s = 0.3;
  const StereoSignal masker =
      ToStereo(MakeBandNoise(noise, 3), InterauralMode::kDiotic);
  ToneSpec tone;
  tone.frequency_hz = 500.0;
  tone.level_db = 70.0;
  tone.duration_s = 0.25;
  StereoSignal both = masker;
  MixInto(&both, ToStereo(MakeTone(tone), InterauralMode::kDiotic));

  const auto target_path = dir / "target.wav";
  const auto reference_path = dir / "reference.wav";
  WriteWav(target_path.string(), both);
  WriteWav(reference_path.string(), masker);

  const CommandResult result =
      RunTool("analyze " + target_path.string() + " --reference " +
              reference_path.string() + " --seed 0");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("d_prime") != std::string::npos);
  CHECK(result.output.find("detected") != std::string::npos);

  // Same invocation, same verdict text.
  const CommandResult again =
      RunTool("analyze " + target_path.string() + " --reference " +
              reference_path.string() + " --seed 0");
  CHECK(again.output == result.output);

  const CommandResult bad = RunTool("analyze " + target_path.string() +
                                    " --reference /nonexistent.wav");
  CHECK(bad.exit_code == 2);  // option validation failure
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace bmfd
