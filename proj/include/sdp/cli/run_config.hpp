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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sdp/core/config.hpp"
#include "sdp/ensemble/ensemble.hpp"
#include "sdp/estimators/estimators.hpp"
#include "sdp/kinetic/kinetic.hpp"
#include "sdp/noise/noise.hpp"

namespace sdp {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct NoiseSettings {
  std::string family = "linear";  // none | linear | modal
  double a0 = 0.3;
  std::size_t modes = 4;            // modal: a_k = a0 2^-k, k < modes
  std::optional<double> c0;         // modal only; defaults to sum a_k^2
};

struct AuditSettings {
  bool entropy = false;
  bool transport = false;
  std::size_t count = 20;
  std::uint64_t seed = 1;
  double tolerance = 1e-4;  // entropy value >= -tolerance * scale
  double psi_sign = 1.0;    // -1 injects a sign-flipped psi (failure-path testing)
};

/// Every run parameter with defaults materialized.
struct RunConfig {
  SolverConfig solver;
  std::size_t n_points = 1024;
  double half_width = 20.0;
  std::string preset = "peakon(1)";
  NoiseSettings noise;
  std::size_t paths = 8;
  std::size_t workers = 0;
  std::uint32_t aggregation = 1;
  double mollify_eta = 0.0;
  std::uint64_t sample_every_steps = 1;
  std::vector<double> epsilons;
  std::vector<double> deltas{0.02, 0.04, 0.08};
  ModulusBox modulus;
  AuditSettings audit;
  std::filesystem::path out = "sdp_out";
};

/// Parses the flat config text; unknown keys are errors naming the key.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Command-line overrides applied after the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::vector<double> epsilons;  // first one also sets solver.epsilon
  std::optional<std::filesystem::path> out;
  std::optional<std::string> preset;
};

void apply_overrides(RunConfig& cfg, const Overrides& o);

/// Validates and builds the noise model; `check_c0` = false skips the
/// modal C0 check (the verify battery reports it instead).
NoiseModel build_noise(const RunConfig& cfg, bool check_c0 = true);

/// Ensemble configuration for the run (observers not set).
EnsembleConfig ensemble_config(const RunConfig& cfg);

/// Resolved config as the flat key set (round-trips through parse_run_config).
nlohmann::json to_json(const RunConfig& cfg);
std::string to_flat_toml(const RunConfig& cfg);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

struct RunManifest {
  nlohmann::json config;
  std::string artifact_version = kArtifactVersion;
  std::string timestamp;   // UTC, ISO 8601
  std::string input_hash;  // of the config file bytes
  std::string command;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

inline constexpr const char* kManifestName = "manifest.json";

/// Writes dir/manifest.json (replacing any previous one).
void write_manifest(const RunManifest& m, const std::filesystem::path& dir);
/// Throws sdp::Error("no manifest found in <dir>") when absent.
RunManifest read_manifest(const std::filesystem::path& dir);

}  // namespace sdp
