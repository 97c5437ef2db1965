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

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "sdp/cli/run_config.hpp"
#include "sdp/core/report.hpp"
#include "sdp/stepper/stepper.hpp"

namespace sdp {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitCheckFailed = 2;

/// Writes the final state of each path to dir/path_<id>.snap.
class SnapshotWriter : public Observer {
 public:
  explicit SnapshotWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}
  void observe(const PathState& state, bool final) override;
  void finish(PathRecord&) override {}

 private:
  std::filesystem::path dir_;
};

/// Static battery without time stepping: noise assumptions, elliptic
/// oracles, sandwich inequality and kinetic moment identities.
Report static_verification(const RunConfig& cfg);

/// Everything a subcommand needs besides the parsed config.
struct CommandContext {
  std::string config_text;  // raw bytes of the config file (for the hash)
  std::string command;      // recorded in the manifest
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

int cmd_run(const RunConfig& cfg, const CommandContext& ctx);
int cmd_verify(const RunConfig& cfg, const CommandContext& ctx);
/// `kind` is "epsilon" or "delta".
int cmd_sweep(const RunConfig& cfg, const std::string& kind, const CommandContext& ctx);
/// Reads dirs[0] (and merges the scalar summaries of the others into an
/// epsilon table); writes report.csv and summary.txt into dirs[0].
int cmd_report(const std::vector<std::filesystem::path>& dirs, std::ostream& out);

/// Runs `body`, mapping exceptions to exit code 1 with a message on err.
int run_guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace sdp
