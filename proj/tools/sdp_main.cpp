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

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sdp/cli/commands.hpp"
#include "sdp/cli/run_config.hpp"

namespace {

struct RunFlags {
  std::string config;
  sdp::Overrides overrides;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  std::string out;
  std::string preset;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "flat key = value config file");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--paths", f.paths, "number of paths");
  cmd->add_option("--epsilon", f.overrides.epsilons, "viscosity (repeatable for sweeps)")->take_all();
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--preset", f.preset, "initial data, e.g. \"peakon(1)\"");
}

// Loads the config (defaults when no file is given) and applies the flags.
sdp::RunConfig resolve(CLI::App* cmd, RunFlags& f, std::string& text) {
  sdp::RunConfig cfg;
  if (!f.config.empty()) {
    std::ifstream in(f.config, std::ios::binary);
    if (!in) throw sdp::Error("cannot read config " + f.config);
    std::stringstream s;
    s << in.rdbuf();
    text = s.str();
    cfg = sdp::parse_run_config(text);
  }
  if (cmd->count("--seed")) f.overrides.seed = f.seed;
  if (cmd->count("--paths")) f.overrides.paths = f.paths;
  if (cmd->count("--out")) f.overrides.out = f.out;
  if (cmd->count("--preset")) f.overrides.preset = f.preset;
  sdp::apply_overrides(cfg, f.overrides);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Degasperis-Procesi laboratory"};
  app.require_subcommand(1);

  RunFlags run_flags, verify_flags, sweep_flags;
  auto* run = app.add_subcommand("run", "integrate an ensemble and audit it");
  add_run_flags(run, run_flags);
  auto* verify = app.add_subcommand("verify", "static verification battery");
  add_run_flags(verify, verify_flags);
  auto* sweep = app.add_subcommand("sweep", "epsilon or delta sweep");
  std::string kind;
  sweep->add_option("kind", kind, "epsilon or delta")->required()->check(CLI::IsMember({"epsilon", "delta"}));
  add_run_flags(sweep, sweep_flags);
  auto* report = app.add_subcommand("report", "summarize an output directory");
  std::string report_dir;
  std::vector<std::string> merge;
  report->add_option("dir", report_dir, "output directory")->required();
  report->add_option("--merge", merge, "further run directories joined into an epsilon table")->take_all();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sdp::kExitRuntimeError;
  }

  std::string command;
  for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);

  auto context = [&](std::string text) {
    return sdp::CommandContext{std::move(text), command, &std::cout, &std::cerr};
  };
  if (*run) {
    return sdp::run_guarded([&] {
      std::string text;
      const auto cfg = resolve(run, run_flags, text);
      return sdp::cmd_run(cfg, context(text));
    }, std::cerr);
  }
  if (*verify) {
    return sdp::run_guarded([&] {
      std::string text;
      const auto cfg = resolve(verify, verify_flags, text);
      return sdp::cmd_verify(cfg, context(text));
    }, std::cerr);
  }
  if (*sweep) {
    return sdp::run_guarded([&] {
      std::string text;
      const auto cfg = resolve(sweep, sweep_flags, text);
      return sdp::cmd_sweep(cfg, kind, context(text));
    }, std::cerr);
  }
  return sdp::run_guarded([&] {
    std::vector<std::filesystem::path> dirs{report_dir};
    for (const auto& m : merge) dirs.emplace_back(m);
    return sdp::cmd_report(dirs, std::cout);
  }, std::cerr);
}
