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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "sdp/cli/commands.hpp"
#include "sdp/cli/flat_toml.hpp"
#include "sdp/cli/run_config.hpp"
#include "sdp/core/error.hpp"

using namespace sdp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("sdp_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string small_config(const fs::path& out) {
  return "# smoke run\n"
         "scheme = \"finite_volume\"\n"
         "preset = \"peakon(1.0)\"\n"
         "noise_family = \"none\"\n"
         "epsilon = 1e-2\n"
         "dt_seconds = 0.01\n"
         "t_final_seconds = 0.2\n"
         "n_points = 256\n"
         "paths = 2\n"
         "audit_entropy = true\n"
         "audit_count = 1\n"
         "out = \"" + out.string() + "\"\n";
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

// Runs the command-line binary named by SDP_CLI.
Result run_cli(const std::string& args, const fs::path& dir) {
  const char* cli = std::getenv("SDP_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "SDP_CLI must point at the sdp binary");
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + cli + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

}  // namespace

TEST_CASE("flat config parser") {
  const auto m = parse_flat_toml(
      "a = 1.5  # trailing comment\n"
      "b = \"x # not a comment\"\n"
      "c = true\n"
      "\n"
      "d = [1e-2, 1e-3, 1_000]\n"
      "e = []\n");
  CHECK(std::get<double>(m.at("a").value) == 1.5);
  CHECK(std::get<std::string>(m.at("b").value) == "x # not a comment");
  CHECK(std::get<bool>(m.at("c").value));
  CHECK(std::get<std::vector<double>>(m.at("d").value) == std::vector<double>{1e-2, 1e-3, 1000});
  CHECK(std::get<std::vector<double>>(m.at("e").value).empty());
  CHECK(m.at("d").line == 5);
  CHECK_THROWS_AS(parse_flat_toml("[table]\n"), ConfigError);
  CHECK_THROWS_AS(parse_flat_toml("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_flat_toml("a = \"open\n"), ConfigError);
  CHECK_THROWS_AS(parse_flat_toml("a = 1x\n"), ConfigError);
  CHECK_THROWS_AS(parse_flat_toml("just text\n"), ConfigError);
}

TEST_CASE("unknown and mistyped keys are hard errors") {
  try {
    parse_run_config("epsilno = 1e-3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "epsilno");
    CHECK(std::string(e.what()).find("epsilno") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_run_config("paths = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("scheme = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("noise_family = \"cubic\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("noise_c0 = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("dt_seconds = 0.3\nt_final_seconds = 1\n"), ConfigError);
}

TEST_CASE("resolved config round-trips through the flat format") {
  RunConfig cfg = parse_run_config("epsilon = 1e-4\nepsilons = [1e-2, 1e-3]\nnoise_family = \"modal\"\n");
  const std::string text = to_flat_toml(cfg);
  const RunConfig again = parse_run_config(text);
  CHECK(to_json(again) == to_json(cfg));
  CHECK(to_json(cfg)["epsilon"] == 1e-4);
}

TEST_CASE("overrides") {
  RunConfig cfg;
  Overrides o;
  o.seed = 5;
  o.paths = 3;
  o.epsilons = {1e-2, 1e-3};
  o.preset = "gaussian(1, 2)";
  apply_overrides(cfg, o);
  CHECK(cfg.solver.seed == 5);
  CHECK(cfg.paths == 3);
  CHECK(cfg.solver.epsilon == 1e-2);
  CHECK(cfg.epsilons.size() == 2);
  CHECK(cfg.preset == "gaussian(1, 2)");
}

TEST_CASE("hash and manifest") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  const auto dir = scratch("manifest");
  RunManifest m;
  m.config = to_json(RunConfig{});
  m.input_hash = fnv1a_hex("x");
  m.command = "sdp run";
  write_manifest(m, dir);
  const RunManifest back = read_manifest(dir);
  CHECK(back.config == m.config);
  CHECK(back.input_hash == m.input_hash);
  CHECK_FALSE(back.timestamp.empty());
  CHECK(back.artifact_version == kArtifactVersion);
  CHECK_THROWS_WITH(read_manifest(scratch("empty")), doctest::Contains("no manifest found"));
}

TEST_CASE("static verification passes on the defaults") {
  const Report r = static_verification(RunConfig{});
  for (const auto& l : r.lines) CHECK_MESSAGE(l.pass, l.name << " measured " << l.measured);
  REQUIRE(r.find("pressure_kernel_oracle"));
  CHECK(r.find("pressure_kernel_oracle")->measured <= 1e-6);
  CHECK(r.find("growth_bound"));
}

TEST_CASE("static verification flags C0 below the modal sum") {
  RunConfig cfg = parse_run_config("noise_family = \"modal\"\nnoise_a0 = 0.5\nnoise_c0 = 0.1\n");
  const Report r = static_verification(cfg);
  REQUIRE(r.find("growth_bound"));
  CHECK_FALSE(r.find("growth_bound")->pass);
  // The run path rejects the same config outright.
  CHECK_THROWS_AS(build_noise(cfg), ConfigError);
}

TEST_CASE("binary: run smoke, determinism and report") {
  const auto dir = scratch("run");
  const auto out = dir / "out";
  write(dir / "cfg.toml", small_config(out));
  const auto r = run_cli("run --config \"" + (dir / "cfg.toml").string() + "\"", dir);
  CHECK_MESSAGE(r.code == 0, r.out << r.err);
  for (const char* f : {"manifest.json", "series.csv", "series_mean.csv", "summary.json", "audit.csv",
                        "scalar_sup_l2_sq.csv", "snapshots/path_000000.snap"}) {
    CHECK_MESSAGE(fs::exists(out / f), f);
  }
  const std::string first = slurp(out / "series.csv");
  const auto again = run_cli("run --config \"" + (dir / "cfg.toml").string() + "\"", dir);
  CHECK(again.code == 0);
  CHECK(slurp(out / "series.csv") == first);

  const auto rep = run_cli("report \"" + out.string() + "\"", dir);
  CHECK_MESSAGE(rep.code == 0, rep.out << rep.err);
  for (int k = 1; k <= 10; ++k) CHECK(rep.out.find("criterion " + std::string(k < 10 ? " " : "") + std::to_string(k)) != std::string::npos);
  CHECK(fs::exists(out / "report.csv"));
  CHECK(fs::exists(out / "summary.txt"));

  // A second epsilon joined on quantity names.
  const auto out2 = dir / "out2";
  const auto r2 = run_cli("run --config \"" + (dir / "cfg.toml").string() + "\" --epsilon 1e-3 --out \"" +
                              out2.string() + "\"",
                          dir);
  CHECK(r2.code == 0);
  const auto merged = run_cli("report \"" + out.string() + "\" --merge \"" + out2.string() + "\"", dir);
  CHECK_MESSAGE(merged.code == 0, merged.out << merged.err);
  CHECK(fs::exists(out / "eps_sweep.csv"));
  CHECK(merged.out.find("epsilon table") != std::string::npos);
}

TEST_CASE("binary: unknown key exits 1 naming the key") {
  const auto dir = scratch("typo");
  write(dir / "cfg.toml", small_config(dir / "out") + "epsilno = 1e-3\n");
  const auto r = run_cli("run --config \"" + (dir / "cfg.toml").string() + "\"", dir);
  CHECK(r.code == 1);
  CHECK(r.err.find("epsilno") != std::string::npos);
}

TEST_CASE("binary: sign-flipped psi makes the entropy audit fail") {
  const auto dir = scratch("flip");
  write(dir / "cfg.toml", small_config(dir / "out") + "audit_psi_sign = -1\n");
  const auto r = run_cli("run --config \"" + (dir / "cfg.toml").string() + "\"", dir);
  CHECK_MESSAGE(r.code == 2, r.out << r.err);
  CHECK(r.out.find("path 0 psi 0") != std::string::npos);
  CHECK(r.out.find("path 1 psi 0") != std::string::npos);
  CHECK(r.out.find("psi 1") == std::string::npos);
}

TEST_CASE("binary: verify and report contracts") {
  const auto dir = scratch("verify");
  const auto ok = run_cli("verify", dir);
  CHECK_MESSAGE(ok.code == 0, ok.out << ok.err);
  CHECK(ok.out.find("pressure_kernel_oracle") != std::string::npos);

  write(dir / "bad.toml", "noise_family = \"modal\"\nnoise_a0 = 0.5\nnoise_c0 = 0.1\n");
  const auto bad = run_cli("verify --config \"" + (dir / "bad.toml").string() + "\"", dir);
  CHECK(bad.code == 2);
  CHECK(bad.out.find("growth_bound") != std::string::npos);

  const auto none = run_cli("report \"" + (dir / "nothing").string() + "\"", dir);
  CHECK(none.code == 1);
  CHECK(none.err.find("no manifest found") != std::string::npos);

  const auto sweep = run_cli("sweep epsilon --epsilon 1e-2", dir);
  CHECK(sweep.code == 1);
  CHECK(sweep.err.find("sweep needs") != std::string::npos);
}

TEST_CASE("binary: epsilon and delta sweeps") {
  const auto dir = scratch("sweep");
  write(dir / "cfg.toml",
        "noise_family = \"linear\"\nnoise_a0 = 0.5\nn_points = 256\npaths = 2\n"
        "dt_seconds = 0.005\nt_final_seconds = 0.4\nepsilon = 1e-2\n"
        "out = \"" + (dir / "out").string() + "\"\n");
  const auto eps = run_cli("sweep epsilon --config \"" + (dir / "cfg.toml").string() +
                               "\" --epsilon 1e-2 --epsilon 1e-3",
                           dir);
  CHECK_MESSAGE(eps.code == 0, eps.out << eps.err);
  CHECK(fs::exists(dir / "out" / "sweep_sup_l2_sq.csv"));
  CHECK(eps.out.find("uniformity") != std::string::npos);
  const auto del = run_cli("sweep delta --config \"" + (dir / "cfg.toml").string() + "\"", dir);
  CHECK_MESSAGE(del.code == 0, del.out << del.err);
  CHECK(del.out.find("slope") != std::string::npos);
}
