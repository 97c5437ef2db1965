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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "sdp/ensemble/ensemble.hpp"
#include "sdp/kinetic/kinetic.hpp"

using namespace sdp;

namespace {

EnsembleConfig small(std::size_t paths, NoiseModel noise) {
  EnsembleConfig cfg;
  cfg.n_paths = paths;
  cfg.noise = std::move(noise);
  cfg.n_points = 256;
  cfg.half_width = 20.0;
  cfg.solver.epsilon = 1e-2;
  cfg.solver.dt = 1e-2;
  cfg.solver.t_final = 0.2;
  cfg.solver.seed = 77;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sdp_test_ensemble_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("summarize") {
  const auto s = summarize({1.0, 2.0, 3.0, 6.0});
  CHECK(s.count == 4);
  CHECK(s.mean == doctest::Approx(3.0));
  CHECK(s.min == 1.0);
  CHECK(s.max == 6.0);
  CHECK(s.stderr_of_mean == doctest::Approx(std::sqrt(14.0 / 3.0 / 4.0)));
  const auto one = summarize({2.5});
  CHECK_FALSE(one.stderr_defined());
  CHECK(std::isnan(one.stderr_of_mean));
}

TEST_CASE("single path ensemble reproduces the path") {
  auto cfg = small(1, NoiseModel::linear(0.5));
  const auto stats = run_ensemble(cfg);
  REQUIRE(stats.succeeded() == 1);
  NormObserver norms(cfg.solver.q, cfg.solver.epsilon);
  const auto g = build_grid(cfg.n_points, cfg.half_width);
  const auto rec = run_path(make_preset(cfg.initial, g), cfg.solver, cfg.noise, {&norms});
  for (const auto& [name, v] : rec.scalars) {
    CHECK(stats.scalars.at(name).mean == v);
    CHECK_FALSE(stats.scalars.at(name).stderr_defined());
  }
  CHECK_FALSE(stats.warnings.empty());
}

TEST_CASE("deterministic dynamics give identical paths") {
  const auto stats = run_ensemble(small(8, NoiseModel::none()));
  REQUIRE(stats.succeeded() == 8);
  for (const auto& [name, s] : stats.scalars) {
    CHECK(s.stderr_of_mean == 0.0);
    CHECK(s.min == s.max);
  }
}

TEST_CASE("standard error shrinks like 1/sqrt(M)") {
  auto cfg = small(32, NoiseModel::linear(0.5));
  const double se32 = run_ensemble(cfg).scalars.at("sup_l2_sq").stderr_of_mean;
  cfg.n_paths = 128;
  cfg.workers = 4;
  const double se128 = run_ensemble(cfg).scalars.at("sup_l2_sq").stderr_of_mean;
  MESSAGE("se32 " << se32 << " se128 " << se128);
  CHECK(se32 / se128 == doctest::Approx(2.0).epsilon(0.35));
}

TEST_CASE("worker count does not change the output") {
  auto cfg = small(12, NoiseModel::modal_geometric(20.0, 3, 0.6, 1.0));
  cfg.observers = [](const SolverConfig& s, std::uint64_t) {
    std::vector<std::unique_ptr<Observer>> obs;
    obs.push_back(std::make_unique<NormObserver>(s.q, s.epsilon));
    obs.push_back(std::make_unique<DefectObserver>(s.epsilon, CGrid(s.c_grid), s.q));
    return obs;
  };
  const auto a_dir = scratch("w1"), b_dir = scratch("w8");
  cfg.workers = 1;
  write_ensemble(run_ensemble(cfg), a_dir);
  cfg.workers = 8;
  write_ensemble(run_ensemble(cfg), b_dir);
  std::size_t compared = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a_dir)) {
    const auto other = b_dir / entry.path().filename();
    REQUIRE(std::filesystem::exists(other));
    CHECK(slurp(entry.path()) == slurp(other));
    ++compared;
  }
  CHECK(compared >= 4);
  const auto j = nlohmann::json::parse(slurp(a_dir / "summary.json"));
  CHECK(j["n_paths"] == 12);
  CHECK(j["scalars"].contains("defect_mass"));
}

TEST_CASE("failed paths are recorded and excluded") {
  auto cfg = small(3, NoiseModel::none());
  cfg.initial = "gaussian(1e3, 1)";
  const auto stats = run_ensemble(cfg);
  CHECK(stats.succeeded() == 0);
  REQUIRE(stats.failures.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(stats.failures[k].path_id == k);
    CHECK(stats.failures[k].seed == cfg.solver.seed);
    CHECK(stats.failures[k].time == 0.0);
    CHECK(stats.failures[k].message.find("CFL") != std::string::npos);
  }
  const auto dir = scratch("fail");
  write_ensemble(stats, dir);
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(j["failure_count"] == 3);
}

TEST_CASE("config validation") {
  auto cfg = small(0, NoiseModel::none());
  CHECK_THROWS_AS(run_ensemble(cfg), ConfigError);
  cfg = small(2, NoiseModel::linear(0.5));
  cfg.epsilons = {0.0, 1e-2};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.epsilons = {1e-2, 1e-2};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("epsilon sweep") {
  auto cfg = small(4, NoiseModel::linear(0.5));
  cfg.epsilons = {1e-2};
  CHECK_THROWS_WITH(epsilon_sweep(cfg, "sup_l2_sq"), "sweep needs ≥ 2 values");
  cfg.epsilons = {1e-2, 1e-3};
  cfg.solver.dt = 5e-3;
  const auto tables = epsilon_sweep(cfg, std::vector<std::string>{"sup_l2_sq", "sup_l2q_pow"});
  REQUIRE(tables.size() == 2);
  for (const auto& t : tables) {
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].axis == 1e-2);
    CHECK(t.uniformity >= 1.0);
    CHECK(t.uniformity <= 2.0);
  }
  CHECK_THROWS_AS(epsilon_sweep(cfg, "no_such_quantity"), Error);
  const auto dir = scratch("sweep");
  write_sweeps(tables, dir);
  CHECK(std::filesystem::exists(dir / "sweep_sup_l2_sq.csv"));
  CHECK(std::filesystem::exists(dir / "sweep_summary.json"));
}

TEST_CASE("delta sweep") {
  auto cfg = small(4, NoiseModel::linear(0.5));
  cfg.solver.t_final = 0.4;
  cfg.solver.dt = 5e-3;
  SUBCASE("contract") {
    CHECK_THROWS_AS(delta_sweep(cfg, {0.02, 0.04}), ConfigError);
    CHECK_THROWS_AS(delta_sweep(cfg, {0.04, 0.02, 0.08}), ConfigError);
    CHECK_THROWS_AS(delta_sweep(cfg, {0.02, 0.04, 0.2}), ConfigError);
  }
  SUBCASE("frozen dynamics") {
    auto frozen = cfg;
    frozen.noise = NoiseModel::none();
    frozen.initial = "gaussian(0, 1)";
    const auto t = delta_sweep(frozen, {0.02, 0.04, 0.08});
    for (const auto& r : t.rows) CHECK(r.stat.mean == 0.0);
    CHECK(t.flagged);
    CHECK(std::isnan(t.slope));
  }
  SUBCASE("stochastic run") {
    const auto t = delta_sweep(cfg, {0.02, 0.04, 0.08});
    CHECK_FALSE(t.flagged);
    CHECK(std::isfinite(t.slope));
    REQUIRE(t.ratios.size() == 3);
    for (const auto& r : t.rows) CHECK(r.stat.mean > 0.0);
  }
}

TEST_CASE("gronwall rate is reported with the S series") {
  const auto stats = run_ensemble(small(8, NoiseModel::linear(0.5)));
  REQUIRE(stats.series.count("s_functional"));
  const auto& s = stats.series.at("s_functional");
  CHECK(std::isfinite(stats.gronwall_rate));
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    CHECK(s.mean[i] <= std::exp(stats.gronwall_rate * s.times[i]) * s.mean.front() * (1 + 1e-12));
  }
}
