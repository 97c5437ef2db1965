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

// Acceptance battery: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sdp/cli/commands.hpp"
#include "sdp/cli/run_config.hpp"
#include "sdp/core/grid.hpp"
#include "sdp/ensemble/ensemble.hpp"
#include "sdp/estimators/estimators.hpp"
#include "sdp/helmholtz/elliptic.hpp"
#include "sdp/kinetic/kinetic.hpp"
#include "sdp/stepper/stepper.hpp"

using namespace sdp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string lowpass(double amp, std::size_t kmax, std::uint64_t seed) {
  return "random_lowpass(" + fmt(amp) + ", " + std::to_string(kmax) + ", " + std::to_string(seed) + ")";
}

double sup_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l2_sq(const Field& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * f[i];
  return s * f.grid().dx();
}

SolverConfig solver(Scheme scheme, double eps, double dt, double T) {
  SolverConfig cfg;
  cfg.scheme = scheme;
  cfg.epsilon = eps;
  cfg.dt = dt;
  cfg.t_final = T;
  return cfg;
}

Trajectory record_run(const Field& u0, const SolverConfig& cfg, const NoiseModel& noise,
                      const PathOptions& opt = {}) {
  TrajectoryRecorder rec;
  PathRecord r = run_path(u0, cfg, noise, {&rec}, opt);
  return std::move(*r.trajectory);
}

class FinalState : public Observer {
 public:
  void observe(const PathState& s, bool final) override {
    if (final) u = s.u;
  }
  void finish(PathRecord&) override {}
  std::optional<Field> u;
};

Outcome check_elliptic_oracles() {
  const Grid1D g = build_grid(1024, 20.0);
  const Field gauss = Field::from_function(g, [](double x) { return std::exp(-x * x); });
  const double kernel = sup_diff(kernel_pressure_oracle(gauss).value, pressure(gauss));
  double fi = 0.0;
  const auto A = EllipticOperator::a_operator(g);
  const auto P = EllipticOperator::pressure(g);
  for (std::uint64_t s = 1; s <= 100; ++s) {
    const Field v = make_preset(lowpass(1.0, 1 + (s * 13) % 300, s), g);
    for (const auto* op : {&A, &P}) fi = std::max(fi, sup_diff(apply_forward(*op, invert(*op, v)), v) / v.max_abs());
  }
  return {kernel <= 1e-6 && fi <= 1e-10,
          "kernel sup-error " + fmt(kernel) + " (<= 1e-6), forward-inverse " + fmt(fi) + " (<= 1e-10)"};
}

Outcome check_sandwich() {
  const Grid1D g = build_grid(1024, 20.0);
  auto ratio = [](const Field& v) { return s_functional(a_inverse(v)) / l2_sq(v); };
  const double slack = 1e-12;  // rounding in the ratio of two quadratures
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::uint64_t s = 1; s <= 200; ++s) {
    const double r = ratio(make_preset(lowpass(1.0, 1 + (s * 7) % 340, 1000 + s), g));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  auto mode = [&](std::size_t j) {
    const double k = g.wavenumber(j);
    return ratio(Field::from_function(g, [k](double x) { return std::cos(k * x); }));
  };
  const double low_end = mode(1), high_end = mode(g.size() / 3);
  const bool bounded = lo >= 0.25 - slack && hi <= 1.0 + slack && low_end >= 0.25 - slack &&
                       high_end <= 1.0 + slack;
  const bool approached = low_end <= 0.26 && high_end >= 0.99;
  return {bounded && approached, "random in [" + fmt(lo) + ", " + fmt(hi) + "], k->0 " + fmt(low_end) +
                                     ", k->k_max " + fmt(high_end)};
}

Outcome check_peakon_regression() {
  const Grid1D g = build_grid(2048, 20.0);
  const auto cfg = solver(Scheme::spectral, 0.0, 2e-3, 1.0);
  FinalState fin;
  NormObserver norms(2.0, 0.0, 10);
  const PathRecord rec = run_path(make_preset("peakon(1)", g), cfg, NoiseModel::none(), {&fin, &norms});
  const Field exact = Field::from_function(g, [](double x) { return std::exp(-std::abs(x - 1.0)); });
  const double rel = std::sqrt(l2_sq(*fin.u - exact) / l2_sq(exact));
  const auto& s = rec.series.at("s_functional").values;
  double drift = 0.0;
  for (double v : s) drift = std::max(drift, std::abs(v - s.front()) / s.front());
  return {rel <= 0.02 && drift <= 0.01,
          "relative L2 error " + fmt(rel) + " (<= 0.02), S drift " + fmt(drift) + " (<= 0.01)"};
}

Outcome check_moment_identities() {
  const Grid1D g = build_grid(1024, 20.0);
  const CGrid cg(-2.0, 2.0, 128);
  double worst = 0.0, binary = 0.0, mass = 0.0;
  std::size_t inversions = 0;
  for (std::uint64_t s = 1; s <= 50; ++s) {
    const Field u = make_preset(lowpass(1.5, 1 + s % 30, 5000 + s), g);
    const auto f = kinetic_function(u, cg);
    const auto nu = young_measure(u, cg);
    for (double p : {2.0, 4.0}) {
      const auto m = moment_reconstruction(f, p);
      const double bound = p * f.c.dc() * std::pow(u.max_abs(), p - 1.0);
      for (std::size_t i = 0; i < u.size(); ++i)
        worst = std::max(worst, std::abs(m[i] - std::pow(std::abs(u[i]), p)) / bound);
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
      double total = 0.0;
      for (std::size_t j = 0; j < f.c.size(); ++j) {
        binary = std::max(binary, std::abs(f.at(i, j) * (1.0 - f.at(i, j))));
        if (j > 0 && f.at(i, j) > f.at(i, j - 1)) ++inversions;
        total += nu.at(i, j) * nu.c.dc();
      }
      mass = std::max(mass, std::abs(total - 1.0));
    }
  }
  return {worst <= 1.0 && binary == 0.0 && inversions == 0 && mass <= 1e-12,
          "identity error / bound " + fmt(worst) + " (<= 1), binary " + fmt(binary) + ", inversions " +
              std::to_string(inversions) + ", unit-mass error " + fmt(mass) + " (<= 1e-12)"};
}

Outcome check_defect_bookkeeping() {
  EnsembleConfig e;
  e.n_paths = 4;
  e.solver = solver(Scheme::finite_volume, 1e-2, 1e-2, 1.0);
  e.noise = NoiseModel::linear(0.3);
  e.workers = 0;
  e.observers = [](const SolverConfig& s, std::uint64_t) {
    std::vector<std::unique_ptr<Observer>> obs;
    obs.push_back(std::make_unique<NormObserver>(s.q, s.epsilon));
    obs.push_back(std::make_unique<DefectObserver>(s.epsilon, CGrid(s.c_grid), s.q));
    return obs;
  };
  const auto stats = run_ensemble(e);
  double worst = 0.0;
  for (const auto& r : stats.records) {
    const double d = r.scalars.at("dissipation");
    worst = std::max(worst, std::abs(r.scalars.at("defect_mass") - d) / d);
  }
  return {stats.succeeded() == e.n_paths && worst <= 1e-12,
          "max relative mismatch " + fmt(worst) + " over " + std::to_string(stats.succeeded()) + " paths (<= 1e-12)"};
}

double refinement_rms(double a0, std::size_t paths, const std::vector<TensorBump>& phis, double dt,
                      std::uint32_t agg) {
  const Grid1D g = build_grid(1024, 20.0);
  const auto noise = NoiseModel::linear(a0);
  const auto cfg = solver(Scheme::spectral, 1e-2, dt, 1.0);
  std::vector<std::future<double>> parts;
  for (std::uint64_t path = 0; path < paths; ++path) {
    parts.push_back(std::async(std::launch::async, [&, path] {
      const Trajectory traj = record_run(make_preset("peakon(1)", g), cfg, noise,
                                         {.path_id = path, .aggregation = agg, .mollify_eta = 0.1});
      const AuditInput in{&traj, &noise, cfg.epsilon, cfg.dt};
      double s = 0.0;
      for (const auto& r : transport_residuals(in, phis)) s += r.total() * r.total();
      return s;
    }));
  }
  double s = 0.0;
  for (auto& p : parts) s += p.get();
  return std::sqrt(s / double(paths * phis.size()));
}

Outcome check_transport_residual() {
  const auto phis = bump_catalog(1, 20, 1.0);
  const Grid1D g = build_grid(256, 10.0);
  const auto noise = NoiseModel::none();
  double constant = 0.0;
  for (double kappa : {-0.7, 0.0, 0.4, 1.2}) {
    const auto cfg = solver(Scheme::finite_volume, 1e-2, 1e-2, 1.0);
    const Trajectory traj = record_run(Field(g, kappa), cfg, noise);
    const AuditInput in{&traj, &noise, cfg.epsilon, cfg.dt};
    for (const auto& r : transport_residuals(in, phis)) constant = std::max(constant, std::abs(r.total()));
  }
  const double ratio = refinement_rms(0.1, 8, phis, 2e-3, 2) / refinement_rms(0.1, 8, phis, 1e-3, 1);
  const double diagnostic = refinement_rms(0.3, 8, phis, 2e-3, 2) / refinement_rms(0.3, 8, phis, 1e-3, 1);
  return {constant <= 1e-8 && ratio >= 1.5,
          "constant-state residual " + fmt(constant) + " (<= 1e-8), refinement ratio " + fmt(ratio) +
              " (>= 1.5); a0=0.3 ratio " + fmt(diagnostic) + " (not gated)"};
}

Outcome check_entropy_audit_collision() {
  EnsembleConfig e;
  e.n_paths = 16;
  e.n_points = 2048;
  e.solver = solver(Scheme::finite_volume, 1e-3, 2.5e-3, 1.5);
  e.noise = NoiseModel::linear(0.3);
  e.initial = "antipeakon_pair(1, 1)";
  e.workers = 0;
  const auto psis = bump_catalog(1, 20, e.solver.t_final);
  std::vector<std::vector<EntropyTerms>> expected(e.n_paths), realized(e.n_paths);
  e.observers = [](const SolverConfig&, std::uint64_t) {
    std::vector<std::unique_ptr<Observer>> obs;
    obs.push_back(std::make_unique<TrajectoryRecorder>());
    return obs;
  };
  const NoiseModel noise = e.noise;
  const double eps = e.solver.epsilon, dt = e.solver.dt;
  e.analysis = [&, noise, eps, dt](PathRecord& rec) {
    const AuditInput in{&*rec.trajectory, &noise, eps, dt};
    expected.at(rec.path_id) = entropy_audit(in, psis);
    realized.at(rec.path_id) = entropy_audit(in, psis, {.ito = ItoQuadrature::realized});
  };
  const auto stats = run_ensemble(e);
  auto tally = [](const std::vector<std::vector<EntropyTerms>>& all, double& worst) {
    std::size_t failing = 0;
    worst = std::numeric_limits<double>::infinity();
    for (const auto& path : all) {
      for (const auto& t : path) {
        if (t.value() < -1e-4 * t.scale()) ++failing;
        worst = std::min(worst, t.value() / t.scale());
      }
    }
    return failing;
  };
  double worst = 0.0, worst_realized = 0.0;
  const std::size_t failing = tally(expected, worst);
  const std::size_t failing_realized = tally(realized, worst_realized);
  const std::size_t total = e.n_paths * psis.size();
  return {stats.succeeded() == e.n_paths && failing == 0,
          std::to_string(failing) + " of " + std::to_string(total) + " values below -1e-4 scale, min value/scale " +
              fmt(worst) + "; realized-variation Ito sum: " + std::to_string(failing_realized) + " below, min " +
              fmt(worst_realized) + " (not gated)"};
}

Outcome check_epsilon_uniformity() {
  EnsembleConfig e;
  e.n_paths = 64;
  e.solver = solver(Scheme::finite_volume, 1e-3, 1e-2, 1.0);
  e.noise = NoiseModel::linear(0.3);
  e.epsilons = {1e-2, 1e-3, 1e-4};
  e.workers = 0;
  const auto tables = epsilon_sweep(e, std::vector<std::string>{"sup_l2_sq", "sup_l2q_pow"});
  bool pass = true;
  std::string detail;
  for (const auto& t : tables) {
    pass = pass && !t.flagged && t.uniformity <= 2.0;
    detail += (detail.empty() ? "" : ", ") + t.quantity + " max/min " + fmt(t.uniformity);
  }
  return {pass, detail + " (<= 2)"};
}

Outcome check_time_modulus() {
  EnsembleConfig e;
  e.n_paths = 32;
  e.solver = solver(Scheme::finite_volume, 1e-3, 2.5e-3, 1.0);
  e.noise = NoiseModel::linear(0.3);
  e.workers = 0;
  ModulusBox box;
  box.sample_stride = 2;
  const auto t = delta_sweep(e, {0.02, 0.04, 0.08}, box);
  std::string ratios;
  for (double r : t.ratios) ratios += (ratios.empty() ? "" : " ") + fmt(r);
  return {!t.flagged && t.uniformity <= 3.0,
          "value/delta [" + ratios + "], max/min " + fmt(t.uniformity) + " (<= 3), slope " + fmt(t.slope)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome check_reproducibility() {
  const fs::path root = fs::current_path() / "acceptance_out";
  RunConfig cfg;
  cfg.solver = solver(Scheme::finite_volume, 1e-3, 1e-2, 1.0);
  cfg.paths = 16;
  cfg.audit.entropy = true;
  cfg.audit.transport = true;
  cfg.audit.count = 5;
  std::ostringstream sink;
  std::vector<fs::path> dirs;
  for (std::size_t workers : {1, 8}) {
    cfg.workers = workers;
    cfg.out = root / ("workers_" + std::to_string(workers));
    fs::remove_all(cfg.out);
    cmd_run(cfg, {.config_text = "", .command = "acceptance", .out = &sink, .err = &sink});
    dirs.push_back(cfg.out);
  }
  // manifest.json records the worker count and a timestamp by design.
  std::size_t compared = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dirs[0])) {
    if (!entry.is_regular_file() || entry.path().filename() == "manifest.json") continue;
    const fs::path other = dirs[1] / fs::relative(entry.path(), dirs[0]);
    ++compared;
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
  }
  return {compared >= 5 && differing == 0,
          std::to_string(compared) + " files compared, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "elliptic oracles", check_elliptic_oracles},
      {2, "sandwich inequality", check_sandwich},
      {3, "peakon regression", check_peakon_regression},
      {4, "kinetic moment identities", check_moment_identities},
      {5, "defect bookkeeping", check_defect_bookkeeping},
      {6, "transport residual", check_transport_residual},
      {7, "entropy audit", check_entropy_audit_collision},
      {8, "epsilon uniformity", check_epsilon_uniformity},
      {9, "time modulus", check_time_modulus},
      {10, "reproducibility", check_reproducibility},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %-26s %s  %s [%.1fs]\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
