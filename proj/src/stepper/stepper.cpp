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

#include "sdp/stepper/stepper.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "sdp/helmholtz/elliptic.hpp"

namespace sdp {
namespace {

std::string time_tag(double t) {
  std::ostringstream os;
  os.precision(10);
  os << t;
  return os.str();
}

}  // namespace

CflError::CflError(double requested, double admissible, double t)
    : Error("CFL violation at t=" + time_tag(t) + ": dt=" + time_tag(requested) +
            " exceeds admissible dt=" + time_tag(admissible)),
      requested_(requested),
      admissible_(admissible),
      t_(t) {}

BlowupError::BlowupError(double t)
    : Error("solution blow-up at t=" + time_tag(t)), t_(t) {}

Snapshot PathState::snapshot() const {
  return {t, u, p, wiener.accumulated(), wiener.cursor()};
}

PathState make_state(Field u0, const SolverConfig& cfg, const NoiseModel& noise,
                     SeedLineage lineage, std::uint32_t aggregation) {
  require_finite(u0, "initial data");
  auto pp = pressure_with_gradient(u0);
  return PathState{0.0,    std::move(u0),
                   std::move(pp.p), std::move(pp.dpdx),
                   WienerPath(lineage, noise.modes(), cfg.dt, aggregation), 0};
}

Field mollify_initial(const Field& u0, double eta) {
  if (!(eta >= 0.0)) throw Error("mollify_initial: eta must be >= 0");
  const Grid1D& g = u0.grid();
  const auto reach = static_cast<std::ptrdiff_t>(std::floor(8.0 * eta / g.dx()));
  if (reach == 0) return u0;
  std::vector<double> w(2 * reach + 1);
  double total = 0.0;
  for (std::ptrdiff_t m = -reach; m <= reach; ++m) {
    const double s = m * g.dx() / eta;
    w[m + reach] = std::exp(-0.5 * s * s);
    total += w[m + reach];
  }
  for (double& v : w) v /= total;
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  Field out(g);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::ptrdiff_t m = -reach; m <= reach; ++m) {
      s += w[m + reach] * u0[static_cast<std::size_t>(((i + m) % n + n) % n)];
    }
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

// ---------------------------------------------------------------------------

Stepper::Stepper(const SolverConfig& cfg, const NoiseModel& noise, const Grid1D& grid)
    : cfg_(cfg), noise_(noise), grid_(grid), profiles_(profile_table(noise, grid)) {
  const std::size_t modes = grid.size() / 2 + 1;
  const std::size_t cutoff = two_thirds_cutoff(grid.size());
  wavenumber_.resize(modes);
  nonlinear_symbol_.resize(modes);
  for (std::size_t j = 0; j < modes; ++j) {
    const double k = grid.wavenumber(j);
    wavenumber_[j] = k;
    nonlinear_symbol_[j] = j > cutoff ? 0.0 : (0.5 + 1.5 / (1.0 + k * k)) * k;
  }
}

double Stepper::admissible_dt(const Field& u) const {
  const double dx = grid_.dx();
  double dt = cfg_.cfl_safety * dx / std::max(u.max_abs(), 1e-12);
  if (cfg_.scheme == Scheme::finite_volume && cfg_.epsilon > 0.0) {
    dt = std::min(dt, 0.4 * dx * dx / cfg_.epsilon);
  }
  return dt;
}

Field Stepper::drift_finite_volume(const Field& u, const Field& dpdx) const {
  const std::size_t n = u.size();
  const double dt = cfg_.dt;
  const double dx = grid_.dx();
  const double lam = dt / dx;
  const double mu = cfg_.epsilon * dt / (dx * dx);
  // Rusanov flux at interface i+1/2.
  std::vector<double> flux(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = u[i];
    const double b = u[(i + 1) % n];
    const double speed = std::max(std::abs(a), std::abs(b));
    flux[i] = 0.25 * (a * a + b * b) - 0.5 * speed * (b - a);
  }
  Field out(grid_);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t l = (i + n - 1) % n;
    const std::size_t r = (i + 1) % n;
    out[i] = u[i] - lam * (flux[i] - flux[l]) - dt * dpdx[i] +
             mu * (u[r] - 2.0 * u[i] + u[l]);
  }
  return out;
}

Field Stepper::drift_spectral(const Field& u) const {
  // Integrating-factor SSP-RK3 on u_t = N(u) - eps k^2 u, with N the
  // dealiased advection plus pressure gradient.
  auto& fft = spectral_workspace(grid_.size());
  const std::size_t modes = fft.modes();
  const std::size_t cutoff = two_thirds_cutoff(grid_.size());
  const double dt = cfg_.dt;
  const double eps = cfg_.epsilon;

  std::vector<Complex> u0(modes), stage(modes), rhs(modes);
  std::vector<double> phys(grid_.size());
  fft.forward(u.values(), u0);
  for (std::size_t j = cutoff + 1; j < modes; ++j) u0[j] = 0.0;

  // rhs <- N(v) in spectral space.
  auto nonlinear = [&](const std::vector<Complex>& v) {
    fft.inverse(v, phys);
    for (double& x : phys) x *= x;
    fft.forward(phys, rhs);
    for (std::size_t j = 0; j < modes; ++j) {
      rhs[j] *= Complex(0.0, -nonlinear_symbol_[j]);
    }
  };
  auto factor = [&](std::size_t j, double h) {
    const double k = wavenumber_[j];
    return std::exp(-eps * k * k * h);
  };

  nonlinear(u0);
  for (std::size_t j = 0; j < modes; ++j) {
    stage[j] = factor(j, dt) * (u0[j] + dt * rhs[j]);
  }
  nonlinear(stage);
  for (std::size_t j = 0; j < modes; ++j) {
    stage[j] = 0.75 * factor(j, 0.5 * dt) * u0[j] +
               0.25 * factor(j, -0.5 * dt) * (stage[j] + dt * rhs[j]);
  }
  nonlinear(stage);
  for (std::size_t j = 0; j < modes; ++j) {
    stage[j] = (1.0 / 3.0) * factor(j, dt) * u0[j] +
               (2.0 / 3.0) * factor(j, 0.5 * dt) * (stage[j] + dt * rhs[j]);
  }
  for (std::size_t j = cutoff + 1; j < modes; ++j) stage[j] = 0.0;
  Field out(grid_);
  fft.inverse(stage, out.values());
  return out;
}

Field Stepper::drift(const Field& u, const Field& dpdx) const {
  return cfg_.scheme == Scheme::finite_volume ? drift_finite_volume(u, dpdx)
                                              : drift_spectral(u);
}

void Stepper::advance(PathState& s) const {
  const double admissible = admissible_dt(s.u);
  if (cfg_.dt > admissible * (1.0 + 1e-12)) throw CflError(cfg_.dt, admissible, s.t);

  Field next = drift(s.u, s.dpdx);
  if (noise_.modes() > 0) {
    const auto& dw = s.wiener.next_increments();
    for (std::size_t k = 0; k < noise_.modes(); ++k) {
      const double a = noise_.amplitude(k) * dw[k];
      if (a == 0.0) continue;
      const auto& g = profiles_[k];
      for (std::size_t i = 0; i < next.size(); ++i) next[i] += a * g[i] * s.u[i];
    }
  }
  ++s.step_count;
  s.t = static_cast<double>(s.step_count) * cfg_.dt;
  if (!next.all_finite()) throw BlowupError(s.t);
  auto pp = pressure_with_gradient(next);
  s.u = std::move(next);
  s.p = std::move(pp.p);
  s.dpdx = std::move(pp.dpdx);
}

PathState step(const PathState& state, const SolverConfig& cfg, const NoiseModel& noise) {
  PathState next = state;
  Stepper(cfg, noise, state.u.grid()).advance(next);
  return next;
}

// ---------------------------------------------------------------------------

void TrajectoryRecorder::observe(const PathState& state, bool /*final*/) {
  if (!traj_.times.empty() && traj_.times.back() == state.t) return;
  traj_.dt = state.wiener.dt();
  traj_.times.push_back(state.t);
  traj_.u.push_back(state.u);
}

void TrajectoryRecorder::observe_step(const PathState& /*before*/, const PathState& after) {
  traj_.increments.push_back(after.wiener.last_increments());
}

void TrajectoryRecorder::finish(PathRecord& record) { record.trajectory = std::move(traj_); }

PathRecord run_path(const Field& u0, const SolverConfig& cfg, const NoiseModel& noise,
                    const std::vector<Observer*>& observers, const PathOptions& options) {
  const bool empty_horizon = cfg.t_final == 0.0;
  SolverConfig checked = cfg;
  if (empty_horizon) checked.t_final = cfg.dt;
  checked.validate();
  const std::uint64_t steps = empty_horizon ? 0 : cfg.step_count();

  const auto start = std::chrono::steady_clock::now();
  Field init = options.mollify_eta > 0.0 ? mollify_initial(u0, options.mollify_eta) : u0;
  PathState state = make_state(std::move(init), cfg, noise,
                               {cfg.seed, options.path_id}, options.aggregation);
  const Stepper stepper(cfg, noise, u0.grid());

  for (Observer* o : observers) o->observe(state, steps == 0);
  while (state.step_count < steps) {
    if (observers.empty()) {
      stepper.advance(state);
      continue;
    }
    const PathState before = state;
    stepper.advance(state);
    const bool final = state.step_count == steps;
    for (Observer* o : observers) {
      o->observe_step(before, state);
      const std::uint64_t cadence = std::max<std::uint64_t>(1, o->cadence());
      if (final || state.step_count % cadence == 0) o->observe(state, final);
    }
  }

  PathRecord record;
  record.path_id = options.path_id;
  record.seed = cfg.seed;
  record.epsilon = cfg.epsilon;
  record.dt = cfg.dt;
  record.t_final = cfg.t_final;
  record.steps = steps;
  for (Observer* o : observers) o->finish(record);
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

}  // namespace sdp
