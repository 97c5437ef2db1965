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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdp/core/config.hpp"
#include "sdp/core/error.hpp"
#include "sdp/core/field.hpp"
#include "sdp/core/series.hpp"
#include "sdp/core/snapshot.hpp"
#include "sdp/helmholtz/spectral.hpp"
#include "sdp/noise/noise.hpp"

namespace sdp {

/// Raised when the requested dt exceeds the stability bound.
class CflError : public Error {
 public:
  CflError(double requested, double admissible, double t);
  double requested() const noexcept { return requested_; }
  double admissible() const noexcept { return admissible_; }
  double time() const noexcept { return t_; }

 private:
  double requested_;
  double admissible_;
  double t_;
};

/// Raised when a non-finite value appears; carries the time of failure.
class BlowupError : public Error {
 public:
  explicit BlowupError(double t);
  double time() const noexcept { return t_; }

 private:
  double t_;
};

struct PathState {
  double t = 0.0;
  Field u;
  Field p;     // exact pressure of u (no dealiasing)
  Field dpdx;  // derivative of p
  WienerPath wiener;
  std::uint64_t step_count = 0;

  Snapshot snapshot() const;
};

/// State at t = 0 with p refreshed from u0.
PathState make_state(Field u0, const SolverConfig& cfg, const NoiseModel& noise,
                     SeedLineage lineage, std::uint32_t aggregation = 1);

/// Normalized Gaussian smoothing at scale eta (taps out to 8 eta, folded
/// periodically). eta = 0, or eta too small to reach a neighbour, is the
/// identity.
Field mollify_initial(const Field& u0, double eta);

/// Reusable integrator for one (config, noise, grid) triple.
class Stepper {
 public:
  Stepper(const SolverConfig& cfg, const NoiseModel& noise, const Grid1D& grid);

  /// Largest stable dt for the current u.
  double admissible_dt(const Field& u) const;

  /// One Euler-Maruyama step in place: drift, then sigma(u_n) dW, then p.
  void advance(PathState& state) const;

  /// Deterministic part of one step applied to u.
  Field drift(const Field& u, const Field& dpdx) const;

  const SolverConfig& config() const noexcept { return cfg_; }
  const NoiseModel& noise() const noexcept { return noise_; }
  const Grid1D& grid() const noexcept { return grid_; }

 private:
  Field drift_finite_volume(const Field& u, const Field& dpdx) const;
  Field drift_spectral(const Field& u) const;

  SolverConfig cfg_;
  NoiseModel noise_;
  Grid1D grid_;
  std::vector<std::vector<double>> profiles_;
  std::vector<double> wavenumber_;
  std::vector<double> nonlinear_symbol_;  // (1/2 + (3/2)/(1+k^2)) k, 0 above cutoff
};

/// Free-function form of one step; returns the advanced state.
PathState step(const PathState& state, const SolverConfig& cfg,
               const NoiseModel& noise);

/// Initial data by name: "peakon(c)", "antipeakon_pair(c, x0)",
/// "gaussian(amp, width)", "random_lowpass(amp, kmax, seed)".
Field make_preset(const std::string& spec, const Grid1D& grid);

struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Field> u;
  std::vector<std::vector<double>> increments;  // increments[n] drives u[n] -> u[n+1]
};

struct PathRecord {
  std::uint64_t path_id = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double dt = 0.0;
  double t_final = 0.0;
  std::uint64_t steps = 0;
  double wall_seconds = 0.0;
  std::optional<Trajectory> trajectory;
  std::map<std::string, EstimateSeries> series;
  std::map<std::string, double> scalars;
  std::vector<std::string> warnings;
};

/// Hooks run_path calls while integrating one path.
class Observer {
 public:
  virtual ~Observer() = default;
  /// Sample every `cadence()` steps (always at t = 0 and at T).
  virtual std::uint64_t cadence() const { return 1; }
  virtual void observe(const PathState& state, bool final) = 0;
  /// Called after every step with the state before it and the increments used.
  virtual void observe_step(const PathState& /*before*/, const PathState& /*after*/) {}
  virtual void finish(PathRecord& record) = 0;
};

/// Stores u at every step plus every Wiener increment.
class TrajectoryRecorder : public Observer {
 public:
  void observe(const PathState& state, bool final) override;
  void observe_step(const PathState& before, const PathState& after) override;
  void finish(PathRecord& record) override;

 private:
  Trajectory traj_;
};

struct PathOptions {
  std::uint64_t path_id = 0;
  std::uint32_t aggregation = 1;  // fine normals per increment
  double mollify_eta = 0.0;
};

/// Integrates one path to cfg.t_final. Step errors propagate with their
/// time stamp.
PathRecord run_path(const Field& u0, const SolverConfig& cfg,
                    const NoiseModel& noise,
                    const std::vector<Observer*>& observers,
                    const PathOptions& options = {});

}  // namespace sdp
