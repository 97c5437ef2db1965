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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sdp/core/config.hpp"
#include "sdp/estimators/estimators.hpp"
#include "sdp/noise/noise.hpp"
#include "sdp/stepper/stepper.hpp"

namespace sdp {

/// Builds the observers for one path. Called on the worker thread.
using ObserverFactory =
    std::function<std::vector<std::unique_ptr<Observer>>(const SolverConfig&, std::uint64_t path_id)>;

/// Runs on the worker after a path completes, with the finished record
/// (trajectory included if an observer recorded one). May add scalars.
using PathAnalysis = std::function<void(PathRecord&)>;

struct EnsembleConfig {
  std::size_t n_paths = 1;
  SolverConfig solver;  // solver.seed is the base seed; path k uses lineage (seed, k)
  NoiseModel noise = NoiseModel::none();
  std::size_t n_points = 1024;
  double half_width = 20.0;
  std::string initial = "peakon(1)";
  std::uint32_t aggregation = 1;
  double mollify_eta = 0.0;
  std::vector<double> epsilons;  // sweep axis
  ObserverFactory observers;     // empty: one NormObserver per path
  PathAnalysis analysis;
  std::size_t workers = 1;         // 0: hardware concurrency
  bool keep_trajectories = false;  // otherwise dropped after analysis
  std::filesystem::path output_dir;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Mean, standard error, min and max over the successful paths.
struct SampleStat {
  std::size_t count = 0;
  double mean = 0.0;
  double stderr_of_mean = 0.0;  // NaN when count < 2
  double min = 0.0;
  double max = 0.0;

  bool stderr_defined() const noexcept { return count >= 2; }
};

/// Summarizes values in the given order (the order fixes the rounding).
SampleStat summarize(const std::vector<double>& values);

struct SeriesStat {
  std::string name;
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> stderr_of_mean;
};

struct PathFailure {
  std::uint64_t path_id = 0;
  std::uint64_t seed = 0;
  double time = 0.0;  // NaN when the failure carries no time
  std::string message;
};

struct EnsembleStats {
  std::size_t n_paths = 0;
  double epsilon = 0.0;
  std::map<std::string, SampleStat> scalars;
  std::map<std::string, SeriesStat> series;
  std::vector<PathFailure> failures;
  std::vector<PathRecord> records;  // successful paths, in path order
  std::vector<std::string> warnings;
  /// Smallest C with mean S(t) <= e^{Ct} S(0) on the sampled times, when
  /// the s_functional series was observed; NaN otherwise.
  double gronwall_rate = 0.0;

  std::size_t succeeded() const noexcept { return records.size(); }
};

/// Runs the paths on a worker pool. Results are merged in path order, so
/// the output does not depend on the worker count.
EnsembleStats run_ensemble(const EnsembleConfig& cfg);

struct SweepRow {
  double axis = 0.0;
  SampleStat stat;
};

struct SweepTable {
  std::string quantity;
  std::string axis;  // "epsilon" or "delta"
  std::vector<SweepRow> rows;
  double uniformity = 0.0;  // max/min of the means (eps) or of mean/delta (delta)
  double slope = 0.0;       // log-log least squares (delta sweep), NaN if undefined
  bool flagged = false;     // uniformity or slope undefined (zero or non-positive means)
  std::vector<double> ratios;  // mean / delta per row (delta sweep)
};

/// One ensemble per epsilon in cfg.epsilons; tables of the named scalar
/// quantities with the max/min uniformity factor.
std::vector<SweepTable> epsilon_sweep(const EnsembleConfig& cfg,
                                      const std::vector<std::string>& quantities);
SweepTable epsilon_sweep(const EnsembleConfig& cfg, const std::string& quantity);

/// Ensemble mean of the time modulus of (u - c)^+ per delta. The solver dt
/// times box.sample_stride is the sampling cadence.
SweepTable delta_sweep(const EnsembleConfig& cfg, const std::vector<double>& deltas,
                       const ModulusBox& box = {});

/// One CSV per scalar quantity (path_id, seed, value), the estimator
/// series (path_id, time, name, value), ensemble series means, and
/// summary.json.
void write_ensemble(const EnsembleStats& stats, const std::filesystem::path& dir);

/// sweep_<quantity>.csv per table plus sweep_summary.json.
void write_sweeps(const std::vector<SweepTable>& tables, const std::filesystem::path& dir);

}  // namespace sdp
