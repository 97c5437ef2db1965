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

#include "sdp/ensemble/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "json.hpp"
#include "sdp/core/csv.hpp"
#include "sdp/core/error.hpp"
#include "sdp/core/grid.hpp"

namespace sdp {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

void EnsembleConfig::validate() const {
  if (n_paths < 1) throw ConfigError("n_paths", "n_paths must be >= 1");
  if (aggregation < 1) throw ConfigError("aggregation", "aggregation must be >= 1");
  if (!(mollify_eta >= 0.0)) throw ConfigError("mollify_eta", "mollify_eta must be >= 0");
  std::set<double> seen;
  for (double e : epsilons) {
    if (!(e >= 0.0) || !std::isfinite(e))
      throw ConfigError("epsilon", "sweep epsilon values must be finite and >= 0");
    if (e == 0.0 && noise.modes() > 0)
      throw ConfigError("epsilon", "epsilon = 0 is allowed only without noise");
    if (!seen.insert(e).second) throw ConfigError("epsilon", "sweep epsilon values must be distinct");
  }
  solver.validate();
  (void)build_grid(n_points, half_width);
}

SampleStat summarize(const std::vector<double>& values) {
  SampleStat s;
  s.count = values.size();
  if (values.empty()) {
    s.mean = s.min = s.max = s.stderr_of_mean = kNaN;
    return s;
  }
  // Shifting by the first value keeps identical samples exactly at zero spread.
  const double shift = values.front();
  double sum = 0.0;
  s.min = s.max = shift;
  for (double v : values) {
    sum += v - shift;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = shift + sum / double(values.size());
  if (values.size() < 2) {
    s.stderr_of_mean = kNaN;
    return s;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stderr_of_mean = std::sqrt(ss / double(values.size() - 1) / double(values.size()));
  return s;
}

namespace {

struct Outcome {
  std::optional<PathRecord> record;
  std::optional<PathFailure> failure;
};

Outcome run_one(const EnsembleConfig& cfg, const Field& u0, std::uint64_t path) {
  Outcome out;
  std::vector<std::unique_ptr<Observer>> owned;
  if (cfg.observers) {
    owned = cfg.observers(cfg.solver, path);
  } else {
    owned.push_back(std::make_unique<NormObserver>(cfg.solver.q, cfg.solver.epsilon));
  }
  std::vector<Observer*> raw;
  for (auto& o : owned) raw.push_back(o.get());
  PathFailure failure{path, cfg.solver.seed, kNaN, {}};
  try {
    PathRecord rec = run_path(u0, cfg.solver, cfg.noise, raw,
                              {.path_id = path, .aggregation = cfg.aggregation,
                               .mollify_eta = cfg.mollify_eta});
    if (cfg.analysis) cfg.analysis(rec);
    if (!cfg.keep_trajectories) rec.trajectory.reset();
    out.record = std::move(rec);
    return out;
  } catch (const BlowupError& e) {
    failure.time = e.time();
    failure.message = e.what();
  } catch (const CflError& e) {
    failure.time = e.time();
    failure.message = e.what();
  } catch (const ConfigError&) {
    throw;  // configuration problems are not path failures
  } catch (const Error& e) {
    failure.message = e.what();
  }
  out.failure = std::move(failure);
  return out;
}

void aggregate_series(EnsembleStats& stats) {
  if (stats.records.empty()) return;
  for (const auto& [name, first] : stats.records.front().series) {
    std::size_t len = first.values.size();
    bool aligned = true;
    for (const auto& r : stats.records) {
      auto it = r.series.find(name);
      if (it == r.series.end()) {
        aligned = false;
        break;
      }
      len = std::min(len, it->second.values.size());
    }
    if (!aligned) {
      stats.warnings.push_back("series " + name + " missing on some paths; not aggregated");
      continue;
    }
    SeriesStat out;
    out.name = name;
    out.times.assign(first.times.begin(), first.times.begin() + std::ptrdiff_t(len));
    std::vector<double> column(stats.records.size());
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t p = 0; p < stats.records.size(); ++p)
        column[p] = stats.records[p].series.at(name).values[t];
      const SampleStat s = summarize(column);
      out.mean.push_back(s.mean);
      out.stderr_of_mean.push_back(s.stderr_of_mean);
    }
    stats.series.emplace(name, std::move(out));
  }
}

double gronwall_rate(const EnsembleStats& stats) {
  auto it = stats.series.find("s_functional");
  if (it == stats.series.end() || it->second.mean.empty()) return kNaN;
  const SeriesStat& s = it->second;
  const double s0 = s.mean.front();
  if (!(s0 > 0.0)) return kNaN;
  double rate = 0.0;
  for (std::size_t i = 1; i < s.times.size(); ++i) {
    if (s.times[i] <= 0.0) continue;
    rate = std::max(rate, std::log(s.mean[i] / s0) / s.times[i]);
  }
  return rate;
}

}  // namespace

EnsembleStats run_ensemble(const EnsembleConfig& cfg) {
  cfg.validate();
  const Grid1D grid = build_grid(cfg.n_points, cfg.half_width);
  const Field u0 = make_preset(cfg.initial, grid);

  std::vector<Outcome> outcomes(cfg.n_paths);
  std::size_t workers = cfg.workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : cfg.workers;
  workers = std::min(workers, cfg.n_paths);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cfg.n_paths) return;
      try {
        outcomes[k] = run_one(cfg, u0, k);
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next = cfg.n_paths;
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (fatal) std::rethrow_exception(fatal);

  EnsembleStats stats;
  stats.n_paths = cfg.n_paths;
  stats.epsilon = cfg.solver.epsilon;
  for (auto& o : outcomes) {
    if (o.record) {
      for (const auto& w : o.record->warnings)
        stats.warnings.push_back("path " + std::to_string(o.record->path_id) + ": " + w);
      stats.records.push_back(std::move(*o.record));
    } else if (o.failure) {
      stats.failures.push_back(std::move(*o.failure));
    }
  }
  std::set<std::string> names;
  for (const auto& r : stats.records)
    for (const auto& [name, _] : r.scalars) names.insert(name);
  for (const auto& name : names) {
    std::vector<double> values;
    for (const auto& r : stats.records) {
      auto it = r.scalars.find(name);
      if (it != r.scalars.end()) values.push_back(it->second);
    }
    stats.scalars.emplace(name, summarize(values));
  }
  if (stats.n_paths == 1) stats.warnings.push_back("single path: standard errors undefined");
  aggregate_series(stats);
  stats.gronwall_rate = gronwall_rate(stats);
  return stats;
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {

double max_min_ratio(const std::vector<double>& v, bool& flagged) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      flagged = true;
      return kNaN;
    }
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi / lo;
}

}  // namespace

std::vector<SweepTable> epsilon_sweep(const EnsembleConfig& cfg,
                                      const std::vector<std::string>& quantities) {
  if (cfg.epsilons.size() < 2) throw ConfigError("epsilon", "sweep needs ≥ 2 values");
  cfg.validate();
  std::vector<SweepTable> tables(quantities.size());
  for (std::size_t q = 0; q < quantities.size(); ++q) {
    tables[q].quantity = quantities[q];
    tables[q].axis = "epsilon";
  }
  for (double eps : cfg.epsilons) {
    EnsembleConfig one = cfg;
    one.solver.epsilon = eps;
    const EnsembleStats stats = run_ensemble(one);
    for (std::size_t q = 0; q < quantities.size(); ++q) {
      auto it = stats.scalars.find(quantities[q]);
      if (it == stats.scalars.end())
        throw Error("sweep quantity '" + quantities[q] + "' was not produced by the observers");
      tables[q].rows.push_back({eps, it->second});
    }
  }
  for (auto& t : tables) {
    std::vector<double> means;
    for (const auto& r : t.rows) means.push_back(r.stat.mean);
    t.uniformity = max_min_ratio(means, t.flagged);
    t.slope = kNaN;
  }
  return tables;
}

SweepTable epsilon_sweep(const EnsembleConfig& cfg, const std::string& quantity) {
  return epsilon_sweep(cfg, std::vector<std::string>{quantity}).front();
}

SweepTable delta_sweep(const EnsembleConfig& cfg, const std::vector<double>& deltas,
                       const ModulusBox& box) {
  if (deltas.size() < 3) throw ConfigError("deltas", "delta sweep needs >= 3 values");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0) || deltas[i] > cfg.solver.t_final / 4.0 * (1.0 + 1e-12))
      throw ConfigError("deltas", "deltas must lie in (0, T/4]");
    if (i > 0 && !(deltas[i] > deltas[i - 1]))
      throw ConfigError("deltas", "deltas must be strictly increasing");
  }
  EnsembleConfig run = cfg;
  ObserverFactory base = cfg.observers;
  run.observers = [base](const SolverConfig& solver, std::uint64_t path) {
    std::vector<std::unique_ptr<Observer>> obs;
    if (base) obs = base(solver, path);
    obs.push_back(std::make_unique<TrajectoryRecorder>());
    return obs;
  };
  PathAnalysis extra = cfg.analysis;
  run.analysis = [extra, deltas, box](PathRecord& rec) {
    if (extra) extra(rec);
    const auto values = time_modulus(*rec.trajectory, box, deltas);
    for (std::size_t i = 0; i < values.size(); ++i)
      rec.scalars["time_modulus_" + std::to_string(i)] = values[i];
  };
  const EnsembleStats stats = run_ensemble(run);

  SweepTable t;
  t.quantity = "time_modulus";
  t.axis = "delta";
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    auto it = stats.scalars.find("time_modulus_" + std::to_string(i));
    SampleStat s = it == stats.scalars.end() ? summarize({}) : it->second;
    t.rows.push_back({deltas[i], s});
    t.ratios.push_back(s.mean / deltas[i]);
    if (s.mean > 0.0) {
      lx.push_back(std::log(deltas[i]));
      ly.push_back(std::log(s.mean));
    }
  }
  t.uniformity = max_min_ratio(t.ratios, t.flagged);
  if (lx.size() == deltas.size()) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
    mx /= double(lx.size());
    my /= double(ly.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    t.slope = sxy / sxx;
  } else {
    t.slope = kNaN;
    t.flagged = true;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Output

namespace {

nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

nlohmann::json stat_json(const SampleStat& s) {
  return {{"count", s.count},
          {"mean", number(s.mean)},
          {"stderr", number(s.stderr_of_mean)},
          {"stderr_defined", s.stderr_defined()},
          {"min", number(s.min)},
          {"max", number(s.max)}};
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace

void write_ensemble(const EnsembleStats& stats, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, _] : stats.scalars) {
    CsvWriter csv(dir / ("scalar_" + name + ".csv"), {"path_id", "seed", "value"});
    for (const auto& r : stats.records) {
      auto it = r.scalars.find(name);
      if (it != r.scalars.end()) csv.row(r.path_id, r.seed, it->second);
    }
  }
  {
    CsvWriter csv(dir / "series.csv", {"path_id", "time", "name", "value"});
    for (const auto& r : stats.records)
      for (const auto& [name, s] : r.series)
        for (std::size_t i = 0; i < s.values.size(); ++i) csv.row(r.path_id, s.times[i], name, s.values[i]);
  }
  {
    CsvWriter csv(dir / "series_mean.csv", {"quantity", "time", "mean", "stderr"});
    for (const auto& [name, s] : stats.series)
      for (std::size_t i = 0; i < s.times.size(); ++i)
        csv.row(name, s.times[i], s.mean[i], s.stderr_of_mean[i]);
  }
  nlohmann::json j;
  j["n_paths"] = stats.n_paths;
  j["succeeded"] = stats.succeeded();
  j["epsilon"] = stats.epsilon;
  j["gronwall_rate"] = number(stats.gronwall_rate);
  j["scalars"] = nlohmann::json::object();
  for (const auto& [name, s] : stats.scalars) j["scalars"][name] = stat_json(s);
  j["failures"] = nlohmann::json::array();
  for (const auto& f : stats.failures)
    j["failures"].push_back(
        {{"path_id", f.path_id}, {"seed", f.seed}, {"time", number(f.time)}, {"message", f.message}});
  j["failure_count"] = stats.failures.size();
  j["warnings"] = stats.warnings;
  write_json(j, dir / "summary.json");
}

void write_sweeps(const std::vector<SweepTable>& tables, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json j = nlohmann::json::array();
  for (const auto& t : tables) {
    CsvWriter csv(dir / ("sweep_" + t.quantity + ".csv"),
                  {"quantity", t.axis, "mean", "stderr", "count", "min", "max"});
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) {
      csv.row(t.quantity, r.axis, r.stat.mean, r.stat.stderr_of_mean,
              static_cast<std::uint64_t>(r.stat.count), r.stat.min, r.stat.max);
      nlohmann::json row = stat_json(r.stat);
      row[t.axis] = r.axis;
      rows.push_back(row);
    }
    nlohmann::json entry{{"quantity", t.quantity},
                         {"axis", t.axis},
                         {"rows", rows},
                         {"uniformity", number(t.uniformity)},
                         {"flagged", t.flagged}};
    if (t.axis == "delta") {
      entry["slope"] = number(t.slope);
      nlohmann::json ratios = nlohmann::json::array();
      for (double r : t.ratios) ratios.push_back(number(r));
      entry["ratios"] = ratios;
    }
    j.push_back(entry);
  }
  write_json(j, dir / "sweep_summary.json");
}

}  // namespace sdp
