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

#include "sdp/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include "sdp/core/csv.hpp"
#include "sdp/core/error.hpp"
#include "sdp/core/grid.hpp"
#include "sdp/core/snapshot.hpp"
#include "sdp/ensemble/ensemble.hpp"
#include "sdp/estimators/estimators.hpp"
#include "sdp/helmholtz/elliptic.hpp"
#include "sdp/kinetic/kinetic.hpp"

namespace sdp {

void SnapshotWriter::observe(const PathState& state, bool final) {
  if (!final) return;
  char name[32];
  std::snprintf(name, sizeof(name), "path_%06llu.snap",
                static_cast<unsigned long long>(state.wiener.lineage().path));
  write_snapshot(state.snapshot(), dir_ / name);
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error [" << e.key() << "]: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitRuntimeError;
}

// ---------------------------------------------------------------------------
// verify

namespace {

double sup_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l2(const Field& f) { return std::sqrt(integrate(Field(f.grid(), [&] {
  std::vector<double> sq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
  return sq;
}()))); }

std::string lowpass(double amp, std::size_t kmax, std::uint64_t seed) {
  std::ostringstream os;
  os << "random_lowpass(" << amp << ", " << kmax << ", " << seed << ")";
  return os.str();
}

double sandwich_ratio(const Field& v) {
  const double n = l2(v);
  return s_functional(a_inverse(v)) / (n * n);
}

Field single_mode(const Grid1D& g, std::size_t j) {
  const double k = g.wavenumber(j);
  return Field::from_function(g, [k](double x) { return std::cos(k * x); });
}

}  // namespace

Report static_verification(const RunConfig& cfg) {
  Report r;
  // Elliptic checks run on a fixed reference grid; kinetic checks on the run grid.
  const Grid1D g = build_grid(1024, 20.0);
  const std::size_t kmax = 64;
  const Grid1D run_grid = build_grid(cfg.n_points, cfg.half_width);
  const std::size_t run_kmax = std::min<std::size_t>(20, cfg.n_points / 3 - 1);

  const Report noise = validate_assumptions(build_noise(cfg, false), {}, {.q = cfg.solver.q});
  r.lines.insert(r.lines.end(), noise.lines.begin(), noise.lines.end());

  const Field gauss = Field::from_function(g, [](double x) { return std::exp(-x * x); });
  const auto oracle = kernel_pressure_oracle(gauss);
  const double oracle_err = sup_diff(oracle.value, pressure(gauss));
  r.add("pressure_kernel_oracle", oracle_err, 1e-6, oracle_err <= 1e-6,
        oracle.warning.value_or(""));

  double fi = 0.0;
  const auto A = EllipticOperator::a_operator(g);
  const auto P = EllipticOperator::pressure(g);
  for (std::uint64_t s = 1; s <= 100; ++s) {
    const Field v = make_preset(lowpass(1.0, kmax, s), g);
    const auto& op = s % 2 ? A : P;
    fi = std::max(fi, sup_diff(apply_forward(op, invert(op, v)), v) / v.max_abs());
  }
  r.add("forward_inverse", fi, 1e-10, fi <= 1e-10);

  double lo = 1.0, hi = 0.0;
  for (std::uint64_t s = 1; s <= 200; ++s) {
    const double ratio = sandwich_ratio(make_preset(lowpass(1.0, 1 + (s * 7) % kmax, 1000 + s), g));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  r.add("sandwich_lower", lo, 0.25, lo >= 0.25);
  r.add("sandwich_upper", hi, 1.0, hi <= 1.0);
  const auto symbol = [&](std::size_t j) {
    const double k2 = g.wavenumber(j) * g.wavenumber(j);
    return (1.0 + k2) / (4.0 + k2);
  };
  const std::size_t j_low = 1, j_high = g.size() / 3;
  const double low_end = sandwich_ratio(single_mode(g, j_low));
  const double high_end = sandwich_ratio(single_mode(g, j_high));
  const double low_err = std::abs(low_end - symbol(j_low));
  const double high_err = std::abs(high_end - symbol(j_high));
  r.add("sandwich_low_mode", low_end, 0.25,
        low_end >= 0.25 && low_end <= 0.27 && low_err <= 1e-9,
        "lowest mode, symbol error " + format_double(low_err));
  r.add("sandwich_high_mode", high_end, 1.0,
        high_end <= 1.0 && high_end >= 0.99 && high_err <= 1e-9,
        "highest resolved mode, symbol error " + format_double(high_err));

  const CGrid cg(cfg.solver.c_grid);
  double moment = 0.0, binary = 0.0, monotone = 0.0, mass = 0.0;
  for (std::uint64_t s = 1; s <= 50; ++s) {
    const Field u = make_preset(lowpass(1.5, run_kmax, 5000 + s), run_grid);
    const auto f = kinetic_function(u, cg);
    const auto nu = young_measure(u, cg);
    for (double p : {2.0, 2.0 * cfg.solver.q}) {
      const auto m = moment_reconstruction(f, p);
      const double bound = p * f.c.dc() * std::pow(u.max_abs(), p - 1.0);
      for (std::size_t i = 0; i < u.size(); ++i)
        moment = std::max(moment, std::abs(m[i] - std::pow(std::abs(u[i]), p)) / bound);
    }
    const std::size_t nc = f.c.size();
    for (std::size_t i = 0; i < u.size(); ++i) {
      double total = 0.0;
      for (std::size_t j = 0; j < nc; ++j) {
        const double v = f.at(i, j);
        binary = std::max(binary, std::abs(v * (1.0 - v)));
        if (j > 0 && v > f.at(i, j - 1)) monotone += 1.0;
        total += nu.at(i, j) * f.c.dc();
      }
      mass = std::max(mass, std::abs(total - 1.0));
    }
  }
  r.add("moment_identity", moment, 1.0, moment <= 1.0, "error / (p dc max|u|^(p-1))");
  r.add("kinetic_binary", binary, 0.0, binary == 0.0);
  r.add("kinetic_monotone", monotone, 0.0, monotone == 0.0);
  r.add("young_unit_mass", mass, 1e-12, mass <= 1e-12);
  return r;
}

namespace {

void print_report(const Report& r, std::ostream& out) {
  for (const auto& l : r.lines) {
    out << std::left << std::setw(28) << l.name << " measured=" << std::setw(14)
        << format_double(l.measured) << " bound=" << std::setw(10) << format_double(l.bound)
        << (l.pass ? " PASS" : " FAIL");
    if (!l.note.empty()) out << "  (" << l.note << ")";
    out << '\n';
  }
}

RunManifest manifest_for(const RunConfig& cfg, const CommandContext& ctx) {
  RunManifest m;
  m.config = to_json(cfg);
  m.input_hash = fnv1a_hex(ctx.config_text);
  m.command = ctx.command;
  return m;
}

}  // namespace

int cmd_verify(const RunConfig& cfg, const CommandContext& ctx) {
  const Report r = static_verification(cfg);
  print_report(r, *ctx.out);
  if (r.all_pass()) return kExitOk;
  *ctx.out << "failed checks:";
  for (const auto& name : r.failures()) *ctx.out << ' ' << name;
  *ctx.out << '\n';
  return kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// run

namespace {

struct AuditRow {
  std::size_t test_fn = 0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  double entropy = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  bool pass = true;
};

}  // namespace

int cmd_run(const RunConfig& cfg, const CommandContext& ctx) {
  write_manifest(manifest_for(cfg, ctx), cfg.out);
  EnsembleConfig e = ensemble_config(cfg);
  const bool audits = cfg.audit.entropy || cfg.audit.transport;
  const auto snapshots = cfg.out / "snapshots";
  std::filesystem::create_directories(snapshots);
  const std::uint64_t cadence = cfg.sample_every_steps;
  e.observers = [audits, snapshots, cadence](const SolverConfig& s, std::uint64_t) {
    std::vector<std::unique_ptr<Observer>> obs;
    obs.push_back(std::make_unique<NormObserver>(s.q, s.epsilon, cadence));
    obs.push_back(std::make_unique<DefectObserver>(s.epsilon, CGrid(s.c_grid), s.q));
    obs.push_back(std::make_unique<SnapshotWriter>(snapshots));
    if (audits) obs.push_back(std::make_unique<TrajectoryRecorder>());
    return obs;
  };

  std::vector<TensorBump> battery = bump_catalog(cfg.audit.seed, cfg.audit.count, cfg.solver.t_final);
  if (cfg.audit.psi_sign < 0.0) battery.front().sign = -1.0;
  std::vector<std::vector<AuditRow>> rows(cfg.paths);
  if (audits) {
    const NoiseModel noise = e.noise;
    const auto& audit = cfg.audit;
    const double eps = cfg.solver.epsilon, dt = cfg.solver.dt;
    e.analysis = [&rows, battery, noise, audit, eps, dt](PathRecord& rec) {
      const AuditInput in{&*rec.trajectory, &noise, eps, dt};
      std::vector<AuditRow> out(battery.size());
      for (std::size_t k = 0; k < battery.size(); ++k) out[k].test_fn = k;
      if (audit.entropy) {
        const auto terms = entropy_audit(in, battery, {.allow_signed = true});
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < terms.size(); ++k) {
          out[k].entropy = terms[k].value();
          out[k].tolerance = audit.tolerance * terms[k].scale();
          out[k].pass = out[k].entropy >= -out[k].tolerance;
          if (terms[k].scale() > 0.0) worst = std::min(worst, terms[k].value() / terms[k].scale());
        }
        if (std::isfinite(worst)) rec.scalars["entropy_min_relative"] = worst;
      }
      if (audit.transport) {
        const auto res = transport_residuals(in, battery);
        double rms = 0.0;
        for (std::size_t k = 0; k < res.size(); ++k) {
          out[k].residual = res[k].total();
          rms += res[k].total() * res[k].total();
        }
        rec.scalars["transport_residual_rms"] = std::sqrt(rms / double(res.size()));
      }
      rows.at(rec.path_id) = std::move(out);
    };
  }

  const EnsembleStats stats = run_ensemble(e);
  write_ensemble(stats, cfg.out);
  std::ostream& out = *ctx.out;
  out << "paths: " << stats.succeeded() << " succeeded, " << stats.failures.size() << " failed\n";
  for (const auto& f : stats.failures)
    out << "  path " << f.path_id << " (seed " << f.seed << ") failed at t=" << format_double(f.time)
        << ": " << f.message << '\n';
  for (const auto& w : stats.warnings) out << "warning: " << w << '\n';

  std::vector<std::string> failing;
  if (audits) {
    CsvWriter csv(cfg.out / "audit.csv",
                  {"path_id", "test_fn_id", "residual", "entropy_value", "tolerance", "pass"});
    for (const auto& rec : stats.records) {
      for (const auto& row : rows[rec.path_id]) {
        csv.row(rec.path_id, static_cast<std::uint64_t>(row.test_fn), row.residual, row.entropy,
                row.tolerance, row.pass);
        if (!row.pass) {
          std::ostringstream os;
          os << "path " << rec.path_id << " psi " << row.test_fn
             << ": entropy value " << format_double(row.entropy) << " < -" << format_double(row.tolerance);
          failing.push_back(os.str());
        }
      }
    }
  }
  for (const char* name : {"sup_l2_sq", "sup_l2q_pow", "dissipation", "defect_mass",
                           "defect_weighted_mass", "entropy_min_relative", "transport_residual_rms"}) {
    auto it = stats.scalars.find(name);
    if (it == stats.scalars.end()) continue;
    out << "  " << std::left << std::setw(24) << name << " mean=" << format_double(it->second.mean)
        << " stderr=" << format_double(it->second.stderr_of_mean) << '\n';
  }
  out << "outputs written to " << cfg.out.string() << '\n';
  if (stats.succeeded() == 0) {
    *ctx.err << "error: every path failed\n";
    return kExitRuntimeError;
  }
  if (!failing.empty()) {
    out << "entropy audit failed for " << failing.size() << " (path, psi) pairs:\n";
    for (const auto& f : failing) out << "  " << f << '\n';
    return kExitCheckFailed;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const RunConfig& cfg, const std::string& kind, const CommandContext& ctx) {
  EnsembleConfig e = ensemble_config(cfg);
  std::ostream& out = *ctx.out;
  std::vector<SweepTable> tables;
  if (kind == "epsilon") {
    if (e.epsilons.size() < 2) throw ConfigError("epsilon", "sweep needs ≥ 2 values");
    write_manifest(manifest_for(cfg, ctx), cfg.out);
    const std::uint64_t cadence = cfg.sample_every_steps;
    e.observers = [cadence](const SolverConfig& s, std::uint64_t) {
      std::vector<std::unique_ptr<Observer>> obs;
      obs.push_back(std::make_unique<NormObserver>(s.q, s.epsilon, cadence));
      obs.push_back(std::make_unique<DefectObserver>(s.epsilon, CGrid(s.c_grid), s.q));
      return obs;
    };
    tables = epsilon_sweep(e, {"sup_l2_sq", "sup_l2q_pow", "defect_mass", "defect_weighted_mass"});
  } else if (kind == "delta") {
    write_manifest(manifest_for(cfg, ctx), cfg.out);
    ModulusBox box = cfg.modulus;
    box.sample_stride = cfg.sample_every_steps;
    tables.push_back(delta_sweep(e, cfg.deltas, box));
  } else {
    throw ConfigError("sweep", "sweep kind must be 'epsilon' or 'delta'");
  }
  write_sweeps(tables, cfg.out);
  for (const auto& t : tables) {
    out << t.quantity << " vs " << t.axis << ":\n";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      out << "  " << t.axis << "=" << format_double(t.rows[i].axis)
          << " mean=" << format_double(t.rows[i].stat.mean)
          << " stderr=" << format_double(t.rows[i].stat.stderr_of_mean);
      if (!t.ratios.empty()) out << " mean/delta=" << format_double(t.ratios[i]);
      out << '\n';
    }
    out << "  uniformity=" << format_double(t.uniformity);
    if (t.axis == "delta") out << " slope=" << format_double(t.slope);
    if (t.flagged) out << " (flagged: zero or undefined values)";
    out << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report

namespace {

RunConfig config_from_manifest(const RunManifest& m) {
  std::ostringstream os;
  for (const auto& [key, v] : m.config.items()) {
    os << key << " = ";
    if (v.is_array()) {
      os << '[';
      for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << format_double(v[i].get<double>());
      os << ']';
    } else if (v.is_number_float()) {
      os << format_double(v.get<double>());
    } else {
      os << v.dump();
    }
    os << '\n';
  }
  return parse_run_config(os.str());
}

nlohmann::json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

double json_number(const nlohmann::json& v) {
  return v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

struct Criterion {
  int id;
  std::string name;
  std::string status;  // PASS, FAIL or n/a
  std::string detail;
};

}  // namespace

int cmd_report(const std::vector<std::filesystem::path>& dirs, std::ostream& out) {
  if (dirs.empty()) throw Error("report needs an output directory");
  std::vector<RunManifest> manifests;
  for (const auto& d : dirs) manifests.push_back(read_manifest(d));
  const std::filesystem::path& dir = dirs.front();
  const RunConfig cfg = config_from_manifest(manifests.front());

  CsvWriter csv(dir / "report.csv", {"quantity", "axis", "x", "mean", "stderr"});
  std::optional<nlohmann::json> summary;
  if (std::filesystem::exists(dir / "summary.json")) summary = read_json(dir / "summary.json");
  if (std::filesystem::exists(dir / "series_mean.csv")) {
    const CsvTable t = read_csv(dir / "series_mean.csv");
    for (const auto& row : t.rows) csv.row(row.at(0), "time", row.at(1), row.at(2), row.at(3));
  }
  if (summary) {
    const double eps = json_number(manifests.front().config.at("epsilon"));
    for (const auto& [name, s] : (*summary)["scalars"].items())
      csv.row(name, "epsilon", eps, json_number(s["mean"]), json_number(s["stderr"]));
  }
  std::optional<nlohmann::json> sweeps;
  if (std::filesystem::exists(dir / "sweep_summary.json")) sweeps = read_json(dir / "sweep_summary.json");
  if (sweeps) {
    for (const auto& t : *sweeps) {
      const std::string axis = t["axis"].get<std::string>();
      for (const auto& row : t["rows"])
        csv.row(t["quantity"].get<std::string>(), axis, json_number(row[axis]), json_number(row["mean"]),
                json_number(row["stderr"]));
    }
  }

  // Epsilon table from several run directories, joined on scalar names.
  std::map<std::string, double> merged_uniformity;
  if (dirs.size() > 1) {
    std::vector<std::pair<double, nlohmann::json>> runs;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      if (!std::filesystem::exists(dirs[i] / "summary.json"))
        throw Error("no summary.json in " + dirs[i].string());
      runs.emplace_back(json_number(manifests[i].config.at("epsilon")), read_json(dirs[i] / "summary.json"));
    }
    std::set<std::string> common;
    for (const auto& [name, _] : runs.front().second["scalars"].items()) common.insert(name);
    for (const auto& [eps, j] : runs) {
      std::set<std::string> keep;
      for (const auto& n : common)
        if (j["scalars"].contains(n)) keep.insert(n);
      common = keep;
    }
    CsvWriter sweep(dir / "eps_sweep.csv", {"quantity", "epsilon", "mean", "stderr"});
    out << "epsilon table over " << dirs.size() << " directories:\n";
    for (const auto& name : common) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (const auto& [eps, j] : runs) {
        const double m = json_number(j["scalars"][name]["mean"]);
        sweep.row(name, eps, m, json_number(j["scalars"][name]["stderr"]));
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
      const double u = lo > 0.0 ? hi / lo : std::numeric_limits<double>::quiet_NaN();
      merged_uniformity[name] = u;
      out << "  " << std::left << std::setw(24) << name << " uniformity=" << format_double(u) << '\n';
    }
  }

  std::vector<Criterion> crit;
  const Report stat = static_verification(cfg);
  auto status = [&](const std::vector<std::string>& names) {
    for (const auto& n : names) {
      const CheckLine* l = stat.find(n);
      if (!l || !l->pass) return std::string("FAIL");
    }
    return std::string("PASS");
  };
  crit.push_back({1, "elliptic oracles", status({"pressure_kernel_oracle", "forward_inverse"}),
                  "kernel sup-error " + format_double(stat.find("pressure_kernel_oracle")->measured)});
  crit.push_back({2, "sandwich inequality",
                  status({"sandwich_lower", "sandwich_upper", "sandwich_low_mode", "sandwich_high_mode"}),
                  "ratios in [" + format_double(stat.find("sandwich_lower")->measured) + ", " +
                      format_double(stat.find("sandwich_upper")->measured) + "]"});
  crit.push_back({3, "deterministic peakon regression", "n/a", "evaluated by the acceptance binary"});
  crit.push_back({4, "kinetic moment identities",
                  status({"moment_identity", "kinetic_binary", "kinetic_monotone", "young_unit_mass"}),
                  "worst normalized error " + format_double(stat.find("moment_identity")->measured)});
  if (summary && (*summary)["scalars"].contains("defect_mass") && (*summary)["scalars"].contains("dissipation")) {
    const double m = json_number((*summary)["scalars"]["defect_mass"]["mean"]);
    const double d = json_number((*summary)["scalars"]["dissipation"]["mean"]);
    const double rel = d > 0.0 ? std::abs(m - d) / d : std::abs(m - d);
    crit.push_back({5, "defect bookkeeping", rel <= 1e-12 ? "PASS" : "FAIL",
                    "relative mismatch " + format_double(rel)});
  } else {
    crit.push_back({5, "defect bookkeeping", "n/a", "no defect data in this directory"});
  }
  std::optional<CsvTable> audit;
  if (std::filesystem::exists(dir / "audit.csv")) audit = read_csv(dir / "audit.csv");
  {
    double worst = 0.0;
    bool any = false;
    if (audit) {
      const int col = audit->column("residual");
      for (const auto& row : audit->rows) {
        const double v = std::strtod(row.at(std::size_t(col)).c_str(), nullptr);
        if (std::isfinite(v)) any = true, worst = std::max(worst, std::abs(v));
      }
    }
    crit.push_back({6, "transport residual", "n/a",
                    any ? "max |residual| " + format_double(worst) + " (refinement evaluated by the acceptance binary)"
                        : "evaluated by the acceptance binary"});
  }
  if (audit && audit->column("entropy_value") >= 0) {
    std::size_t total = 0, failed = 0;
    const int col = audit->column("pass");
    for (const auto& row : audit->rows) {
      ++total;
      if (row.at(std::size_t(col)) != "1") ++failed;
    }
    crit.push_back({7, "entropy audit", failed == 0 ? "PASS" : "FAIL",
                    std::to_string(failed) + " of " + std::to_string(total) + " (path, psi) pairs below tolerance"});
  } else {
    crit.push_back({7, "entropy audit", "n/a", "no audit.csv in this directory"});
  }
  {
    std::optional<double> u2, u4;
    if (sweeps) {
      for (const auto& t : *sweeps) {
        if (t["axis"] != "epsilon") continue;
        if (t["quantity"] == "sup_l2_sq") u2 = json_number(t["uniformity"]);
        if (t["quantity"] == "sup_l2q_pow") u4 = json_number(t["uniformity"]);
      }
    }
    if (!u2 && merged_uniformity.count("sup_l2_sq")) u2 = merged_uniformity["sup_l2_sq"];
    if (!u4 && merged_uniformity.count("sup_l2q_pow")) u4 = merged_uniformity["sup_l2q_pow"];
    if (u2 && u4) {
      crit.push_back({8, "epsilon uniformity", (*u2 <= 2.0 && *u4 <= 2.0) ? "PASS" : "FAIL",
                      "max/min " + format_double(*u2) + " (L2), " + format_double(*u4) + " (L2q)"});
    } else {
      crit.push_back({8, "epsilon uniformity", "n/a", "no epsilon sweep data"});
    }
  }
  {
    std::optional<double> u;
    if (sweeps)
      for (const auto& t : *sweeps)
        if (t["axis"] == "delta") u = json_number(t["uniformity"]);
    if (u) {
      crit.push_back({9, "time modulus", *u <= 3.0 ? "PASS" : "FAIL", "max/min of value/delta " + format_double(*u)});
    } else {
      crit.push_back({9, "time modulus", "n/a", "no delta sweep data"});
    }
  }
  crit.push_back({10, "reproducibility", "n/a", "evaluated by the acceptance binary"});

  std::ofstream txt(dir / "summary.txt");
  bool failed = false;
  for (const auto& c : crit) {
    std::ostringstream line;
    line << "criterion " << std::setw(2) << c.id << "  " << std::left << std::setw(32) << c.name << std::setw(5)
         << c.status << "  " << c.detail;
    out << line.str() << '\n';
    txt << line.str() << '\n';
    failed = failed || c.status == "FAIL";
  }
  return failed ? kExitCheckFailed : kExitOk;
}

}  // namespace sdp
