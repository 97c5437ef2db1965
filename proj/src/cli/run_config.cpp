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

#include "sdp/cli/run_config.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "sdp/cli/flat_toml.hpp"
#include "sdp/core/csv.hpp"
#include "sdp/core/error.hpp"
#include "sdp/core/grid.hpp"

namespace sdp {

namespace {

double as_number(const std::string& key, const FlatEntry& e) {
  if (const auto* d = std::get_if<double>(&e.value)) return *d;
  throw ConfigError(key, "line " + std::to_string(e.line) + ": '" + key + "' must be a number");
}

std::uint64_t as_count(const std::string& key, const FlatEntry& e) {
  const double d = as_number(key, e);
  if (!(d >= 0.0) || d != std::floor(d) || d > 9.007199254740992e15)
    throw ConfigError(key, "line " + std::to_string(e.line) + ": '" + key +
                               "' must be a non-negative integer");
  return static_cast<std::uint64_t>(d);
}

bool as_bool(const std::string& key, const FlatEntry& e) {
  if (const auto* b = std::get_if<bool>(&e.value)) return *b;
  throw ConfigError(key, "line " + std::to_string(e.line) + ": '" + key + "' must be true or false");
}

std::string as_string(const std::string& key, const FlatEntry& e) {
  if (const auto* s = std::get_if<std::string>(&e.value)) return *s;
  throw ConfigError(key, "line " + std::to_string(e.line) + ": '" + key + "' must be a string");
}

std::vector<double> as_array(const std::string& key, const FlatEntry& e) {
  if (const auto* v = std::get_if<std::vector<double>>(&e.value)) return *v;
  if (const auto* d = std::get_if<double>(&e.value)) return {*d};
  throw ConfigError(key, "line " + std::to_string(e.line) + ": '" + key + "' must be a number array");
}

using Setter = std::function<void(RunConfig&, const std::string&, const FlatEntry&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"scheme", [](RunConfig& c, auto& k, auto& e) { c.solver.scheme = parse_scheme(as_string(k, e)); }},
      {"epsilon", [](RunConfig& c, auto& k, auto& e) { c.solver.epsilon = as_number(k, e); }},
      {"dt_seconds", [](RunConfig& c, auto& k, auto& e) { c.solver.dt = as_number(k, e); }},
      {"t_final_seconds", [](RunConfig& c, auto& k, auto& e) { c.solver.t_final = as_number(k, e); }},
      {"q_exponent", [](RunConfig& c, auto& k, auto& e) { c.solver.q = as_number(k, e); }},
      {"seed", [](RunConfig& c, auto& k, auto& e) { c.solver.seed = as_count(k, e); }},
      {"cfl_safety", [](RunConfig& c, auto& k, auto& e) { c.solver.cfl_safety = as_number(k, e); }},
      {"c_min", [](RunConfig& c, auto& k, auto& e) { c.solver.c_grid.c_min = as_number(k, e); }},
      {"c_max", [](RunConfig& c, auto& k, auto& e) { c.solver.c_grid.c_max = as_number(k, e); }},
      {"c_bins", [](RunConfig& c, auto& k, auto& e) { c.solver.c_grid.n_c = as_count(k, e); }},
      {"n_points", [](RunConfig& c, auto& k, auto& e) { c.n_points = as_count(k, e); }},
      {"half_width", [](RunConfig& c, auto& k, auto& e) { c.half_width = as_number(k, e); }},
      {"preset", [](RunConfig& c, auto& k, auto& e) { c.preset = as_string(k, e); }},
      {"noise_family", [](RunConfig& c, auto& k, auto& e) { c.noise.family = as_string(k, e); }},
      {"noise_a0", [](RunConfig& c, auto& k, auto& e) { c.noise.a0 = as_number(k, e); }},
      {"noise_modes", [](RunConfig& c, auto& k, auto& e) { c.noise.modes = as_count(k, e); }},
      {"noise_c0", [](RunConfig& c, auto& k, auto& e) { c.noise.c0 = as_number(k, e); }},
      {"paths", [](RunConfig& c, auto& k, auto& e) { c.paths = as_count(k, e); }},
      {"workers", [](RunConfig& c, auto& k, auto& e) { c.workers = as_count(k, e); }},
      {"aggregation",
       [](RunConfig& c, auto& k, auto& e) { c.aggregation = static_cast<std::uint32_t>(as_count(k, e)); }},
      {"mollify_eta", [](RunConfig& c, auto& k, auto& e) { c.mollify_eta = as_number(k, e); }},
      {"sample_every_steps", [](RunConfig& c, auto& k, auto& e) { c.sample_every_steps = as_count(k, e); }},
      {"epsilons", [](RunConfig& c, auto& k, auto& e) { c.epsilons = as_array(k, e); }},
      {"deltas_seconds", [](RunConfig& c, auto& k, auto& e) { c.deltas = as_array(k, e); }},
      {"modulus_x_lo", [](RunConfig& c, auto& k, auto& e) { c.modulus.x_lo = as_number(k, e); }},
      {"modulus_x_hi", [](RunConfig& c, auto& k, auto& e) { c.modulus.x_hi = as_number(k, e); }},
      {"modulus_c_lo", [](RunConfig& c, auto& k, auto& e) { c.modulus.c_lo = as_number(k, e); }},
      {"modulus_c_hi", [](RunConfig& c, auto& k, auto& e) { c.modulus.c_hi = as_number(k, e); }},
      {"modulus_c_bins", [](RunConfig& c, auto& k, auto& e) { c.modulus.n_c = as_count(k, e); }},
      {"audit_entropy", [](RunConfig& c, auto& k, auto& e) { c.audit.entropy = as_bool(k, e); }},
      {"audit_transport", [](RunConfig& c, auto& k, auto& e) { c.audit.transport = as_bool(k, e); }},
      {"audit_count", [](RunConfig& c, auto& k, auto& e) { c.audit.count = as_count(k, e); }},
      {"audit_seed", [](RunConfig& c, auto& k, auto& e) { c.audit.seed = as_count(k, e); }},
      {"audit_tolerance", [](RunConfig& c, auto& k, auto& e) { c.audit.tolerance = as_number(k, e); }},
      {"audit_psi_sign", [](RunConfig& c, auto& k, auto& e) { c.audit.psi_sign = as_number(k, e); }},
      {"out", [](RunConfig& c, auto& k, auto& e) { c.out = as_string(k, e); }},
  };
  return table;
}

void validate(const RunConfig& c) {
  c.solver.validate();
  (void)build_grid(c.n_points, c.half_width);
  if (c.paths < 1) throw ConfigError("paths", "paths must be >= 1");
  if (c.aggregation < 1) throw ConfigError("aggregation", "aggregation must be >= 1");
  if (c.sample_every_steps < 1) throw ConfigError("sample_every_steps", "sample_every_steps must be >= 1");
  if (c.noise.family != "none" && c.noise.family != "linear" && c.noise.family != "modal")
    throw ConfigError("noise_family", "noise_family must be none, linear or modal");
  if (c.noise.c0 && c.noise.family != "modal")
    throw ConfigError("noise_c0", "noise_c0 applies to the modal family only");
  if (c.audit.psi_sign != 1.0 && c.audit.psi_sign != -1.0)
    throw ConfigError("audit_psi_sign", "audit_psi_sign must be 1 or -1");
  if (c.audit.count < 1) throw ConfigError("audit_count", "audit_count must be >= 1");
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  RunConfig cfg;
  const auto& table = setters();
  for (const auto& [key, entry] : parse_flat_toml(text)) {
    auto it = table.find(key);
    if (it == table.end())
      throw ConfigError(key, "line " + std::to_string(entry.line) + ": unknown config key '" + key + "'");
    it->second(cfg, key, entry);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read config " + path.string());
  std::stringstream s;
  s << in.rdbuf();
  return parse_run_config(s.str());
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.solver.seed = *o.seed;
  if (o.paths) cfg.paths = *o.paths;
  if (!o.epsilons.empty()) {
    cfg.solver.epsilon = o.epsilons.front();
    cfg.epsilons = o.epsilons;
  }
  if (o.out) cfg.out = *o.out;
  if (o.preset) cfg.preset = *o.preset;
  validate(cfg);
}

NoiseModel build_noise(const RunConfig& cfg, bool check_c0) {
  const auto& n = cfg.noise;
  if (n.family == "none") return NoiseModel::none();
  if (n.family == "linear") return NoiseModel::linear(n.a0);
  std::vector<double> a(n.modes);
  for (std::size_t k = 0; k < n.modes; ++k) a[k] = n.a0 * std::ldexp(1.0, -int(k));
  const NoiseModel probe = NoiseModel::modal_unchecked(cfg.half_width, a, 0.0);
  const double c0 = n.c0.value_or(probe.declared_sum());
  return check_c0 ? NoiseModel::modal(cfg.half_width, a, c0)
                  : NoiseModel::modal_unchecked(cfg.half_width, a, c0);
}

EnsembleConfig ensemble_config(const RunConfig& cfg) {
  EnsembleConfig e;
  e.n_paths = cfg.paths;
  e.solver = cfg.solver;
  e.noise = build_noise(cfg);
  e.n_points = cfg.n_points;
  e.half_width = cfg.half_width;
  e.initial = cfg.preset;
  e.aggregation = cfg.aggregation;
  e.mollify_eta = cfg.mollify_eta;
  e.epsilons = cfg.epsilons;
  e.workers = cfg.workers;
  e.output_dir = cfg.out;
  return e;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["scheme"] = std::string(to_string(c.solver.scheme));
  j["epsilon"] = c.solver.epsilon;
  j["dt_seconds"] = c.solver.dt;
  j["t_final_seconds"] = c.solver.t_final;
  j["q_exponent"] = c.solver.q;
  j["seed"] = c.solver.seed;
  j["cfl_safety"] = c.solver.cfl_safety;
  j["c_min"] = c.solver.c_grid.c_min;
  j["c_max"] = c.solver.c_grid.c_max;
  j["c_bins"] = c.solver.c_grid.n_c;
  j["n_points"] = c.n_points;
  j["half_width"] = c.half_width;
  j["preset"] = c.preset;
  j["noise_family"] = c.noise.family;
  j["noise_a0"] = c.noise.a0;
  j["noise_modes"] = c.noise.modes;
  if (c.noise.c0) j["noise_c0"] = *c.noise.c0;
  j["paths"] = c.paths;
  j["workers"] = c.workers;
  j["aggregation"] = c.aggregation;
  j["mollify_eta"] = c.mollify_eta;
  j["sample_every_steps"] = c.sample_every_steps;
  j["epsilons"] = c.epsilons;
  j["deltas_seconds"] = c.deltas;
  j["modulus_x_lo"] = c.modulus.x_lo;
  j["modulus_x_hi"] = c.modulus.x_hi;
  j["modulus_c_lo"] = c.modulus.c_lo;
  j["modulus_c_hi"] = c.modulus.c_hi;
  j["modulus_c_bins"] = c.modulus.n_c;
  j["audit_entropy"] = c.audit.entropy;
  j["audit_transport"] = c.audit.transport;
  j["audit_count"] = c.audit.count;
  j["audit_seed"] = c.audit.seed;
  j["audit_tolerance"] = c.audit.tolerance;
  j["audit_psi_sign"] = c.audit.psi_sign;
  j["out"] = c.out.string();
  return j;
}

std::string to_flat_toml(const RunConfig& cfg) {
  std::ostringstream os;
  const nlohmann::json j = to_json(cfg);
  for (const auto& [key, v] : j.items()) {
    os << key << " = ";
    if (v.is_string()) {
      os << nlohmann::json(v.get<std::string>()).dump();
    } else if (v.is_boolean()) {
      os << (v.get<bool>() ? "true" : "false");
    } else if (v.is_array()) {
      os << '[';
      for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << format_double(v[i].get<double>());
      os << ']';
    } else if (v.is_number_unsigned() || v.is_number_integer()) {
      os << v.dump();
    } else {
      os << format_double(v.get<double>());
    }
    os << '\n';
  }
  return os.str();
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

nlohmann::json RunManifest::to_json() const {
  return {{"artifact_version", artifact_version},
          {"command", command},
          {"config", config},
          {"input_hash", input_hash},
          {"timestamp", timestamp}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  m.config = j.at("config");
  m.artifact_version = j.at("artifact_version").get<std::string>();
  m.timestamp = j.at("timestamp").get<std::string>();
  m.input_hash = j.at("input_hash").get<std::string>();
  m.command = j.value("command", "");
  return m;
}

void write_manifest(const RunManifest& m, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  RunManifest stamped = m;
  if (stamped.timestamp.empty()) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    stamped.timestamp = os.str();
  }
  std::ofstream out(dir / kManifestName);
  if (!out) throw Error("cannot write manifest in " + dir.string());
  out << stamped.to_json().dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / kManifestName;
  if (!std::filesystem::exists(path)) throw Error("no manifest found in " + dir.string());
  std::ifstream in(path);
  try {
    return RunManifest::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace sdp
