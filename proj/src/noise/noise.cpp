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

#include "sdp/noise/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sdp/core/error.hpp"
#include "sdp/core/grid.hpp"
#include "sdp/core/rng.hpp"
#include "sdp/helmholtz/elliptic.hpp"

namespace sdp {

std::string to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::none: return "none";
    case NoiseFamily::linear: return "linear";
    case NoiseFamily::modal: return "modal";
    case NoiseFamily::custom: return "custom";
  }
  return "unknown";
}

NoiseModel NoiseModel::none() {
  NoiseModel m;
  m.profile_ = [](std::size_t, double) { return 0.0; };
  return m;
}

NoiseModel NoiseModel::linear(double a0) {
  if (!std::isfinite(a0)) throw ConfigError("noise_a0", "noise amplitude must be finite");
  NoiseModel m;
  m.family_ = NoiseFamily::linear;
  m.amplitudes_ = {a0};
  m.sup_ = {1.0};
  m.lip_ = {0.0};
  m.profile_ = [](std::size_t, double) { return 1.0; };
  m.c0_ = a0 * a0;
  return m;
}

NoiseModel NoiseModel::modal_unchecked(double half_width,
                                       std::vector<double> amplitudes, double c0) {
  if (!(half_width > 0.0)) throw ConfigError("half_width", "modal noise needs L > 0");
  NoiseModel m;
  m.family_ = NoiseFamily::modal;
  m.half_width_ = half_width;
  m.c0_ = c0;
  const double kappa = std::numbers::pi / half_width;
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    const double norm = 1.0 / std::sqrt(1.0 + double(k * k));
    m.sup_.push_back(norm);
    m.lip_.push_back(norm * kappa * double(k));
  }
  m.amplitudes_ = std::move(amplitudes);
  m.profile_ = [kappa](std::size_t k, double x) {
    return std::cos(double(k) * kappa * x) / std::sqrt(1.0 + double(k * k));
  };
  return m;
}

NoiseModel NoiseModel::modal(double half_width, std::vector<double> amplitudes,
                             double c0) {
  auto m = modal_unchecked(half_width, std::move(amplitudes), c0);
  const double sum = m.declared_sum();
  if (sum > c0 * (1.0 + 1e-12)) {
    throw ConfigError("noise_c0", "modal noise: sum a_k^2 sup g_k^2 = " +
                                      std::to_string(sum) + " exceeds C0 = " +
                                      std::to_string(c0));
  }
  return m;
}

NoiseModel NoiseModel::modal_geometric(double half_width, std::size_t modes,
                                       double a0, double c0) {
  std::vector<double> a(modes);
  for (std::size_t k = 0; k < modes; ++k) a[k] = a0 * std::ldexp(1.0, -int(k));
  return modal(half_width, std::move(a), c0);
}

NoiseModel NoiseModel::custom(std::vector<double> amplitudes, Profile profile,
                              std::vector<double> profile_sup,
                              std::vector<double> profile_lipschitz, double c0) {
  if (profile_sup.size() != amplitudes.size() ||
      profile_lipschitz.size() != amplitudes.size()) {
    throw ConfigError("noise_modes", "custom noise: per-mode arrays differ in length");
  }
  NoiseModel m;
  m.family_ = NoiseFamily::custom;
  m.amplitudes_ = std::move(amplitudes);
  m.sup_ = std::move(profile_sup);
  m.lip_ = std::move(profile_lipschitz);
  m.profile_ = std::move(profile);
  m.c0_ = c0;
  return m;
}

NoiseModel NoiseModel::with_modulus(Modulus h) const {
  NoiseModel m = *this;
  m.h_ = std::move(h);
  return m;
}

double NoiseModel::amplitude(std::size_t k) const {
  if (k >= modes()) throw Error("noise mode " + std::to_string(k) + " out of range");
  return amplitudes_[k];
}

double NoiseModel::profile(std::size_t k, double x) const {
  if (k >= modes()) throw Error("noise mode " + std::to_string(k) + " out of range");
  return profile_(k, x);
}

double NoiseModel::sigma(std::size_t k, double x, double v) const {
  return amplitude(k) * profile_(k, x) * v;
}

double NoiseModel::sigma_squared(double x, double v) const {
  double s = 0.0;
  for (std::size_t k = 0; k < modes(); ++k) {
    const double sk = amplitudes_[k] * profile_(k, x) * v;
    s += sk * sk;
  }
  return s;
}

double NoiseModel::declared_sum() const {
  double s = 0.0;
  for (std::size_t k = 0; k < modes(); ++k) {
    s += amplitudes_[k] * amplitudes_[k] * sup_[k] * sup_[k];
  }
  return s;
}

Field sigma_apply(const NoiseModel& model, std::size_t k, const Field& u) {
  const double a = model.amplitude(k);
  Field out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] = a * model.profile(k, u.grid().x(i)) * u[i];
  }
  return out;
}

std::vector<std::vector<double>> profile_table(const NoiseModel& model,
                                               const Grid1D& grid) {
  std::vector<std::vector<double>> table(model.modes(),
                                         std::vector<double>(grid.size()));
  for (std::size_t k = 0; k < model.modes(); ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      table[k][i] = model.profile(k, grid.x(i));
    }
  }
  return table;
}

// ---------------------------------------------------------------------------

WienerPath::WienerPath(SeedLineage lineage, std::size_t modes, double dt,
                       std::uint32_t aggregation)
    : lineage_(lineage),
      modes_(modes),
      dt_(dt),
      aggregation_(aggregation),
      dw_(modes, 0.0),
      w_(modes, 0.0) {
  if (!(dt > 0.0)) throw Error("WienerPath: dt must be positive");
  if (aggregation == 0) throw Error("WienerPath: aggregation must be >= 1");
}

const std::vector<double>& WienerPath::next_increments() {
  const double scale = std::sqrt(dt_ / aggregation_);
  const std::uint64_t first = step_ * aggregation_;
  for (std::size_t k = 0; k < modes_; ++k) {
    const StreamId id{lineage_.seed, lineage_.path, static_cast<std::uint32_t>(k)};
    double sum = 0.0;
    for (std::uint32_t j = 0; j < aggregation_; ++j) sum += stream_normal(id, first + j);
    dw_[k] = scale * sum;
    w_[k] += dw_[k];
  }
  ++step_;
  return dw_;
}

RngCursor WienerPath::cursor() const {
  return {lineage_.seed, lineage_.path, step_ * aggregation_, aggregation_};
}

void WienerPath::restore(const RngCursor& cursor, std::vector<double> accumulated) {
  if (cursor[0] != lineage_.seed || cursor[1] != lineage_.path) {
    throw Error("WienerPath::restore: seed lineage mismatch");
  }
  if (cursor[3] != aggregation_ || cursor[2] % aggregation_ != 0) {
    throw Error("WienerPath::restore: aggregation mismatch");
  }
  if (accumulated.size() != modes_) {
    throw Error("WienerPath::restore: mode count mismatch");
  }
  step_ = cursor[2] / aggregation_;
  w_ = std::move(accumulated);
  std::fill(dw_.begin(), dw_.end(), 0.0);
}

Field noise_increment(const NoiseModel& model, const std::vector<double>& dw,
                      const Field& u) {
  if (dw.size() != model.modes()) throw Error("noise_increment: mode count mismatch");
  Field out(u.grid());
  for (std::size_t k = 0; k < model.modes(); ++k) {
    if (dw[k] == 0.0) continue;
    const double a = model.amplitude(k) * dw[k];
    for (std::size_t i = 0; i < u.size(); ++i) {
      out[i] += a * model.profile(k, u.grid().x(i)) * u[i];
    }
  }
  return out;
}

Field noise_increment(const NoiseModel& model, WienerPath& path, const Field& u,
                      double dt) {
  if (std::abs(path.dt() - dt) > 1e-15 * std::max(1.0, dt)) {
    throw Error("noise_increment: dt does not match the Wiener path step");
  }
  return noise_increment(model, path.next_increments(), u);
}

// ---------------------------------------------------------------------------

namespace {

double lp_norm_squared(const Field& f, double p) {
  Field g(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) g[i] = std::pow(std::abs(f[i]), p);
  return std::pow(integrate(g), 2.0 / p);
}

double s_of(const Field& z) {
  const auto zx = derivative(z, 1);
  const auto zxx = derivative(z, 2);
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    s += 4 * z[i] * z[i] + 5 * zx[i] * zx[i] + zxx[i] * zxx[i];
  }
  return s * z.grid().dx();
}

std::vector<Field> default_probes(double half_width) {
  const auto g = build_grid(256, half_width);
  return {
      Field::from_function(g, [](double x) { return std::exp(-x * x); }),
      Field::from_function(g, [](double x) { return std::exp(-std::abs(x)); }),
      Field::from_function(g, [](double x) { return 1.5 * std::sin(x) * std::exp(-0.05 * x * x); }),
  };
}

struct Worst {
  double value = 0.0;
  void take(double r) { value = std::max(value, r); }
};

double ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

Report validate_assumptions(const NoiseModel& model,
                            const std::vector<Field>& probes_in,
                            const AssumptionOptions& opt) {
  const double L = model.half_width() > 0.0
                       ? model.half_width()
                       : (probes_in.empty() ? 20.0 : probes_in.front().grid().half_width());
  const std::vector<Field> probes = probes_in.empty() ? default_probes(L) : probes_in;
  for (const auto& p : probes) require_finite(p, "validate_assumptions probe");

  double vmax = 0.0;
  for (const auto& p : probes) vmax = std::max(vmax, p.max_abs());
  if (vmax == 0.0) vmax = 1.0;

  Report report;
  const double c0 = model.c0();
  auto pass = [&](double measured, double bound) {
    return measured - bound <= opt.tolerance * std::max(1.0, bound);
  };

  // sigma^2(x, v) <= C0 v^2 on probe points and random tuples.
  Worst growth;
  for (const auto& p : probes) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      growth.take(ratio(model.sigma_squared(p.grid().x(i), p[i]), p[i] * p[i]));
    }
  }
  const StreamId xs{opt.seed, 0, 0}, vs{opt.seed, 0, 1}, ys{opt.seed, 0, 2}, us{opt.seed, 0, 3};
  auto draw = [](const StreamId& id, std::size_t i, double half) {
    return half * (2.0 * stream_uniform(id, i) - 1.0);
  };
  for (std::size_t i = 0; i < opt.random_tuples; ++i) {
    const double x = draw(xs, i, L), v = draw(vs, i, vmax);
    growth.take(ratio(model.sigma_squared(x, v), v * v));
  }
  report.add("growth_bound", growth.value, c0, pass(growth.value, c0),
             "max sigma^2(x,v)/v^2 against C0");

  // sum_k ||sigma_k(., z)||^2_{L^{2s}} <= C0 ||z||^2_{L^{2s}} for s = 1, q.
  for (double s : {1.0, opt.q}) {
    Worst lp;
    for (const auto& z : probes) {
      double lhs = 0.0;
      for (std::size_t k = 0; k < model.modes(); ++k) {
        lhs += lp_norm_squared(sigma_apply(model, k, z), 2.0 * s);
      }
      lp.take(ratio(lhs, lp_norm_squared(z, 2.0 * s)));
    }
    const std::string name = s == 1.0 ? "lp_growth_s1" : "lp_growth_sq";
    report.add(name, lp.value, c0, pass(lp.value, c0),
               "max D_2s(z)/||z||^2_L2s, 2s = " + std::to_string(2.0 * s));
  }

  // sum_k S(A^-1 sigma_k(v)) <= C S(A^-1 v); C = a0^2 for the linear family,
  // 4 C0 in general (sandwich constants 1/4 and 1).
  {
    Worst op;
    for (const auto& v : probes) {
      double lhs = 0.0;
      for (std::size_t k = 0; k < model.modes(); ++k) {
        lhs += s_of(a_inverse(sigma_apply(model, k, v)));
      }
      op.take(ratio(lhs, s_of(a_inverse(v))));
    }
    const double bound = model.family() == NoiseFamily::linear ? c0 : 4.0 * c0;
    report.add("a_inverse_bound", op.value, bound, pass(op.value, bound),
               "max sum_k S(A^-1 sigma_k(v)) / S(A^-1 v)");
  }

  // sum_k |sigma_k(x,v) - sigma_k(y,u)|^2 <= C (|x-y|^2 + |v-u| h(|v-u|)),
  // |v|, |u| <= V; C = 2 max(V^2 sum a^2 Lip^2, C0).
  {
    double lip_sum = 0.0;
    for (std::size_t k = 0; k < model.modes(); ++k) {
      const double a = model.amplitude(k) * model.profile_lipschitz(k);
      lip_sum += a * a;
    }
    const double bound = 2.0 * std::max(vmax * vmax * lip_sum, c0);
    Worst lip;
    for (std::size_t i = 0; i < opt.random_tuples; ++i) {
      const double x = draw(xs, i, L), v = draw(vs, i, vmax);
      // Every fourth tuple shares x, which isolates the v-modulus.
      const double y = (i % 4 == 0) ? x : draw(ys, i, L);
      const double u = draw(us, i, vmax);
      double lhs = 0.0;
      for (std::size_t k = 0; k < model.modes(); ++k) {
        const double d = model.sigma(k, x, v) - model.sigma(k, y, u);
        lhs += d * d;
      }
      const double dv = std::abs(v - u);
      lip.take(ratio(lhs, (x - y) * (x - y) + dv * model.h(dv)));
    }
    report.add("lipschitz_modulus", lip.value, bound, pass(lip.value, bound),
               "max sum_k |sigma_k(x,v)-sigma_k(y,u)|^2 / (|x-y|^2 + |v-u| h(|v-u|)), |v|,|u| <= " +
                   std::to_string(vmax));
  }
  return report;
}

}  // namespace sdp
