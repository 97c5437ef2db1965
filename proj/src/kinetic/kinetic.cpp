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

#include "sdp/kinetic/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdp/core/error.hpp"
#include "sdp/core/rng.hpp"
#include "sdp/helmholtz/elliptic.hpp"

namespace sdp {

// ---------------------------------------------------------------------------
// CGrid

CGrid::CGrid(double c_min, double c_max, std::size_t n_c)
    : c_min_(c_min), n_(n_c), dc_((c_max - c_min) / double(n_c)) {
  if (!(c_min < c_max)) throw ConfigError("c_min", "c_min must be < c_max");
  if (n_c < 8) throw ConfigError("c_bins", "n_c must be >= 8");
}

bool CGrid::covers(double lo, double hi) const noexcept {
  return c_min() <= lo - 2.0 * dc_ && c_max() >= hi + 2.0 * dc_;
}

CGrid CGrid::widened_to(double lo, double hi) const {
  const double need_lo = lo - 2.0 * dc_;
  const double need_hi = hi + 2.0 * dc_;
  const auto below = static_cast<std::size_t>(std::max(0.0, std::ceil((c_min() - need_lo) / dc_ - 1e-12)));
  const auto above = static_cast<std::size_t>(std::max(0.0, std::ceil((need_hi - c_max()) / dc_ - 1e-12)));
  CGrid out = *this;
  out.c_min_ = c_min_ - double(below) * dc_;
  out.n_ = n_ + below + above;
  return out;
}

std::size_t CGrid::offset_in(const CGrid& wider) const {
  return static_cast<std::size_t>(std::llround((c_min_ - wider.c_min_) / dc_));
}

namespace {

std::string widen_warning(const CGrid& from, const CGrid& to) {
  std::ostringstream os;
  os << "c-grid widened from [" << from.c_min() << ", " << from.c_max() << "] to ["
     << to.c_min() << ", " << to.c_max() << "] to cover the velocity range";
  return os.str();
}

// Returns cg, widened if needed, and records a warning.
CGrid covering(const Field& u, const CGrid& cg, std::optional<std::string>& warning) {
  const double lo = u.min(), hi = u.max();
  if (cg.covers(lo, hi)) return cg;
  CGrid wide = cg.widened_to(lo, hi);
  warning = widen_warning(cg, wide);
  return wide;
}

// Hat deposit of `mass` at c = v onto the two nearest centers.
inline void deposit(double* row, const CGrid& cg, double v, double mass) {
  const double s = (v - cg.c_min()) / cg.dc() - 0.5;
  const double fl = std::floor(s);
  const auto j0 = static_cast<std::ptrdiff_t>(fl);
  const double w = s - fl;
  const auto n = static_cast<std::ptrdiff_t>(cg.size());
  if (j0 < 0 || j0 + 1 >= n) throw Error("hat deposit outside the c-grid");
  row[j0] += (1.0 - w) * mass;
  row[j0 + 1] += w * mass;
}

}  // namespace

KineticArray kinetic_function(const Field& u, const CGrid& cg_in) {
  require_finite(u, "kinetic_function");
  KineticArray out{cg_in, u.size(), {}, std::nullopt};
  out.c = covering(u, cg_in, out.warning);
  const std::size_t nc = out.c.size();
  out.values.assign(u.size() * nc, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      out.values[i * nc + j] = u[i] >= out.c.center(j) ? 1.0 : 0.0;
    }
  }
  return out;
}

KineticArray young_measure(const Field& u, const CGrid& cg_in) {
  require_finite(u, "young_measure");
  KineticArray out{cg_in, u.size(), {}, std::nullopt};
  out.c = covering(u, cg_in, out.warning);
  const std::size_t nc = out.c.size();
  out.values.assign(u.size() * nc, 0.0);
  const double density = 1.0 / out.c.dc();
  for (std::size_t i = 0; i < u.size(); ++i) deposit(&out.values[i * nc], out.c, u[i], density);
  return out;
}

KineticArray defect_measure(const Field& u, double epsilon, const CGrid& cg_in, double dt) {
  require_finite(u, "defect_measure");
  KineticArray out{cg_in, u.size(), {}, std::nullopt};
  out.c = covering(u, cg_in, out.warning);
  const std::size_t nc = out.c.size();
  out.values.assign(u.size() * nc, 0.0);
  if (epsilon == 0.0) return out;
  const Field ux = derivative(u, 1);
  const double scale = epsilon * dt * u.grid().dx();
  for (std::size_t i = 0; i < u.size(); ++i) {
    deposit(&out.values[i * nc], out.c, u[i], scale * ux[i] * ux[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

DefectObserver::DefectObserver(double epsilon, const CGrid& cg, double q)
    : epsilon_(epsilon), q_(q), m_{cg, 0, {}, std::nullopt} {}

void DefectObserver::observe_step(const PathState& before, const PathState& after) {
  const Field& u = before.u;
  if (m_.nx == 0) {
    m_.nx = u.size();
    m_.values.assign(m_.nx * m_.c.size(), 0.0);
  }
  if (!m_.c.covers(u.min(), u.max())) {
    const CGrid wide = m_.c.widened_to(u.min(), u.max());
    warnings_.push_back(widen_warning(m_.c, wide) + " at t=" + std::to_string(before.t));
    const std::size_t off = m_.c.offset_in(wide);
    std::vector<double> moved(m_.nx * wide.size(), 0.0);
    for (std::size_t i = 0; i < m_.nx; ++i) {
      for (std::size_t j = 0; j < m_.c.size(); ++j) {
        moved[i * wide.size() + j + off] = m_.values[i * m_.c.size() + j];
      }
    }
    m_.c = wide;
    m_.values = std::move(moved);
    m_.warning = warnings_.back();
  }
  if (epsilon_ == 0.0) return;
  const double dt = after.t - before.t;
  const Field ux = derivative(u, 1);
  const double scale = epsilon_ * dt * u.grid().dx();
  const std::size_t nc = m_.c.size();
  for (std::size_t i = 0; i < u.size(); ++i) {
    deposit(&m_.values[i * nc], m_.c, u[i], scale * ux[i] * ux[i]);
  }
}

double DefectObserver::total_mass() const noexcept {
  double s = 0.0;
  for (double v : m_.values) s += v;
  return s;
}

void DefectObserver::finish(PathRecord& record) {
  double weighted = 0.0;
  const std::size_t nc = m_.c.size();
  for (std::size_t i = 0; i < m_.nx; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      weighted += std::pow(std::abs(m_.c.center(j)), 2.0 * (q_ - 1.0)) * m_.values[i * nc + j];
    }
  }
  record.scalars["defect_mass"] = total_mass();
  record.scalars["defect_weighted_mass"] = weighted;
  record.warnings.insert(record.warnings.end(), warnings_.begin(), warnings_.end());
}

std::vector<double> moment_reconstruction(const KineticArray& f, double p) {
  const std::size_t nc = f.c.size();
  std::vector<double> weight(nc);
  for (std::size_t j = 0; j < nc; ++j) {
    weight[j] = p * std::pow(std::abs(f.c.center(j)), p - 1.0) * f.c.dc();
  }
  std::vector<double> out(f.nx, 0.0);
  for (std::size_t i = 0; i < f.nx; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < nc; ++j) {
      const double c = f.c.center(j);
      const double fij = f.values[i * nc + j];
      if (c > 0.0) s += fij * weight[j];
      else if (c < 0.0) s += (1.0 - fij) * weight[j];
    }
    out[i] = s;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Test functions

namespace {

// b(s) = (1 - s^2)^4 and its first two derivatives.
double profile(double s, int der) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double w = 1.0 - s * s;
  switch (der) {
    case 0: return w * w * w * w;
    case 1: return -8.0 * s * w * w * w;
    case 2: return -8.0 * w * w * w + 48.0 * s * s * w * w;
    default: throw Error("profile derivative order must be 0, 1 or 2");
  }
}

// Coefficients of b(s) in ascending powers.
constexpr std::array<double, 9> kProfile{1, 0, -4, 0, 6, 0, -4, 0, 1};

// Antiderivative (from s = -1) of (c0 + rc s)^j b(s), ascending powers.
std::vector<double> moment_polynomial(int j, double c0, double rc) {
  std::vector<double> lin{1.0};
  for (int k = 0; k < j; ++k) {
    std::vector<double> next(lin.size() + 1, 0.0);
    for (std::size_t a = 0; a < lin.size(); ++a) {
      next[a] += c0 * lin[a];
      next[a + 1] += rc * lin[a];
    }
    lin = std::move(next);
  }
  std::vector<double> prod(lin.size() + kProfile.size() - 1, 0.0);
  for (std::size_t a = 0; a < lin.size(); ++a)
    for (std::size_t b = 0; b < kProfile.size(); ++b) prod[a + b] += lin[a] * kProfile[b];
  std::vector<double> integral(prod.size() + 1, 0.0);
  for (std::size_t a = 0; a < prod.size(); ++a) integral[a + 1] = prod[a] / double(a + 1);
  // Shift so the antiderivative vanishes at s = -1.
  double at_minus_one = 0.0;
  for (std::size_t a = integral.size(); a-- > 0;) at_minus_one = at_minus_one * -1.0 + integral[a];
  integral[0] -= at_minus_one;
  for (double& v : integral) v *= rc;
  return integral;
}

double horner(const std::vector<double>& coef, double s) {
  double v = 0.0;
  for (std::size_t a = coef.size(); a-- > 0;) v = v * s + coef[a];
  return v;
}

// Precomputed c-moments of one bump.
struct PreparedMoments {
  double c0, rc;
  std::array<std::vector<double>, 3> poly;
  PreparedMoments(double c0_, double rc_) : c0(c0_), rc(rc_) {
    for (int j = 0; j < 3; ++j) poly[j] = moment_polynomial(j, c0, rc);
  }
  double operator()(int j, double v) const {
    const double s = std::clamp((v - c0) / rc, -1.0, 1.0);
    return horner(poly[j], s);
  }
};

}  // namespace

double TensorBump::alpha(double t) const { return profile((t - t0) / rt, 0); }

double TensorBump::beta(double x, int der) const {
  return profile((x - x0) / rx, der) / std::pow(rx, der);
}

double TensorBump::gamma(double c, int der) const {
  return profile((c - c0) / rc, der) / std::pow(rc, der);
}

double TensorBump::moment(int j, double v) const {
  if (j < 0 || j > 2) throw Error("moment order must be 0, 1 or 2");
  const double s = std::clamp((v - c0) / rc, -1.0, 1.0);
  return horner(moment_polynomial(j, c0, rc), s);
}

std::vector<TensorBump> bump_catalog(std::uint64_t seed, std::size_t count, double t_final,
                                     const BumpRanges& r) {
  if (!(t_final > 0.0)) throw ConfigError("t_final_seconds", "catalog needs T > 0");
  const StreamId id{seed, 0x6b756d70ull, 0};
  std::uint64_t index = 0;
  auto draw = [&](const std::array<double, 2>& range) {
    return range[0] + (range[1] - range[0]) * stream_uniform(id, index++);
  };
  std::vector<TensorBump> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    TensorBump b;
    b.t0 = draw(r.t_center) * t_final;
    b.rt = std::min(draw(r.t_radius) * t_final, t_final - b.t0);
    b.x0 = draw(r.x_center);
    b.rx = draw(r.x_radius);
    b.c0 = draw(r.c_center);
    b.rc = draw(r.c_radius);
    out.push_back(b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Audits

double ResidualTerms::total() const {
  return time + initial + flux + pressure + viscous + stochastic + ito + defect;
}

double ResidualTerms::scale() const {
  return std::abs(time) + std::abs(initial) + std::abs(flux) + std::abs(pressure) +
         std::abs(viscous) + std::abs(stochastic) + std::abs(ito) + std::abs(defect);
}

double EntropyTerms::value() const {
  return time + initial + flux + pressure + stochastic + ito;
}

double EntropyTerms::scale() const {
  return std::abs(time) + std::abs(initial) + std::abs(flux) + std::abs(pressure) +
         std::abs(stochastic) + std::abs(ito);
}

namespace {

// Per-step fields shared by every test function.
struct StepFields {
  std::vector<double> px;    // pressure gradient
  std::vector<double> ux;    // spectral derivative
  std::vector<double> g2;    // sum_k a_k^2 g_k^2, so sigma^2 = g2 v^2
  std::vector<double> gdw;   // sum_k a_k g_k dW_k, so sigma dW = gdw v
};

void check_input(const AuditInput& in) {
  if (in.trajectory == nullptr) throw Error("audit needs a trajectory");
  const Trajectory& tr = *in.trajectory;
  if (tr.u.size() < 2) throw Error("audit needs at least two stored times");
  if (tr.times.size() != tr.u.size()) throw Error("trajectory times and states differ in length");
  const double dt = in.solver_dt > 0.0 ? in.solver_dt : tr.dt;
  for (std::size_t n = 0; n + 1 < tr.times.size(); ++n) {
    const double h = tr.times[n + 1] - tr.times[n];
    if (std::abs(h - dt) > 1e-9 * dt) {
      std::ostringstream os;
      os << "cadence mismatch: trajectory spacing " << h << " at t=" << tr.times[n]
         << " differs from solver dt " << dt;
      throw Error(os.str());
    }
  }
  const std::size_t modes = in.noise ? in.noise->modes() : 0;
  if (modes > 0 && tr.increments.size() + 1 < tr.u.size())
    throw Error("trajectory lacks the Wiener increments");
}

StepFields step_fields(const AuditInput& in, std::size_t n,
                       const std::vector<std::vector<double>>& table) {
  const Trajectory& tr = *in.trajectory;
  const Field& u = tr.u[n];
  StepFields out;
  out.px = pressure_with_gradient(u).dpdx.data();
  out.ux = derivative(u, 1).data();
  const std::size_t nx = u.size();
  out.g2.assign(nx, 0.0);
  out.gdw.assign(nx, 0.0);
  for (std::size_t k = 0; k < table.size(); ++k) {
    const double a = in.noise->amplitude(k);
    const double dw = tr.increments[n].at(k);
    for (std::size_t i = 0; i < nx; ++i) {
      const double g = a * table[k][i];
      out.g2[i] += g * g;
      out.gdw[i] += g * dw;
    }
  }
  return out;
}

// Sampled beta with spectral x-derivatives of the samples, so that
// sum(beta') dx and sum(beta'') dx vanish to rounding. Indices where all
// three are exactly zero are skipped.
struct Support {
  std::vector<std::size_t> index;
  std::vector<double> b0, b1, b2;
};

Support x_support(const Grid1D& grid, const TensorBump& phi) {
  const double len = grid.length();
  Field beta(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double d = grid.x(i) - phi.x0;
    d -= len * std::round(d / len);
    beta[i] = phi.beta(phi.x0 + d, 0);
  }
  const Field d1 = derivative(beta, 1);
  const Field d2 = derivative(beta, 2);
  Support s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (beta[i] == 0.0 && d1[i] == 0.0 && d2[i] == 0.0) continue;
    s.index.push_back(i);
    s.b0.push_back(beta[i]);
    s.b1.push_back(d1[i]);
    s.b2.push_back(d2[i]);
  }
  return s;
}

void check_time_support(const TensorBump& phi, double t_end) {
  if (phi.alpha(t_end) != 0.0) {
    std::ostringstream os;
    os << "test function does not vanish at T=" << t_end << " (t0+rt=" << phi.t0 + phi.rt << ")";
    throw ConfigError("test_function", os.str());
  }
}

// Midpoint-rule c-sums on the lattice for one value u.
struct LatticeSums {
  double f_gamma = 0.0, f_c_gamma = 0.0, f_dgamma = 0.0;
  double nu_gamma_c = 0.0, nu_dgamma = 0.0, nu_dgamma_c2 = 0.0;
};

LatticeSums lattice_sums(const CGrid& cg, const TensorBump& phi, double u) {
  LatticeSums s;
  const double dc = cg.dc();
  const double lo = phi.c0 - phi.rc, hi = phi.c0 + phi.rc;
  const auto j_lo = static_cast<std::ptrdiff_t>(std::max(0.0, std::floor((lo - cg.c_min()) / dc)));
  const auto j_hi = std::min<std::ptrdiff_t>(std::ptrdiff_t(cg.size()) - 1,
                                             std::ptrdiff_t(std::ceil((hi - cg.c_min()) / dc)));
  for (std::ptrdiff_t j = j_lo; j <= j_hi; ++j) {
    const double c = cg.center(std::size_t(j));
    if (u < c) break;
    s.f_gamma += phi.gamma(c) * dc;
    s.f_c_gamma += c * phi.gamma(c) * dc;
    s.f_dgamma += phi.gamma(c, 1) * dc;
  }
  const double pos = (u - cg.c_min()) / dc - 0.5;
  const double fl = std::floor(pos);
  const double w = pos - fl;
  const auto j0 = static_cast<std::size_t>(fl);
  for (int side = 0; side < 2; ++side) {
    const double weight = side == 0 ? 1.0 - w : w;
    const double c = cg.center(j0 + std::size_t(side));
    s.nu_gamma_c += weight * phi.gamma(c) * c;
    s.nu_dgamma += weight * phi.gamma(c, 1);
    s.nu_dgamma_c2 += weight * phi.gamma(c, 1) * c * c;
  }
  return s;
}

}  // namespace

std::vector<ResidualTerms> transport_residuals(const AuditInput& in,
                                               const std::vector<TensorBump>& phis,
                                               CRoute route, const CGrid* lattice) {
  check_input(in);
  const Trajectory& tr = *in.trajectory;
  const Grid1D& grid = tr.u.front().grid();
  const double dx = grid.dx();
  const double eps = in.epsilon;
  const std::size_t steps = tr.u.size() - 1;
  for (const auto& phi : phis) check_time_support(phi, tr.times.back());

  std::optional<CGrid> cg;
  if (route == CRoute::lattice) {
    if (lattice == nullptr) throw Error("lattice route needs a c-grid");
    double lo = tr.u.front().min(), hi = tr.u.front().max();
    for (const auto& u : tr.u) {
      lo = std::min(lo, u.min());
      hi = std::max(hi, u.max());
    }
    cg = lattice->covers(lo, hi) ? *lattice : lattice->widened_to(lo, hi);
  }

  const std::vector<std::vector<double>> table =
      in.noise && in.noise->modes() > 0 ? profile_table(*in.noise, grid)
                                        : std::vector<std::vector<double>>{};
  std::vector<Support> supports;
  std::vector<PreparedMoments> moments;
  for (const auto& phi : phis) {
    supports.push_back(x_support(grid, phi));
    moments.emplace_back(phi.c0, phi.rc);
  }

  std::vector<ResidualTerms> out(phis.size());
  auto m0 = [&](std::size_t p, double v) {
    if (route == CRoute::exact) return moments[p](0, v);
    return lattice_sums(*cg, phis[p], v).f_gamma;
  };

  for (std::size_t p = 0; p < phis.size(); ++p) {
    const double a0 = phis[p].alpha(tr.times.front());
    if (a0 == 0.0) continue;
    const Support& s = supports[p];
    double acc = 0.0;
    for (std::size_t q = 0; q < s.index.size(); ++q) acc += s.b0[q] * m0(p, tr.u[0][s.index[q]]);
    out[p].initial = phis[p].sign * a0 * acc * dx;
  }

  for (std::size_t n = 0; n < steps; ++n) {
    const double dt = tr.times[n + 1] - tr.times[n];
    std::optional<StepFields> fields;
    const Field& u = tr.u[n];
    const Field& un = tr.u[n + 1];
    for (std::size_t p = 0; p < phis.size(); ++p) {
      const TensorBump& phi = phis[p];
      const double al = phi.alpha(tr.times[n]);
      const double al_next = phi.alpha(tr.times[n + 1]);
      if (al == 0.0 && al_next == 0.0) continue;
      const Support& s = supports[p];
      const PreparedMoments& M = moments[p];
      ResidualTerms& r = out[p];
      const double w = phi.sign * dx;
      if (al_next != al) {
        double acc = 0.0;
        for (std::size_t q = 0; q < s.index.size(); ++q) acc += s.b0[q] * m0(p, un[s.index[q]]);
        r.time += (al_next - al) * acc * w;
      }
      if (al == 0.0) continue;
      if (!fields) fields = step_fields(in, n, table);
      double flux = 0, pres = 0, visc = 0, ito = 0, defect = 0, stoch = 0;
      for (std::size_t q = 0; q < s.index.size(); ++q) {
        const std::size_t i = s.index[q];
        const double v = u[i];
        const double ux2 = fields->ux[i] * fields->ux[i];
        if (route == CRoute::exact) {
          const double g = phi.gamma(v), dg = phi.gamma(v, 1);
          flux += s.b1[q] * M(1, v);
          pres -= s.b0[q] * fields->px[i] * g;
          visc += eps * s.b2[q] * M(0, v);
          ito += 0.5 * s.b0[q] * dg * fields->g2[i] * v * v;
          defect -= eps * s.b0[q] * ux2 * dg;
          stoch += s.b0[q] * g * fields->gdw[i] * v;
        } else {
          const LatticeSums ls = lattice_sums(*cg, phi, v);
          flux += s.b1[q] * ls.f_c_gamma;
          pres -= s.b0[q] * fields->px[i] * ls.f_dgamma;
          visc += eps * s.b2[q] * ls.f_gamma;
          ito += 0.5 * s.b0[q] * fields->g2[i] * ls.nu_dgamma_c2;
          defect -= eps * s.b0[q] * ux2 * ls.nu_dgamma;
          stoch += s.b0[q] * fields->gdw[i] * ls.nu_gamma_c;
        }
      }
      r.flux += dt * al * flux * w;
      r.pressure += dt * al * pres * w;
      r.viscous += dt * al * visc * w;
      r.ito += dt * al * ito * w;
      r.defect += dt * al * defect * w;
      r.stochastic += al * stoch * w;
    }
  }
  return out;
}

double transport_residual(const AuditInput& in, const TensorBump& phi) {
  return transport_residuals(in, {phi}).front().total();
}

std::vector<EntropyTerms> entropy_audit(const AuditInput& in,
                                        const std::vector<TensorBump>& psis,
                                        const EntropyOptions& options) {
  check_input(in);
  const Trajectory& tr = *in.trajectory;
  const Grid1D& grid = tr.u.front().grid();
  const double dx = grid.dx();
  const std::size_t steps = tr.u.size() - 1;
  for (const auto& psi : psis) {
    check_time_support(psi, tr.times.back());
    if (psi.sign < 0.0 && !options.allow_signed)
      throw ConfigError("test_function", "entropy audit needs psi >= 0 (sign must be positive)");
  }
  const std::vector<std::vector<double>> table =
      in.noise && in.noise->modes() > 0 ? profile_table(*in.noise, grid)
                                        : std::vector<std::vector<double>>{};
  std::vector<Support> supports;
  std::vector<PreparedMoments> moments;
  for (const auto& psi : psis) {
    supports.push_back(x_support(grid, psi));
    moments.emplace_back(psi.c0, psi.rc);
  }
  auto gamma2 = [](const PreparedMoments& M, double v) { return v * M(0, v) - M(1, v); };
  const bool realized = options.ito == ItoQuadrature::realized;

  std::vector<EntropyTerms> out(psis.size());
  for (std::size_t p = 0; p < psis.size(); ++p) {
    const double a0 = psis[p].alpha(tr.times.front());
    if (a0 == 0.0) continue;
    double acc = 0.0;
    const Support& s = supports[p];
    for (std::size_t q = 0; q < s.index.size(); ++q)
      acc += s.b0[q] * gamma2(moments[p], tr.u[0][s.index[q]]);
    out[p].initial = psis[p].sign * a0 * acc * dx;
  }
  for (std::size_t n = 0; n < steps; ++n) {
    const double dt = tr.times[n + 1] - tr.times[n];
    std::optional<StepFields> fields;
    const Field& u = tr.u[n];
    const Field& un = tr.u[n + 1];
    for (std::size_t p = 0; p < psis.size(); ++p) {
      const TensorBump& psi = psis[p];
      const double al = psi.alpha(tr.times[n]);
      const double al_next = psi.alpha(tr.times[n + 1]);
      if (al == 0.0 && al_next == 0.0) continue;
      const Support& s = supports[p];
      const PreparedMoments& M = moments[p];
      EntropyTerms& e = out[p];
      const double w = psi.sign * dx;
      if (al_next != al) {
        double acc = 0.0;
        for (std::size_t q = 0; q < s.index.size(); ++q) acc += s.b0[q] * gamma2(M, un[s.index[q]]);
        e.time += (al_next - al) * acc * w;
      }
      if (al == 0.0) continue;
      if (!fields) fields = step_fields(in, n, table);
      double flux = 0, pres = 0, ito = 0, stoch = 0, visc = 0;
      for (std::size_t q = 0; q < s.index.size(); ++q) {
        const std::size_t i = s.index[q];
        const double v = u[i];
        const double g0 = M(0, v);
        flux += s.b1[q] * (0.5 * v * v * g0 - 0.5 * M(2, v));
        pres -= s.b0[q] * fields->px[i] * g0;
        const double sigma2 = realized ? fields->gdw[i] * fields->gdw[i] / dt : fields->g2[i];
        ito += 0.5 * s.b0[q] * sigma2 * v * v * psi.gamma(v);
        stoch += s.b0[q] * g0 * fields->gdw[i] * v;
        visc += in.epsilon * s.b2[q] * gamma2(M, v);
      }
      e.flux += dt * al * flux * w;
      e.pressure += dt * al * pres * w;
      e.ito += dt * al * ito * w;
      e.stochastic += al * stoch * w;
      e.viscous += dt * al * visc * w;
    }
  }
  return out;
}

Report limit_identity_check(const Trajectory& traj, const CGrid& cg_in) {
  if (traj.u.empty()) throw Error("limit identity check needs at least one state");
  double lo = traj.u.front().min(), hi = traj.u.front().max();
  for (const auto& u : traj.u) {
    lo = std::min(lo, u.min());
    hi = std::max(hi, u.max());
  }
  const CGrid cg = cg_in.covers(lo, hi) ? cg_in : cg_in.widened_to(lo, hi);
  const std::size_t nc = cg.size();
  double binary = 0.0, monotone = 0.0, staircase = 0.0, centroid = 0.0, mass = 0.0;
  for (const auto& u : traj.u) {
    const KineticArray f = kinetic_function(u, cg);
    const KineticArray nu = young_measure(u, cg);
    for (std::size_t i = 0; i < u.size(); ++i) {
      double pos = 0.0, first = 0.0, total = 0.0;
      for (std::size_t j = 0; j < nc; ++j) {
        const double fij = f.at(i, j);
        binary = std::max(binary, std::abs(fij * (1.0 - fij)));
        if (j > 0 && fij > f.at(i, j - 1)) monotone += 1.0;
        if (cg.center(j) > 0.0) pos += fij * cg.dc();
        first += cg.center(j) * nu.at(i, j) * cg.dc();
        total += nu.at(i, j) * cg.dc();
      }
      staircase = std::max(staircase, std::abs(pos - std::max(u[i], 0.0)));
      centroid = std::max(centroid, std::abs(first - u[i]));
      mass = std::max(mass, std::abs(total - 1.0));
    }
  }
  Report r;
  r.add("kinetic_binary", binary, 0.0, binary == 0.0);
  r.add("kinetic_monotone", monotone, 0.0, monotone == 0.0);
  r.add("positive_part_reconstruction", staircase, cg.dc(), staircase <= cg.dc());
  r.add("young_centroid", centroid, 0.5 * cg.dc(), centroid <= 0.5 * cg.dc());
  r.add("young_unit_mass", mass, 1e-12, mass <= 1e-12);
  if (!(cg == cg_in)) r.lines.back().note = widen_warning(cg_in, cg);
  return r;
}

}  // namespace sdp
