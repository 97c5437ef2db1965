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

#include "sdp/estimators/estimators.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>

#include "sdp/core/error.hpp"
#include "sdp/helmholtz/elliptic.hpp"
#include "sdp/helmholtz/spectral.hpp"

namespace sdp {

double s_functional(const Field& z) {
  require_finite(z, "s_functional");
  const Field zx = derivative(z, 1);
  const Field zxx = derivative(z, 2);
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    s += 4.0 * z[i] * z[i] + 5.0 * zx[i] * zx[i] + zxx[i] * zxx[i];
  }
  return s * z.grid().dx();
}

double lebesgue_norm(const Field& u, double p) {
  require_finite(u, "lebesgue_norm");
  if (!(p >= 1.0)) throw Error("lebesgue_norm: exponent must be >= 1");
  if (std::isinf(p)) return u.max_abs();
  double s = 0.0;
  if (p == 2.0) {
    for (double v : u.values()) s += v * v;
  } else {
    for (double v : u.values()) s += std::pow(std::abs(v), p);
  }
  return std::pow(s * u.grid().dx(), 1.0 / p);
}

double sobolev_w1r_norm(const Field& f, double r) {
  return lebesgue_norm(f, r) + lebesgue_norm(derivative(f, 1), r);
}

// ---------------------------------------------------------------------------

namespace {

class Plan2D {
 public:
  Plan2D(std::size_t nx, std::size_t nc) : nx_(nx), nc_(nc) {
    std::lock_guard lock(fftw_planner_mutex());
    in_ = fftw_alloc_real(nx * nc);
    out_ = fftw_alloc_complex(nx * (nc / 2 + 1));
    plan_ = fftw_plan_dft_r2c_2d(int(nx), int(nc), in_, out_, FFTW_ESTIMATE);
    if (!plan_) throw Error("fftw 2-D planning failed");
  }
  ~Plan2D() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  Plan2D(const Plan2D&) = delete;
  Plan2D& operator=(const Plan2D&) = delete;

  const fftw_complex* run(const std::vector<double>& values) {
    std::copy(values.begin(), values.end(), in_);
    fftw_execute(plan_);
    return out_;
  }

 private:
  std::size_t nx_, nc_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

Plan2D& plan_2d(std::size_t nx, std::size_t nc) {
  thread_local std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<Plan2D>> cache;
  auto& slot = cache[{nx, nc}];
  if (!slot) slot = std::make_unique<Plan2D>(nx, nc);
  return *slot;
}

double signed_index(std::size_t j, std::size_t n) {
  return j <= n / 2 ? double(j) : double(j) - double(n);
}

}  // namespace

std::vector<std::complex<double>> h_minus3_coefficients(const BoxArray& u) {
  if (u.nx == 0 || u.nc == 0 || u.values.size() != u.nx * u.nc) {
    throw Error("h_minus3_coefficients: box array shape mismatch");
  }
  if (!(u.x_length > 0.0 && u.c_length > 0.0)) {
    throw Error("h_minus3_coefficients: box side lengths must be positive");
  }
  const auto* hat = plan_2d(u.nx, u.nc).run(u.values);
  const std::size_t half = u.nc / 2 + 1;
  const double norm = 1.0 / double(u.nx * u.nc);
  const double area = u.x_length * u.c_length;
  std::vector<std::complex<double>> out(u.nx * half);
  for (std::size_t m = 0; m < u.nx; ++m) {
    const double xi = 2.0 * std::numbers::pi * signed_index(m, u.nx) / u.x_length;
    for (std::size_t l = 0; l < half; ++l) {
      const double zeta = 2.0 * std::numbers::pi * double(l) / u.c_length;
      const double w = std::pow(1.0 + xi * xi + zeta * zeta, -3.0);
      // Columns 0 < l < nc/2 stand for their conjugate twins as well.
      const bool twin = l != 0 && !(u.nc % 2 == 0 && l == u.nc / 2);
      const double scale = std::sqrt(area * w * (twin ? 2.0 : 1.0)) * norm;
      const auto& c = hat[m * half + l];
      out[m * half + l] = {scale * c[0], scale * c[1]};
    }
  }
  return out;
}

double h_minus3_box_norm(const BoxArray& u) {
  double s = 0.0;
  for (const auto& c : h_minus3_coefficients(u)) s += std::norm(c);
  return std::sqrt(s);
}

BoxArray positive_part_box(const Field& u, double x_lo, double x_hi, double c_lo,
                           double c_hi, std::size_t n_c) {
  if (!(x_lo < x_hi) || !(c_lo < c_hi) || n_c < 2) {
    throw Error("positive_part_box: empty box");
  }
  const Grid1D& g = u.grid();
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.x(i) >= x_lo && g.x(i) < x_hi) rows.push_back(i);
  }
  if (rows.empty()) throw Error("positive_part_box: no grid points inside the box");
  const double dc = (c_hi - c_lo) / double(n_c);
  BoxArray box{rows.size(), n_c, double(rows.size()) * g.dx(), c_hi - c_lo, {}};
  box.values.resize(rows.size() * n_c);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double v = u[rows[r]];
    for (std::size_t j = 0; j < n_c; ++j) {
      const double c = c_lo + (double(j) + 0.5) * dc;
      box.values[r * n_c + j] = std::max(v - c, 0.0);
    }
  }
  return box;
}

std::vector<double> time_modulus(
    const std::vector<std::vector<std::complex<double>>>& spectra, double ds,
    const std::vector<double>& deltas) {
  if (!(ds > 0.0)) throw Error("time_modulus: sample spacing must be positive");
  if (spectra.empty()) throw Error("time_modulus: no samples");
  const std::size_t count = spectra.size();
  const double horizon = double(count - 1) * ds;
  double smallest = kInfinity;
  for (double d : deltas) {
    if (!(d >= 0.0) || d > horizon + 1e-12) {
      throw Error("time_modulus: delta outside [0, T]");
    }
    if (d > 0.0) smallest = std::min(smallest, d);
  }
  if (std::isfinite(smallest) && std::floor(smallest / ds + 1e-9) < 3.0) {
    throw Error("time_modulus: insufficient sampling cadence (need >= 4 theta points in [0, delta])");
  }

  std::vector<double> out;
  out.reserve(deltas.size());
  for (double d : deltas) {
    if (d == 0.0) {
      out.push_back(0.0);
      continue;
    }
    const auto jmax = static_cast<std::size_t>(std::floor(d / ds + 1e-9));
    const auto n_starts = static_cast<std::size_t>(std::llround((horizon - d) / ds));
    double best = 0.0;
    for (std::size_t j = 1; j <= jmax; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n_starts && i + j < count; ++i) {
        const auto& a = spectra[i + j];
        const auto& b = spectra[i];
        for (std::size_t m = 0; m < a.size(); ++m) sum += std::norm(a[m] - b[m]);
      }
      best = std::max(best, sum * ds);
    }
    out.push_back(best);
  }
  return out;
}

std::vector<double> time_modulus(const Trajectory& traj, const ModulusBox& box,
                                 const std::vector<double>& deltas) {
  if (traj.u.empty()) throw Error("time_modulus: empty trajectory");
  const std::size_t stride = std::max<std::size_t>(1, box.sample_stride);
  std::vector<std::vector<std::complex<double>>> spectra;
  for (std::size_t i = 0; i < traj.u.size(); i += stride) {
    spectra.push_back(h_minus3_coefficients(
        positive_part_box(traj.u[i], box.x_lo, box.x_hi, box.c_lo, box.c_hi, box.n_c)));
  }
  const double ds = traj.u.size() > 1 ? (traj.times[stride] - traj.times[0]) : traj.dt;
  return time_modulus(spectra, ds, deltas);
}

// ---------------------------------------------------------------------------

Report pressure_estimates(const Field& p, const Field& u, double q) {
  require_finite(p, "pressure_estimates");
  require_finite(u, "pressure_estimates");
  if (!(q > 1.0)) throw Error("pressure_estimates: q must be > 1");
  const Field px = derivative(p, 1);
  Field pxx(p.grid());
  for (std::size_t i = 0; i < p.size(); ++i) pxx[i] = p[i] - 1.5 * u[i] * u[i];

  const double u2 = std::pow(lebesgue_norm(u, 2.0), 2.0);
  auto ratio = [u2](double v) { return u2 > 0.0 ? v / u2 : 0.0; };
  // Kernel constants on the line: sup bounds 3/4, L^1 bounds 3/2, L^r by
  // interpolation; one percent slack.
  auto lr_const = [](double r) {
    return std::isinf(r) ? 0.75 : std::pow(0.75, 1.0 - 1.0 / r) * std::pow(1.5, 1.0 / r);
  };
  constexpr double slack = 1.01;

  Report rep;
  for (double r : {1.0, 2.0, kInfinity}) {
    const std::string tag = std::isinf(r) ? "inf" : std::to_string(int(r));
    const double pn = lebesgue_norm(p, r);
    const double pxn = lebesgue_norm(px, r);
    rep.add("p_w1_" + tag, pn + pxn, kInfinity, true, "||p||_W1," + tag);
    rep.add("p_l" + tag + "_ratio", ratio(pn), slack * lr_const(r),
            ratio(pn) <= slack * lr_const(r), "||p||_L" + tag + " / ||u||^2_L2");
    rep.add("px_l" + tag + "_ratio", ratio(pxn), slack * lr_const(r),
            ratio(pxn) <= slack * lr_const(r), "||p_x||_L" + tag + " / ||u||^2_L2");
  }
  rep.add("pxx_lq", lebesgue_norm(pxx, q), kInfinity, true,
          "||p_xx||_Lq from p - (3/2)u^2");
  return rep;
}

// ---------------------------------------------------------------------------

NormObserver::NormObserver(double q, double epsilon, std::uint64_t cadence)
    : q_(q), epsilon_(epsilon), cadence_(std::max<std::uint64_t>(1, cadence)) {
  l2_.name = "l2_sq";
  l2q_.name = "l2q_pow";
  s_.name = "s_functional";
  p_sup_.name = "p_sup";
  px_sup_.name = "px_sup";
}

void NormObserver::observe(const PathState& s, bool /*final*/) {
  if (!l2_.times.empty() && l2_.times.back() == s.t) return;
  l2_.push(s.t, std::pow(lebesgue_norm(s.u, 2.0), 2.0));
  l2q_.push(s.t, std::pow(lebesgue_norm(s.u, 2.0 * q_), 2.0 * q_));
  s_.push(s.t, s_functional(a_inverse(s.u)));
  p_sup_.push(s.t, s.p.max_abs());
  px_sup_.push(s.t, s.dpdx.max_abs());
}

void NormObserver::observe_step(const PathState& before, const PathState& after) {
  if (epsilon_ == 0.0) return;
  const double dt = after.t - before.t;
  const Field ux = derivative(before.u, 1);
  double plain = 0.0, weighted = 0.0;
  for (std::size_t i = 0; i < ux.size(); ++i) {
    const double g = ux[i] * ux[i];
    plain += g;
    weighted += std::pow(std::abs(before.u[i]), 2.0 * (q_ - 1.0)) * g;
  }
  const double scale = epsilon_ * dt * before.u.grid().dx();
  dissipation_ += scale * plain;
  weighted_dissipation_ += scale * weighted;
}

void NormObserver::finish(PathRecord& record) {
  for (auto* s : {&l2_, &l2q_, &s_, &p_sup_, &px_sup_}) {
    s->path_id = record.path_id;
    record.scalars["sup_" + s->name] = s->sup();
    record.series[s->name] = *s;
  }
  record.scalars["dissipation"] = dissipation_;
  record.scalars["weighted_dissipation"] = weighted_dissipation_;
}

}  // namespace sdp
