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

#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "sdp/core/field.hpp"
#include "sdp/core/report.hpp"
#include "sdp/stepper/stepper.hpp"

namespace sdp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// S(z) = 4||z||^2 + 5||z_x||^2 + ||z_xx||^2 with spectral derivatives.
double s_functional(const Field& z);

/// ||u||_{L^p}; p = infinity gives max |u|.
double lebesgue_norm(const Field& u, double p);

/// ||f||_{L^r} + ||f_x||_{L^r}.
double sobolev_w1r_norm(const Field& f, double r);

/// Row-major samples U(x_i, c_j) on a rectangle of side lengths
/// (x_length, c_length), periodized for the Fourier proxy.
struct BoxArray {
  std::size_t nx = 0;
  std::size_t nc = 0;
  double x_length = 0.0;
  double c_length = 0.0;
  std::vector<double> values;  // values[i * nc + j]
};

/// Weighted Fourier coefficients of a box array: sqrt(area w) * chat with
/// w = (1 + xi^2 + zeta^2)^-3 and chat the normalized DFT coefficient, so
/// the squared proxy norm is the plain l2 sum.
std::vector<std::complex<double>> h_minus3_coefficients(const BoxArray& u);

/// Periodic Fourier-weight proxy for the H^-3 norm on the box.
double h_minus3_box_norm(const BoxArray& u);

/// U(x, c) = (u(x) - c)^+ on the box [x_lo, x_hi) x {c_j}, with c_j the
/// n_c cell centers of [c_lo, c_hi].
BoxArray positive_part_box(const Field& u, double x_lo, double x_hi,
                           double c_lo, double c_hi, std::size_t n_c);

/// For each delta, sup over sampled theta <= delta of
/// ds * sum_i ||V(t_i + theta) - V(t_i)||^2 over t_i in [0, T - delta),
/// where `spectra[i]` are h_minus3_coefficients at uniformly spaced times.
std::vector<double> time_modulus(
    const std::vector<std::vector<std::complex<double>>>& spectra,
    double sample_dt, const std::vector<double>& deltas);

struct ModulusBox {
  double x_lo = -10.0;
  double x_hi = 10.0;
  double c_lo = -2.0;
  double c_hi = 2.0;
  std::size_t n_c = 64;
  std::size_t sample_stride = 1;  // use every stride-th stored step
};

/// time_modulus of U = (u - c)^+ over a recorded trajectory.
std::vector<double> time_modulus(const Trajectory& traj, const ModulusBox& box,
                                 const std::vector<double>& deltas);

/// W^{1,r} norms of p for r in {1, 2, inf}, ||p_xx||_{L^q} via
/// p_xx = p - (3/2)u^2, and the kernel-constant ratios over ||u||^2_{L^2}.
Report pressure_estimates(const Field& p, const Field& u, double q);

/// Samples ||u||^2_{L^2}, ||u||^{2q}_{L^{2q}}, S(A^-1 u), sup |p|, sup |p_x|
/// and eps-weighted dissipation at its cadence.
class NormObserver : public Observer {
 public:
  NormObserver(double q, double epsilon, std::uint64_t cadence = 1);

  std::uint64_t cadence() const override { return cadence_; }
  void observe(const PathState& state, bool final) override;
  void observe_step(const PathState& before, const PathState& after) override;
  void finish(PathRecord& record) override;

 private:
  double q_;
  double epsilon_;
  std::uint64_t cadence_;
  double dissipation_ = 0.0;        // eps int |u_x|^2 dx dt
  double weighted_dissipation_ = 0.0;  // eps int |u|^{2(q-1)} |u_x|^2 dx dt
  EstimateSeries l2_, l2q_, s_, p_sup_, px_sup_;
};

}  // namespace sdp
