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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdp/core/config.hpp"
#include "sdp/core/field.hpp"
#include "sdp/core/report.hpp"
#include "sdp/noise/noise.hpp"
#include "sdp/stepper/stepper.hpp"

namespace sdp {

/// Uniform lattice of n_c bins on [c_min, c_max] for the kinetic variable.
class CGrid {
 public:
  CGrid(double c_min, double c_max, std::size_t n_c);
  explicit CGrid(const CGridSpec& spec) : CGrid(spec.c_min, spec.c_max, spec.n_c) {}

  double c_min() const noexcept { return c_min_; }
  double c_max() const noexcept { return c_min_ + double(n_) * dc_; }
  std::size_t size() const noexcept { return n_; }
  double dc() const noexcept { return dc_; }
  double center(std::size_t j) const noexcept { return c_min_ + (double(j) + 0.5) * dc_; }

  /// True when [c_min, c_max] contains [lo - 2dc, hi + 2dc].
  bool covers(double lo, double hi) const noexcept;
  /// Smallest extension by whole bins on each side that covers [lo, hi].
  CGrid widened_to(double lo, double hi) const;
  /// Bins added below c_min by widened_to (for re-indexing).
  std::size_t offset_in(const CGrid& wider) const;

  friend bool operator==(const CGrid&, const CGrid&) = default;

 private:
  double c_min_;
  std::size_t n_;
  double dc_;
};

/// Values over the (x, c) lattice, row-major in x.
struct KineticArray {
  CGrid c;
  std::size_t nx = 0;
  std::vector<double> values;  // values[i * c.size() + j]
  std::optional<std::string> warning;  // set when c had to be widened

  double at(std::size_t i, std::size_t j) const { return values[i * c.size() + j]; }
};

/// f(x, c_j) = 1 if u(x) >= c_j else 0 at bin centers.
KineticArray kinetic_function(const Field& u, const CGrid& cg);

/// Unit hat deposit per x at c = u(x), stored as a density (sum nu dc = 1).
KineticArray young_measure(const Field& u, const CGrid& cg);

/// Hat deposit of eps |u_x|^2 dt dx per cell, stored as mass, so the total
/// equals eps dt ||u_x||^2_{L^2}.
KineticArray defect_measure(const Field& u, double epsilon, const CGrid& cg, double dt);

/// Accumulates the defect measure over a run and the weighted moment
/// int |c|^{2(q-1)} dm.
class DefectObserver : public Observer {
 public:
  DefectObserver(double epsilon, const CGrid& cg, double q = 2.0);

  void observe(const PathState&, bool) override {}
  void observe_step(const PathState& before, const PathState& after) override;
  void finish(PathRecord& record) override;

  const KineticArray& histogram() const noexcept { return m_; }
  double total_mass() const noexcept;

 private:
  double epsilon_;
  double q_;
  KineticArray m_;
  std::vector<std::string> warnings_;
};

/// Midpoint-rule reconstruction of |u|^p from f:
/// sum_{c>0} f p c^{p-1} dc + sum_{c<0} (1-f) p |c|^{p-1} dc, one value per x.
std::vector<double> moment_reconstruction(const KineticArray& f, double p);

/// phi(t, x, c) = sign * alpha(t) beta(x) gamma(c), each factor the
/// profile b(s) = (1 - s^2)^4 on |s| < 1 at its own center and radius.
struct TensorBump {
  double t0 = 0.5, rt = 0.5;
  double x0 = 0.0, rx = 1.0;
  double c0 = 0.0, rc = 1.0;
  double sign = 1.0;

  double alpha(double t) const;
  double beta(double x, int derivative = 0) const;
  double gamma(double c, int derivative = 0) const;
  /// M_j(v) = int_{-inf}^v c^j gamma(c) dc for j = 0, 1, 2 (exact).
  double moment(int j, double v) const;
};

struct BumpRanges {
  std::array<double, 2> t_center{0.3, 0.7};
  std::array<double, 2> t_radius{0.25, 0.7};
  std::array<double, 2> x_center{-1.0, 1.0};
  std::array<double, 2> x_radius{0.5, 2.0};
  std::array<double, 2> c_center{-0.5, 0.5};
  std::array<double, 2> c_radius{0.3, 0.8};
};

/// Seeded catalog of `count` bumps with alpha(T) = 0 (t0 + rt <= T). The
/// time ranges are fractions of T.
std::vector<TensorBump> bump_catalog(std::uint64_t seed, std::size_t count,
                                     double t_final, const BumpRanges& ranges = {});

/// Signed terms of the discretized weak kinetic equation for one phi.
struct ResidualTerms {
  double time = 0.0;
  double initial = 0.0;
  double flux = 0.0;
  double pressure = 0.0;
  double viscous = 0.0;
  double stochastic = 0.0;
  double ito = 0.0;
  double defect = 0.0;

  double total() const;
  double scale() const;
};

enum class CRoute {
  exact,    // c-integrals from the polynomial moments of gamma
  lattice,  // f and hat-deposited nu on the c lattice, midpoint rule
};

struct AuditInput {
  const Trajectory* trajectory = nullptr;
  const NoiseModel* noise = nullptr;
  double epsilon = 0.0;
  double solver_dt = 0.0;  // checked against the trajectory spacing
};

/// Residual of the weak kinetic transport equation with left-point (Ito)
/// sums, one entry per test function.
std::vector<ResidualTerms> transport_residuals(const AuditInput& in,
                                               const std::vector<TensorBump>& phis,
                                               CRoute route = CRoute::exact,
                                               const CGrid* lattice = nullptr);
double transport_residual(const AuditInput& in, const TensorBump& phi);

/// Terms of the entropy inequality for one psi >= 0.
struct EntropyTerms {
  double time = 0.0;
  double initial = 0.0;
  double flux = 0.0;
  double pressure = 0.0;
  double stochastic = 0.0;
  double ito = 0.0;
  double viscous = 0.0;  // eps (|u-c|^+, psi_xx); reported, not summed

  double value() const;
  double scale() const;
};

/// Quadrature of the Ito correction int 1/2 sigma^2 sign^+(u - c) d_c psi dt.
enum class ItoQuadrature {
  expected,  // sigma^2(u_n) dt
  realized,  // (sigma(u_n) dW_n)^2, the realized quadratic variation
};
struct EntropyOptions {
  bool allow_signed = false;  // accept sign < 0 (used to exercise failure paths)
  ItoQuadrature ito = ItoQuadrature::expected;
};

std::vector<EntropyTerms> entropy_audit(const AuditInput& in,
                                        const std::vector<TensorBump>& psis,
                                        const EntropyOptions& options = {});

/// Binary f, staircase positive-part reconstruction within dc, hat
/// centroid within dc/2 and unit mass, at every stored time.
Report limit_identity_check(const Trajectory& traj, const CGrid& cg);

}  // namespace sdp
