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
#include <functional>
#include <string>
#include <vector>

#include "sdp/core/field.hpp"
#include "sdp/core/report.hpp"
#include "sdp/core/snapshot.hpp"

namespace sdp {

enum class NoiseFamily { none, linear, modal, custom };

std::string to_string(NoiseFamily f);

/// Multiplicative coefficients sigma_k(x, v) = a_k * g_k(x) * v over K
/// modes, with the constants used by the structural assumptions.
class NoiseModel {
 public:
  using Profile = std::function<double(std::size_t k, double x)>;
  using Modulus = std::function<double(double r)>;

  static NoiseModel none();
  /// sigma(v) = a0 * v on one mode; C0 = a0^2.
  static NoiseModel linear(double a0 = 1.0);
  /// g_k(x) = cos(k pi x / L) / sqrt(1 + k^2), modes k = 0..K-1.
  /// Throws ConfigError unless sum_k a_k^2 sup g_k^2 <= C0.
  static NoiseModel modal(double half_width, std::vector<double> amplitudes,
                          double c0);
  /// modal() with a_k = a0 * 2^-k.
  static NoiseModel modal_geometric(double half_width, std::size_t modes,
                                    double a0, double c0);
  /// modal() without the C0 check, for exercising the validator.
  static NoiseModel modal_unchecked(double half_width,
                                    std::vector<double> amplitudes, double c0);
  /// Arbitrary profiles with declared sup|g_k| and Lipschitz constants.
  /// Nothing is checked; validate_assumptions probes them.
  static NoiseModel custom(std::vector<double> amplitudes, Profile profile,
                           std::vector<double> profile_sup,
                           std::vector<double> profile_lipschitz, double c0);

  NoiseFamily family() const noexcept { return family_; }
  std::size_t modes() const noexcept { return amplitudes_.size(); }
  double amplitude(std::size_t k) const;
  double profile(std::size_t k, double x) const;
  double profile_sup(std::size_t k) const { return sup_.at(k); }
  double profile_lipschitz(std::size_t k) const { return lip_.at(k); }
  double c0() const noexcept { return c0_; }
  double half_width() const noexcept { return half_width_; }

  /// Modulus h in the Lipschitz-type condition; defaults to h(r) = r.
  double h(double r) const { return h_(r); }
  NoiseModel with_modulus(Modulus h) const;

  double sigma(std::size_t k, double x, double v) const;
  /// sum_k sigma_k^2(x, v).
  double sigma_squared(double x, double v) const;
  /// sum_k a_k^2 sup g_k^2 from the declared sups.
  double declared_sum() const;

 private:
  NoiseFamily family_ = NoiseFamily::none;
  std::vector<double> amplitudes_;
  std::vector<double> sup_;
  std::vector<double> lip_;
  Profile profile_;
  Modulus h_ = [](double r) { return r; };
  double c0_ = 0.0;
  double half_width_ = 0.0;
};

/// Pointwise sigma_k(x_i, u_i).
Field sigma_apply(const NoiseModel& model, std::size_t k, const Field& u);

/// Per-mode g_k(x_i) tables for one grid.
std::vector<std::vector<double>> profile_table(const NoiseModel& model,
                                               const Grid1D& grid);

struct SeedLineage {
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
};

/// Brownian increments for K modes on a fixed step dt.
///
/// Each coarse increment is the sum of `aggregation` fine normals scaled by
/// sqrt(dt / aggregation), so a run at dt and one at dt/a with aggregation
/// 1 see the same Brownian path.
class WienerPath {
 public:
  WienerPath(SeedLineage lineage, std::size_t modes, double dt,
             std::uint32_t aggregation = 1);

  const std::vector<double>& next_increments();
  const std::vector<double>& last_increments() const noexcept { return dw_; }
  const std::vector<double>& accumulated() const noexcept { return w_; }
  std::size_t modes() const noexcept { return modes_; }
  double dt() const noexcept { return dt_; }
  std::uint64_t steps_taken() const noexcept { return step_; }
  SeedLineage lineage() const noexcept { return lineage_; }

  /// (seed, path, next fine normal index, aggregation).
  RngCursor cursor() const;
  /// Resume from a cursor and accumulated values; throws on lineage or
  /// aggregation mismatch.
  void restore(const RngCursor& cursor, std::vector<double> accumulated);

 private:
  SeedLineage lineage_;
  std::size_t modes_;
  double dt_;
  std::uint32_t aggregation_;
  std::uint64_t step_ = 0;
  std::vector<double> dw_;
  std::vector<double> w_;
};

/// sum_k sigma_k(., u) * dW_k.
Field noise_increment(const NoiseModel& model, const std::vector<double>& dw,
                      const Field& u);
/// Draws the next increments from `path` (whose dt must equal `dt`).
Field noise_increment(const NoiseModel& model, WienerPath& path,
                      const Field& u, double dt);

struct AssumptionOptions {
  double q = 2.0;
  std::size_t random_tuples = 20000;
  std::uint64_t seed = 7;
  double tolerance = 1e-9;
};

/// Evaluates each structural inequality on the probe fields and on random
/// (x, v, y, u) tuples. One report line per inequality; the measured value
/// is the worst ratio, the bound is the declared constant.
Report validate_assumptions(const NoiseModel& model,
                            const std::vector<Field>& probes,
                            const AssumptionOptions& options = {});

}  // namespace sdp
