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

#include <optional>
#include <string>

#include "sdp/core/field.hpp"

namespace sdp {

enum class Dealias { none, two_thirds };

/// The constant-coefficient operator (a - d^2/dx^2) on the periodic grid.
class EllipticOperator {
 public:
  EllipticOperator(double shift, const Grid1D& grid);

  /// a = 1: the pressure operator.
  static EllipticOperator pressure(const Grid1D& grid) { return {1.0, grid}; }
  /// a = 4: the operator A used for the auxiliary potential z = A^{-1} u.
  static EllipticOperator a_operator(const Grid1D& grid) { return {4.0, grid}; }

  double shift() const noexcept { return shift_; }
  const Grid1D& grid() const noexcept { return grid_; }
  double symbol(double k) const noexcept { return shift_ + k * k; }

 private:
  double shift_;
  Grid1D grid_;
};

Field invert(const EllipticOperator& op, const Field& rhs);
Field apply_forward(const EllipticOperator& op, const Field& f);

/// p = (1 - d_xx)^{-1}(3/2 u^2). With Dealias::two_thirds both u and u^2
/// are truncated to |j| <= n/3 (the spectral-scheme path).
Field pressure(const Field& u, Dealias dealias = Dealias::none);

/// p and dp/dx from one forward transform.
struct PressurePair {
  Field p;
  Field dpdx;
};
PressurePair pressure_with_gradient(const Field& u,
                                    Dealias dealias = Dealias::none);

/// z = A^{-1} u with A = 4 - d_xx.
Field a_inverse(const Field& u);

/// Spectral derivative of order 1 or 2. The Nyquist mode is dropped for
/// odd orders.
Field derivative(const Field& f, int order);

/// Band-limit to |j| <= n/3.
Field truncate_two_thirds(const Field& f);

struct KernelOracleResult {
  Field value;
  double boundary_level = 0.0;  // max |input| over the outermost points
  std::optional<std::string> warning;
};

/// Line-kernel convolution g = G_a * rhs with G_a(s) = exp(-sqrt(a)|s|) /
/// (2 sqrt(a)), evaluated by product quadrature in real space with the
/// input treated as zero outside [-L, L). Independent of the FFT path.
KernelOracleResult kernel_convolution_oracle(double shift, const Field& rhs,
                                             double decay_threshold = 1e-8);

/// (3/4) \int u^2(y) e^{-|x-y|} dy by direct quadrature. Warns (does not
/// fail) when |u| near +-L exceeds `decay_threshold`.
KernelOracleResult kernel_pressure_oracle(const Field& u,
                                          double decay_threshold = 1e-8);

/// (1/4) \int u(y) e^{-2|x-y|} dy, the normalized Green function of A.
KernelOracleResult kernel_a_inverse_oracle(const Field& u,
                                           double decay_threshold = 1e-8);

}  // namespace sdp
