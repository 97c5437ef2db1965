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

namespace sdp {

/// Uniform periodic grid on [-L, L) with x_i = -L + i*dx.
///
/// The point count is a power of two (>= 16) so that every spectral
/// transform has a radix-2 size, and dx = 2L/n is exact in binary.
class Grid1D {
 public:
  Grid1D(std::size_t n_points, double half_width);

  std::size_t size() const noexcept { return n_; }
  double half_width() const noexcept { return half_width_; }
  double length() const noexcept { return 2.0 * half_width_; }
  double dx() const noexcept { return dx_; }
  double x(std::size_t i) const noexcept {
    return -half_width_ + static_cast<double>(i) * dx_;
  }
  bool periodic() const noexcept { return true; }

  /// Angular wavenumber of DFT index j (0 <= j <= n/2).
  double wavenumber(std::size_t j) const noexcept;

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  std::size_t n_;
  double half_width_;
  double dx_;
};

Grid1D build_grid(std::size_t n_points, double half_width);

}  // namespace sdp
