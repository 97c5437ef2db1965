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

#include "sdp/core/grid.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "sdp/core/error.hpp"

namespace sdp {

Grid1D::Grid1D(std::size_t n_points, double half_width)
    : n_(n_points), half_width_(half_width) {
  if (n_points < 16 || !std::has_single_bit(n_points)) {
    throw Error("n_points must be a power of two (>= 16), got " +
                std::to_string(n_points));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw Error("half_width must be positive");
  }
  dx_ = 2.0 * half_width_ / static_cast<double>(n_);
}

double Grid1D::wavenumber(std::size_t j) const noexcept {
  return std::numbers::pi * static_cast<double>(j) / half_width_;
}

Grid1D build_grid(std::size_t n_points, double half_width) {
  return Grid1D(n_points, half_width);
}

}  // namespace sdp
