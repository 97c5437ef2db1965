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
#include <functional>
#include <span>
#include <vector>

#include "sdp/core/grid.hpp"

namespace sdp {

/// Real grid function (velocity, pressure, auxiliary potential).
class Field {
 public:
  explicit Field(const Grid1D& grid);
  Field(const Grid1D& grid, std::vector<double> values);
  Field(const Grid1D& grid, double constant);

  template <class F>
  static Field from_function(const Grid1D& grid, F&& f) {
    Field out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out.values_[i] = f(grid.x(i));
    return out;
  }

  const Grid1D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }

  bool all_finite() const noexcept;
  double max_abs() const noexcept;
  double min() const noexcept;
  double max() const noexcept;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);

  friend bool operator==(const Field&, const Field&) = default;

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Periodic rectangle rule dx * sum(values). Throws on non-finite input.
double integrate(const Field& field);
double integrate(const Grid1D& grid, std::span<const double> values);

/// Throws sdp::Error naming `what` if any value is NaN/Inf.
void require_finite(const Field& field, const char* what);

}  // namespace sdp
