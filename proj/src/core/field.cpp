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

#include "sdp/core/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdp/core/error.hpp"

namespace sdp {

Field::Field(const Grid1D& grid) : grid_(grid), values_(grid.size(), 0.0) {}

Field::Field(const Grid1D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error("field length does not match grid size");
  }
}

Field::Field(const Grid1D& grid, double constant)
    : grid_(grid), values_(grid.size(), constant) {}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Field::min() const noexcept {
  return *std::min_element(values_.begin(), values_.end());
}

double Field::max() const noexcept {
  return *std::max_element(values_.begin(), values_.end());
}

Field& Field::operator+=(const Field& o) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

double integrate(const Grid1D& grid, std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw Error("integrate: non-finite value");
    sum += v;
  }
  return grid.dx() * sum;
}

double integrate(const Field& field) {
  return integrate(field.grid(), field.values());
}

void require_finite(const Field& field, const char* what) {
  if (!field.all_finite()) {
    throw Error(std::string(what) + ": field contains NaN or Inf");
  }
}

}  // namespace sdp
