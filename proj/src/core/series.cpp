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

#include "sdp/core/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdp/core/error.hpp"

namespace sdp {

void EstimateSeries::push(double t, double v) {
  if (!times.empty() && !(t > times.back())) {
    throw Error("series '" + name + "': sample times must increase");
  }
  if (!std::isfinite(v)) {
    throw Error("series '" + name + "': non-finite value");
  }
  times.push_back(t);
  values.push_back(v);
}

double EstimateSeries::sup() const {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::max_element(values.begin(), values.end());
}

double EstimateSeries::last() const {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return values.back();
}

}  // namespace sdp
