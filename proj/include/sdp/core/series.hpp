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

#include <cstdint>
#include <string>
#include <vector>

namespace sdp {

/// A named scalar time series sampled along one path.
struct EstimateSeries {
  std::string name;
  std::uint64_t path_id = 0;
  std::vector<double> times;
  std::vector<double> values;

  void push(double t, double v);
  double sup() const;
  double last() const;
};

}  // namespace sdp
