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
#include <string>
#include <string_view>

namespace sdp {

enum class Scheme { finite_volume, spectral };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);

/// Velocity-value lattice for the kinetic variable c.
struct CGridSpec {
  double c_min = -2.0;
  double c_max = 2.0;
  std::size_t n_c = 64;
};

struct SolverConfig {
  double epsilon = 1e-3;
  double dt = 1e-3;
  double t_final = 1.0;
  double q = 2.0;
  std::uint64_t seed = 20240101;
  Scheme scheme = Scheme::finite_volume;
  std::size_t noise_modes = 0;
  CGridSpec c_grid{};
  double cfl_safety = 0.9;

  /// Throws sdp::ConfigError on the first violated constraint.
  void validate() const;

  /// Number of steps to reach t_final; t_final must be a multiple of dt
  /// up to 1e-9 relative.
  std::uint64_t step_count() const;
};

}  // namespace sdp
