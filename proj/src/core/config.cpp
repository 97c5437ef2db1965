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

#include "sdp/core/config.hpp"

#include <cmath>

#include "sdp/core/error.hpp"

namespace sdp {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::finite_volume:
      return "finite_volume";
    case Scheme::spectral:
      return "spectral";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "finite_volume") return Scheme::finite_volume;
  if (name == "spectral") return Scheme::spectral;
  throw ConfigError("scheme", "unknown scheme '" + std::string(name) + "'");
}

void SolverConfig::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw ConfigError("epsilon", "epsilon must be >= 0");
  if (!(dt > 0.0)) throw ConfigError("dt_seconds", "dt must be > 0");
  if (!(t_final > 0.0)) throw ConfigError("t_final_seconds", "T must be > 0");
  if (!(q > 1.0)) throw ConfigError("q_exponent", "q must be > 1");
  if (!(c_grid.c_min < c_grid.c_max))
    throw ConfigError("c_min", "c_min must be < c_max");
  if (c_grid.n_c < 8) throw ConfigError("c_bins", "n_c must be >= 8");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
    throw ConfigError("cfl_safety", "cfl_safety must lie in (0, 1]");
  (void)step_count();
}

std::uint64_t SolverConfig::step_count() const {
  const double ratio = t_final / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError("dt_seconds", "t_final must be an integer multiple of dt");
  }
  return static_cast<std::uint64_t>(rounded);
}

}  // namespace sdp
