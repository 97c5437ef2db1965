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

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sdp/core/error.hpp"
#include "sdp/core/rng.hpp"
#include "sdp/stepper/stepper.hpp"

namespace sdp {
namespace {

struct Call {
  std::string name;
  std::vector<double> args;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

Call parse_call(const std::string& raw) {
  const std::string spec = trim(raw);
  const auto open = spec.find('(');
  if (open == std::string::npos || spec.back() != ')') {
    throw ConfigError("preset", "malformed preset '" + raw + "', expected name(args)");
  }
  Call call{trim(spec.substr(0, open)), {}};
  std::stringstream body(spec.substr(open + 1, spec.size() - open - 2));
  std::string item;
  while (std::getline(body, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) {
      throw ConfigError("preset", "preset argument '" + item + "' is not a number");
    }
    call.args.push_back(v);
  }
  return call;
}

void expect_args(const Call& c, std::size_t n) {
  if (c.args.size() != n) {
    throw ConfigError("preset", "preset " + c.name + " takes " + std::to_string(n) +
                                    " arguments, got " + std::to_string(c.args.size()));
  }
}

}  // namespace

Field make_preset(const std::string& spec, const Grid1D& grid) {
  const Call c = parse_call(spec);
  if (c.name == "peakon") {
    expect_args(c, 1);
    const double amp = c.args[0];
    return Field::from_function(grid, [amp](double x) { return amp * std::exp(-std::abs(x)); });
  }
  if (c.name == "antipeakon_pair") {
    expect_args(c, 2);
    const double amp = c.args[0], x0 = c.args[1];
    return Field::from_function(grid, [=](double x) {
      return amp * (std::exp(-std::abs(x + x0)) - std::exp(-std::abs(x - x0)));
    });
  }
  if (c.name == "gaussian") {
    expect_args(c, 2);
    const double amp = c.args[0], width = c.args[1];
    if (!(width > 0.0)) throw ConfigError("preset", "gaussian width must be positive");
    return Field::from_function(grid, [=](double x) {
      const double s = x / width;
      return amp * std::exp(-s * s);
    });
  }
  if (c.name == "random_lowpass") {
    expect_args(c, 3);
    const double amp = c.args[0];
    const auto kmax = static_cast<std::size_t>(c.args[1]);
    const auto seed = static_cast<std::uint64_t>(c.args[2]);
    if (kmax < 1 || double(kmax) != c.args[1] || kmax >= grid.size() / 3) {
      throw ConfigError("preset", "random_lowpass kmax must be an integer in [1, n/3)");
    }
    // Random harmonics j = 1..kmax of the periodic box, scaled to max |u| = amp.
    const StreamId id{seed, 0, 0};
    std::vector<double> a(kmax + 1), b(kmax + 1);
    for (std::size_t j = 1; j <= kmax; ++j) {
      a[j] = stream_normal(id, 2 * j);
      b[j] = stream_normal(id, 2 * j + 1);
    }
    const double kappa = std::numbers::pi / grid.half_width();
    Field u = Field::from_function(grid, [&](double x) {
      double s = 0.0;
      for (std::size_t j = 1; j <= kmax; ++j) {
        s += a[j] * std::cos(double(j) * kappa * x) + b[j] * std::sin(double(j) * kappa * x);
      }
      return s;
    });
    const double peak = u.max_abs();
    if (peak > 0.0) u *= amp / peak;
    return u;
  }
  throw ConfigError("preset", "unknown preset '" + c.name + "'");
}

}  // namespace sdp
