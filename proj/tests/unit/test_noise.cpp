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
#include <thread>

#include "doctest.h"
#include "sdp/core/error.hpp"
#include "sdp/core/grid.hpp"
#include "sdp/noise/noise.hpp"

using namespace sdp;

namespace {
double sup_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
}  // namespace

TEST_CASE("sigma_apply examples") {
  const auto g = build_grid(64, std::numbers::pi);
  const auto lin = NoiseModel::linear();
  CHECK(sigma_apply(lin, 0, Field(g)).max_abs() == 0.0);
  const auto c = Field::from_function(g, [](double x) { return std::cos(x); });
  CHECK(sup_diff(sigma_apply(lin, 0, c), c) == 0.0);

  const auto modal = NoiseModel::modal(std::numbers::pi, {0.5, 0.0, 0.1}, 1.0);
  CHECK(sigma_apply(modal, 1, c).max_abs() == 0.0);
  CHECK_THROWS_AS(sigma_apply(modal, 3, c), Error);
  // k = 2 profile cos(2x)/sqrt(5).
  const auto s2 = sigma_apply(modal, 2, Field(g, 1.0));
  CHECK(std::abs(s2[32] - 0.1 / std::sqrt(5.0)) < 1e-15);
}

TEST_CASE("modal factory checks the declared sum") {
  const auto m = NoiseModel::modal_geometric(20.0, 4, 0.5, 1.0);
  CHECK(m.modes() == 4);
  CHECK(m.amplitude(3) == 0.0625);
  const double expect = 0.25 * (1.0 + 0.25 / 2 + 0.0625 / 5 + 0.015625 / 10);
  CHECK(m.declared_sum() == doctest::Approx(expect).epsilon(1e-14));
  CHECK_THROWS_AS(NoiseModel::modal(20.0, {1.2}, 1.0), ConfigError);
  CHECK_NOTHROW(NoiseModel::modal_unchecked(20.0, {1.2}, 1.0));
}

TEST_CASE("noise_increment examples") {
  const auto g = build_grid(32, 1.0);
  const auto lin = NoiseModel::linear();
  CHECK(noise_increment(lin, std::vector<double>{0.0}, Field(g, 3.0)).max_abs() == 0.0);
  const auto inc = noise_increment(lin, std::vector<double>{0.1}, Field(g, 1.0));
  CHECK(sup_diff(inc, Field(g, 0.1)) == 0.0);
  CHECK_THROWS_AS(noise_increment(lin, std::vector<double>{0.1, 0.2}, Field(g, 1.0)), Error);

  WienerPath w({1, 0}, 1, 1e-3);
  CHECK_THROWS_AS(noise_increment(lin, w, Field(g, 1.0), 2e-3), Error);
}

TEST_CASE("increment variance equals C0 dt") {
  const auto g = build_grid(16, 1.0);
  const auto lin = NoiseModel::linear();
  const double dt = 1e-3;
  WienerPath w({20240101, 5}, 1, dt);
  const int n = 100000;
  double s1 = 0.0, s2 = 0.0;
  const Field one(g, 1.0);
  for (int i = 0; i < n; ++i) {
    const double v = noise_increment(lin, w, one, dt)[7];
    s1 += v;
    s2 += v * v;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  const double se = lin.c0() * dt * std::sqrt(2.0 / n);
  CHECK(std::abs(var - lin.c0() * dt) < 3.0 * se);
}

TEST_CASE("modal increment variance matches sigma^2 dt pointwise") {
  const auto g = build_grid(16, 4.0);
  const auto m = NoiseModel::modal_geometric(4.0, 3, 0.8, 1.0);
  const double dt = 1e-2;
  WienerPath w({99, 1}, 3, dt);
  const int n = 40000;
  std::vector<double> s2(16, 0.0);
  const Field one(g, 1.0);
  for (int i = 0; i < n; ++i) {
    const auto inc = noise_increment(m, w, one, dt);
    for (std::size_t j = 0; j < 16; ++j) s2[j] += inc[j] * inc[j];
  }
  for (std::size_t j = 0; j < 16; j += 5) {
    const double expect = m.sigma_squared(g.x(j), 1.0) * dt;
    CHECK(std::abs(s2[j] / n - expect) < 4.0 * expect * std::sqrt(2.0 / n));
  }
}

TEST_CASE("Wiener paths are reproducible and schedule independent") {
  auto draw = [](std::uint64_t path) {
    WienerPath w({77, path}, 3, 0.01);
    std::vector<double> out;
    for (int i = 0; i < 200; ++i) {
      const auto& dw = w.next_increments();
      out.insert(out.end(), dw.begin(), dw.end());
    }
    return out;
  };
  const auto a = draw(4);
  std::vector<double> b;
  std::thread t([&] { b = draw(4); });
  t.join();
  CHECK(a == b);
  CHECK(a != draw(5));

  // Modes on one path are independent streams.
  WienerPath w({77, 4}, 3, 0.01);
  const auto& dw = w.next_increments();
  CHECK(dw[0] != dw[1]);
  CHECK(dw[1] != dw[2]);
}

TEST_CASE("aggregated increments reproduce the fine Brownian path") {
  const double h = 1e-3;
  WienerPath fine({5, 2}, 2, h, 1);
  WienerPath coarse({5, 2}, 2, 2 * h, 2);
  for (int step = 0; step < 50; ++step) {
    std::vector<double> sum(2, 0.0);
    for (int j = 0; j < 2; ++j) {
      const auto& d = fine.next_increments();
      for (int k = 0; k < 2; ++k) sum[k] += d[k];
    }
    const auto& c = coarse.next_increments();
    for (int k = 0; k < 2; ++k) CHECK(c[k] == doctest::Approx(sum[k]).epsilon(1e-14));
  }
  for (int k = 0; k < 2; ++k) {
    CHECK(coarse.accumulated()[k] == doctest::Approx(fine.accumulated()[k]).epsilon(1e-12));
  }
}

TEST_CASE("cursor restore resumes the same stream") {
  WienerPath a({3, 1}, 2, 0.01);
  for (int i = 0; i < 10; ++i) a.next_increments();
  const auto cursor = a.cursor();
  const auto w = a.accumulated();
  const auto next = a.next_increments();

  WienerPath b({3, 1}, 2, 0.01);
  b.restore(cursor, w);
  CHECK(b.next_increments() == next);
  CHECK(b.accumulated() == a.accumulated());

  WienerPath c({4, 1}, 2, 0.01);
  CHECK_THROWS_AS(c.restore(cursor, w), Error);
}

TEST_CASE("validate_assumptions: linear family") {
  const auto g = build_grid(256, 20.0);
  const std::vector<Field> probes = {
      Field::from_function(g, [](double x) { return std::exp(-std::abs(x)); }),
      Field::from_function(g, [](double x) { return std::cos(x) * std::exp(-0.1 * x * x); })};
  const auto r = validate_assumptions(NoiseModel::linear(), probes);
  CHECK(r.all_pass());
  CHECK(r.find("growth_bound")->measured == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.find("a_inverse_bound")->measured == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.find("lp_growth_s1")->measured == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.find("lp_growth_sq")->measured == doctest::Approx(1.0).epsilon(1e-12));

  const auto r2 = validate_assumptions(NoiseModel::linear(0.3), probes);
  CHECK(r2.all_pass());
  CHECK(r2.find("a_inverse_bound")->measured == doctest::Approx(0.09).epsilon(1e-12));
}

TEST_CASE("validate_assumptions: modal family with margin") {
  // Two modes with sum a_k^2 sup g_k^2 = 0.5 + 0.4 = 0.9.
  const double a1 = std::sqrt(0.4 * 2.0);
  const auto m = NoiseModel::modal(20.0, {std::sqrt(0.5), a1}, 1.0);
  CHECK(m.declared_sum() == doctest::Approx(0.9).epsilon(1e-14));
  const auto r = validate_assumptions(m, {});
  CHECK(r.all_pass());
  const auto* growth = r.find("growth_bound");
  CHECK(growth->measured <= 0.9 + 1e-12);
  CHECK(growth->bound - growth->measured >= 0.1 - 1e-12);
}

TEST_CASE("validate_assumptions: failures are named") {
  const auto unbounded = NoiseModel::custom(
      {1.0}, [](std::size_t, double x) { return x; }, {1.0}, {1.0}, 1.0);
  const auto r = validate_assumptions(unbounded, {});
  CHECK_FALSE(r.all_pass());
  CHECK_FALSE(r.find("growth_bound")->pass);

  const auto low = NoiseModel::modal_unchecked(20.0, {1.0, 0.5}, 0.5);
  const auto r2 = validate_assumptions(low, {});
  CHECK_FALSE(r2.find("growth_bound")->pass);
}
