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
#include <random>

#include "doctest.h"
#include "sdp/core/grid.hpp"
#include "sdp/helmholtz/elliptic.hpp"
#include "sdp/helmholtz/spectral.hpp"

using namespace sdp;

namespace {

double sup_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Random trigonometric polynomial with |j| <= jmax on the grid's period.
Field random_band_limited(const Grid1D& g, std::mt19937_64& rng, int jmax) {
  std::normal_distribution<double> nd;
  std::vector<double> a(jmax + 1), b(jmax + 1);
  for (int j = 0; j <= jmax; ++j) {
    a[j] = nd(rng) / (1.0 + j);
    b[j] = nd(rng) / (1.0 + j);
  }
  const double kappa = std::numbers::pi / g.half_width();
  return Field::from_function(g, [&](double x) {
    double s = 0.0;
    for (int j = 0; j <= jmax; ++j) s += a[j] * std::cos(j * kappa * x) + b[j] * std::sin(j * kappa * x);
    return s;
  });
}

// Independent direct DFT of a grid function at index j.
Complex direct_dft(const Field& f, std::size_t j) {
  const std::size_t n = f.size();
  Complex s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += f[i] * std::polar(1.0, -2.0 * std::numbers::pi * double(i * j % n) / double(n));
  }
  return s;
}

}  // namespace

TEST_CASE("fft matches a direct DFT and inverts") {
  const auto g = build_grid(64, 2.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ud(-1, 1);
  Field f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = ud(rng);
  auto& fft = spectral_workspace(64);
  std::vector<Complex> hat(fft.modes());
  fft.forward(f.values(), hat);
  for (std::size_t j = 0; j < hat.size(); ++j) CHECK(std::abs(hat[j] - direct_dft(f, j)) < 1e-12);
  Field back(g);
  fft.inverse(hat, back.values());
  CHECK(sup_diff(back, f) < 1e-14);
}

TEST_CASE("invert examples") {
  const auto g = build_grid(64, std::numbers::pi);
  const auto a = EllipticOperator::a_operator(g);
  const auto p = EllipticOperator::pressure(g);
  CHECK(invert(a, Field(g)).max_abs() == 0.0);

  const auto cosx = Field::from_function(g, [](double x) { return std::cos(x); });
  const auto expect = Field::from_function(g, [](double x) { return std::cos(x) / 5.0; });
  CHECK(sup_diff(invert(a, cosx), expect) < 1e-14);

  const Field c(g, 2.75);
  CHECK(sup_diff(invert(p, c), c) < 1e-14);
}

TEST_CASE("pressure examples") {
  const auto g = build_grid(128, std::numbers::pi);
  CHECK(pressure(Field(g)).max_abs() == 0.0);
  const auto u = Field::from_function(g, [](double x) { return std::cos(x); });
  const auto expect = Field::from_function(g, [](double x) { return 0.75 + 0.15 * std::cos(2 * x); });
  CHECK(sup_diff(pressure(u), expect) < 1e-13);
  CHECK(sup_diff(pressure(u, Dealias::two_thirds), expect) < 1e-13);
  CHECK(sup_diff(pressure(Field(g, 2.0)), Field(g, 6.0)) < 1e-13);

  const auto pair = pressure_with_gradient(u);
  const auto dexpect = Field::from_function(g, [](double x) { return -0.3 * std::sin(2 * x); });
  CHECK(sup_diff(pair.dpdx, dexpect) < 1e-13);
}

TEST_CASE("a_inverse examples") {
  const auto g = build_grid(64, std::numbers::pi);
  CHECK(a_inverse(Field(g)).max_abs() == 0.0);
  CHECK(sup_diff(a_inverse(Field(g, 4.0)), Field(g, 1.0)) < 1e-14);
  const auto u = Field::from_function(g, [](double x) { return std::cos(2 * x); });
  const auto expect = Field::from_function(g, [](double x) { return std::cos(2 * x) / 8.0; });
  CHECK(sup_diff(a_inverse(u), expect) < 1e-14);
}

TEST_CASE("derivative examples") {
  const auto g = build_grid(64, std::numbers::pi);
  const auto s = Field::from_function(g, [](double x) { return std::sin(x); });
  const auto c = Field::from_function(g, [](double x) { return std::cos(x); });
  CHECK(sup_diff(derivative(s, 1), c) < 1e-10);
  CHECK(derivative(Field(g, 7.0), 2).max_abs() < 1e-12);
  const auto c3 = Field::from_function(g, [](double x) { return std::cos(3 * x); });
  CHECK(sup_diff(derivative(c3, 2), -9.0 * c3) < 1e-9);
  CHECK_THROWS(derivative(s, 3));
}

TEST_CASE("derivative drops the Nyquist mode for odd order") {
  const auto g = build_grid(16, 1.0);
  Field alt(g);
  for (std::size_t i = 0; i < 16; ++i) alt[i] = (i % 2) ? -1.0 : 1.0;
  CHECK(derivative(alt, 1).max_abs() < 1e-14);
  const double k = g.wavenumber(8);
  CHECK(sup_diff(derivative(alt, 2), -(k * k) * alt) < 1e-10);
}

TEST_CASE("two-thirds truncation keeps exactly |j| <= n/3") {
  const auto g = build_grid(64, std::numbers::pi);
  const auto keep = Field::from_function(g, [](double x) { return std::cos(21 * x); });
  const auto drop = Field::from_function(g, [](double x) { return std::sin(22 * x); });
  CHECK(sup_diff(truncate_two_thirds(keep + drop), keep) < 1e-13);
}

TEST_CASE("forward-inverse identity on random band-limited fields") {
  const auto g = build_grid(128, 6.0);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_band_limited(g, rng, 40);
    for (double a : {1.0, 4.0}) {
      const EllipticOperator op(a, g);
      CHECK(sup_diff(invert(op, apply_forward(op, f)), f) <= 1e-10 * f.max_abs());
      CHECK(sup_diff(apply_forward(op, invert(op, f)), f) <= 1e-10 * f.max_abs());
    }
  }
}

TEST_CASE("kernel oracle: zero, constants, and a Gaussian") {
  const auto g = build_grid(1024, 20.0);
  const auto zero = kernel_pressure_oracle(Field(g));
  CHECK(zero.value.max_abs() == 0.0);
  CHECK_FALSE(zero.warning.has_value());

  // u^2 = 1 on the interior: (3/4) * 2 = 3/2 away from the truncation edges.
  const auto one = kernel_convolution_oracle(1.0, Field(g, 1.5));
  CHECK(one.warning.has_value());
  CHECK(std::abs(one.value[512] - 1.5) < 1e-8);
  const auto quarter = kernel_a_inverse_oracle(Field(g, 4.0));
  CHECK(std::abs(quarter.value[512] - 1.0) < 1e-8);

  const auto u = Field::from_function(g, [](double x) { return std::exp(-x * x); });
  const auto oracle = kernel_pressure_oracle(u);
  CHECK_FALSE(oracle.warning.has_value());
  CHECK(sup_diff(oracle.value, pressure(u)) < 1e-6);

  const auto z = kernel_a_inverse_oracle(u);
  CHECK_FALSE(z.warning.has_value());
  CHECK(sup_diff(z.value, a_inverse(u)) < 1e-6);
}

TEST_CASE("kernel oracle warns when data does not decay") {
  const auto g = build_grid(256, 10.0);
  const auto u = Field::from_function(g, [](double) { return 0.1; });
  const auto r = kernel_pressure_oracle(u);
  REQUIRE(r.warning.has_value());
  CHECK(r.warning->find("0.1") != std::string::npos);
  CHECK(r.boundary_level == doctest::Approx(0.1));
}

TEST_CASE("pressure positivity and L-infinity bounds on random fields") {
  const auto g = build_grid(512, 20.0);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = random_band_limited(g, rng, 60);
    double u2max = 0.0;
    for (double v : u.values()) u2max = std::max(u2max, v * v);
    Field usq = u;
    for (std::size_t i = 0; i < u.size(); ++i) usq[i] = u[i] * u[i];
    const double l2sq = integrate(usq);
    for (auto mode : {Dealias::none, Dealias::two_thirds}) {
      const auto pp = pressure_with_gradient(u, mode);
      CHECK(pp.p.min() >= -1e-12 * u2max);
      CHECK(pp.p.max_abs() <= 0.76 * l2sq);
      CHECK(pp.dpdx.max_abs() <= 0.76 * l2sq);
    }
  }
}
