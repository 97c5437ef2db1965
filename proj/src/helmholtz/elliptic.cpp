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

#include "sdp/helmholtz/elliptic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "sdp/core/error.hpp"
#include "sdp/helmholtz/spectral.hpp"

namespace sdp {
namespace {

std::vector<Complex> forward(const Field& f) {
  auto& fft = spectral_workspace(f.size());
  std::vector<Complex> hat(fft.modes());
  fft.forward(f.values(), hat);
  return hat;
}

Field inverse(const Grid1D& grid, const std::vector<Complex>& hat) {
  auto& fft = spectral_workspace(grid.size());
  Field out(grid);
  fft.inverse(hat, out.values());
  return out;
}

void truncate(std::vector<Complex>& hat, std::size_t cutoff) {
  for (std::size_t j = cutoff + 1; j < hat.size(); ++j) hat[j] = 0.0;
}

void apply_derivative(std::vector<Complex>& hat, const Grid1D& grid) {
  const std::size_t nyquist = grid.size() / 2;
  for (std::size_t j = 0; j < hat.size(); ++j) {
    hat[j] = j == nyquist ? Complex(0.0) : Complex(0.0, grid.wavenumber(j)) * hat[j];
  }
}

}  // namespace

EllipticOperator::EllipticOperator(double shift, const Grid1D& grid)
    : shift_(shift), grid_(grid) {
  if (!(shift > 0.0)) throw Error("elliptic shift must be positive");
}

Field invert(const EllipticOperator& op, const Field& rhs) {
  require_finite(rhs, "invert");
  auto hat = forward(rhs);
  for (std::size_t j = 0; j < hat.size(); ++j) {
    hat[j] /= op.symbol(op.grid().wavenumber(j));
  }
  return inverse(rhs.grid(), hat);
}

Field apply_forward(const EllipticOperator& op, const Field& f) {
  require_finite(f, "apply_forward");
  auto hat = forward(f);
  for (std::size_t j = 0; j < hat.size(); ++j) {
    hat[j] *= op.symbol(op.grid().wavenumber(j));
  }
  return inverse(f.grid(), hat);
}

Field truncate_two_thirds(const Field& f) {
  auto hat = forward(f);
  truncate(hat, two_thirds_cutoff(f.size()));
  return inverse(f.grid(), hat);
}

PressurePair pressure_with_gradient(const Field& u, Dealias dealias) {
  require_finite(u, "pressure");
  const Grid1D& grid = u.grid();
  const std::size_t cutoff = two_thirds_cutoff(grid.size());
  Field source(grid);
  if (dealias == Dealias::two_thirds) {
    const Field band = truncate_two_thirds(u);
    for (std::size_t i = 0; i < grid.size(); ++i) source[i] = 1.5 * band[i] * band[i];
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i) source[i] = 1.5 * u[i] * u[i];
  }
  auto hat = forward(source);
  if (dealias == Dealias::two_thirds) truncate(hat, cutoff);
  for (std::size_t j = 0; j < hat.size(); ++j) {
    const double k = grid.wavenumber(j);
    hat[j] /= 1.0 + k * k;
  }
  Field p = inverse(grid, hat);
  apply_derivative(hat, grid);
  Field dpdx = inverse(grid, hat);
  return {std::move(p), std::move(dpdx)};
}

Field pressure(const Field& u, Dealias dealias) {
  return pressure_with_gradient(u, dealias).p;
}

Field a_inverse(const Field& u) {
  return invert(EllipticOperator::a_operator(u.grid()), u);
}

Field derivative(const Field& f, int order) {
  if (order != 1 && order != 2) throw Error("derivative order must be 1 or 2");
  require_finite(f, "derivative");
  auto hat = forward(f);
  const Grid1D& grid = f.grid();
  if (order == 1) {
    apply_derivative(hat, grid);
  } else {
    for (std::size_t j = 0; j < hat.size(); ++j) {
      const double k = grid.wavenumber(j);
      hat[j] *= -k * k;
    }
  }
  return inverse(grid, hat);
}

// ---------------------------------------------------------------------------
// Line-kernel oracle.

namespace {

constexpr int kStencil = 6;                           // quintic interpolation
constexpr std::array<int, kStencil> kOffsets = {-2, -1, 0, 1, 2, 3};

struct GaussRule {
  std::array<double, 8> nodes;    // on [0, 1]
  std::array<double, 8> weights;  // sum to 1
};

GaussRule gauss_legendre_8() {
  GaussRule rule{};
  constexpr int n = 8;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

double lagrange(int m, double tau) {
  double v = 1.0;
  for (int o : kOffsets) {
    if (o == kOffsets[m]) continue;
    v *= (tau - o) / static_cast<double>(kOffsets[m] - o);
  }
  return v;
}

}  // namespace

KernelOracleResult kernel_convolution_oracle(double shift, const Field& rhs,
                                             double decay_threshold) {
  if (!(shift > 0.0)) throw Error("kernel oracle: shift must be positive");
  require_finite(rhs, "kernel oracle");
  const Grid1D& grid = rhs.grid();
  const std::size_t n = grid.size();
  const double h = grid.dx();
  const double lambda = std::sqrt(shift);
  const double decay = std::exp(-lambda * h);

  // Product-quadrature weights for one cell: kernel measured from the
  // right end (left sweep) or from the left end (right sweep).
  const GaussRule rule = gauss_legendre_8();
  std::array<double, kStencil> w_left{}, w_right{};
  for (int m = 0; m < kStencil; ++m) {
    for (int q = 0; q < 8; ++q) {
      const double tau = rule.nodes[q];
      const double basis = lagrange(m, tau) * rule.weights[q] * h;
      w_left[m] += basis * std::exp(-lambda * h * (1.0 - tau));
      w_right[m] += basis * std::exp(-lambda * h * tau);
    }
  }
  auto value_at = [&](std::ptrdiff_t idx) {
    return (idx < 0 || idx >= static_cast<std::ptrdiff_t>(n)) ? 0.0 : rhs[idx];
  };
  auto cell = [&](std::size_t left, const std::array<double, kStencil>& w) {
    double s = 0.0;
    for (int m = 0; m < kStencil; ++m) {
      s += w[m] * value_at(static_cast<std::ptrdiff_t>(left) + kOffsets[m]);
    }
    return s;
  };

  std::vector<double> sweep_left(n, 0.0), sweep_right(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    sweep_left[i] = decay * sweep_left[i - 1] + cell(i - 1, w_left);
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    sweep_right[i] = decay * sweep_right[i + 1] + cell(i, w_right);
  }

  Field out(grid);
  const double norm = 1.0 / (2.0 * lambda);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = norm * (sweep_left[i] + sweep_right[i]);
  }

  KernelOracleResult result{std::move(out), 0.0, std::nullopt};
  const std::size_t edge = std::min<std::size_t>(4, n / 2);
  for (std::size_t i = 0; i < edge; ++i) {
    result.boundary_level = std::max(
        {result.boundary_level, std::abs(rhs[i]), std::abs(rhs[n - 1 - i])});
  }
  if (result.boundary_level > decay_threshold) {
    result.warning = "kernel oracle: input does not decay near +-L (level " +
                     std::to_string(result.boundary_level) +
                     "); line-kernel truncation is not valid";
  }
  return result;
}

KernelOracleResult kernel_pressure_oracle(const Field& u, double decay_threshold) {
  require_finite(u, "kernel_pressure_oracle");
  Field source(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) source[i] = 1.5 * u[i] * u[i];
  // Check decay on u itself, not on u^2.
  auto result = kernel_convolution_oracle(1.0, source, decay_threshold * decay_threshold);
  const std::size_t n = u.size();
  const std::size_t edge = std::min<std::size_t>(4, n / 2);
  double level = 0.0;
  for (std::size_t i = 0; i < edge; ++i) {
    level = std::max({level, std::abs(u[i]), std::abs(u[n - 1 - i])});
  }
  result.boundary_level = level;
  result.warning.reset();
  if (level > decay_threshold) {
    result.warning = "kernel_pressure_oracle: |u| near +-L is " +
                     std::to_string(level) + " > " +
                     std::to_string(decay_threshold) +
                     "; line-kernel truncation is not valid";
  }
  return result;
}

KernelOracleResult kernel_a_inverse_oracle(const Field& u, double decay_threshold) {
  return kernel_convolution_oracle(4.0, u, decay_threshold);
}

}  // namespace sdp
