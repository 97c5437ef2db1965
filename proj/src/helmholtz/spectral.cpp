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

#include "sdp/helmholtz/spectral.hpp"

#include <fftw3.h>

#include <memory>
#include <mutex>
#include <unordered_map>

#include "sdp/core/error.hpp"

namespace sdp {
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

Spectral::Spectral(std::size_t n) : n_(n) {
  std::lock_guard lock(fftw_planner_mutex());
  real_ = fftw_alloc_real(n_);
  auto* spec = fftw_alloc_complex(n_ / 2 + 1);
  spec_ = spec;
  if (!real_ || !spec) throw Error("fftw allocation failed");
  const int ni = static_cast<int>(n_);
  plan_fwd_ = fftw_plan_dft_r2c_1d(ni, real_, spec, FFTW_ESTIMATE);
  plan_inv_ = fftw_plan_dft_c2r_1d(ni, spec, real_, FFTW_ESTIMATE);
  if (!plan_fwd_ || !plan_inv_) throw Error("fftw planning failed");
}

Spectral::~Spectral() {
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  fftw_free(real_);
  fftw_free(spec_);
}

void Spectral::forward(std::span<const double> in, std::span<Complex> out) {
  if (in.size() != n_ || out.size() != modes()) {
    throw Error("Spectral::forward: size mismatch");
  }
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  const auto* spec = static_cast<const fftw_complex*>(spec_);
  for (std::size_t j = 0; j < modes(); ++j) out[j] = {spec[j][0], spec[j][1]};
}

void Spectral::inverse(std::span<const Complex> in, std::span<double> out) {
  if (in.size() != modes() || out.size() != n_) {
    throw Error("Spectral::inverse: size mismatch");
  }
  auto* spec = static_cast<fftw_complex*>(spec_);
  for (std::size_t j = 0; j < modes(); ++j) {
    spec[j][0] = in[j].real();
    spec[j][1] = in[j].imag();
  }
  fftw_execute(static_cast<fftw_plan>(plan_inv_));
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = real_[i] * scale;
}

Spectral& spectral_workspace(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<Spectral>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Spectral>(n);
  return *slot;
}

}  // namespace sdp
