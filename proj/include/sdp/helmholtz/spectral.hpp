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

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include "sdp/core/grid.hpp"

namespace sdp {

using Complex = std::complex<double>;

/// Real-to-complex FFT workspace for one grid size.
///
/// Plans are built once under a global lock (the FFTW planner is not
/// re-entrant); execution uses the workspace's own aligned buffers, so one
/// instance must not be shared between threads. Use `spectral_workspace`
/// to get the calling thread's instance.
class Spectral {
 public:
  explicit Spectral(std::size_t n);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t modes() const noexcept { return n_ / 2 + 1; }

  /// Unnormalized forward transform, out has modes() entries.
  void forward(std::span<const double> in, std::span<Complex> out);
  /// Inverse transform including the 1/n factor.
  void inverse(std::span<const Complex> in, std::span<double> out);

 private:
  std::size_t n_;
  double* real_;
  void* spec_;
  void* plan_fwd_;
  void* plan_inv_;
};

/// Serializes FFTW plan creation and destruction across the library.
std::mutex& fftw_planner_mutex();

/// Thread-local cached workspace for grids of size n.
Spectral& spectral_workspace(std::size_t n);

/// Highest retained DFT index under the 2/3 rule.
inline std::size_t two_thirds_cutoff(std::size_t n) { return n / 3; }

}  // namespace sdp
