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

#include "sdp/core/rng.hpp"

#include <cmath>
#include <numbers>

#include "sdp/core/error.hpp"

namespace sdp {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
// Uniform streams live in a disjoint counter domain from normal streams.
constexpr std::uint32_t kUniformDomain = 0x80000000u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4> block(const StreamId& id, std::uint64_t call,
                                   std::uint32_t domain) {
  if (id.path > 0xFFFFFFFFull) throw Error("path index exceeds 32 bits");
  if (id.mode & kUniformDomain) throw Error("mode index exceeds 31 bits");
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(call), static_cast<std::uint32_t>(call >> 32),
      id.mode | domain, static_cast<std::uint32_t>(id.path)};
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(id.seed),
      static_cast<std::uint32_t>(id.seed >> 32)};
  return philox4x32(ctr, key);
}

inline std::uint64_t join(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

double uniform_open(std::uint64_t bits) {
  // 52 random bits mapped to the cell midpoints of a 2^-52 lattice; both
  // extremes stay representable strictly inside (0, 1).
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

double stream_normal(const StreamId& id, std::uint64_t index) {
  const auto w = block(id, index >> 1, 0u);
  const double u1 = uniform_open(join(w[0], w[1]));
  const double u2 = uniform_open(join(w[2], w[3]));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (index & 1u) ? r * std::sin(angle) : r * std::cos(angle);
}

double stream_uniform(const StreamId& id, std::uint64_t index) {
  const auto w = block(id, index >> 1, kUniformDomain);
  return (index & 1u) ? uniform_open(join(w[2], w[3]))
                      : uniform_open(join(w[0], w[1]));
}

}  // namespace sdp
