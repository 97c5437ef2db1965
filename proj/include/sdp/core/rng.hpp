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

#include <array>
#include <cstdint>

namespace sdp {

/// Philox4x32-10 block: a keyed bijection on 128-bit counters.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Identifies one independent normal stream: seed -> path -> mode.
struct StreamId {
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
  std::uint32_t mode = 0;
};

/// Uniform in (0, 1), never exactly 0 or 1.
double uniform_open(std::uint64_t bits);

/// Standard normal number `index` of the stream. Pure function of its
/// arguments, so any schedule of calls yields the same values.
double stream_normal(const StreamId& id, std::uint64_t index);

/// Uniform (0,1) number `index` of the stream; independent of the normals.
double stream_uniform(const StreamId& id, std::uint64_t index);

}  // namespace sdp
