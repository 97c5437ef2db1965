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
#include <filesystem>
#include <vector>

#include "sdp/core/field.hpp"

namespace sdp {

/// Opaque reproducibility token: (seed, path index, next fine-step index,
/// increment aggregation). Enough to regenerate every future increment.
using RngCursor = std::array<std::uint64_t, 4>;

struct Snapshot {
  double time = 0.0;
  Field u;
  Field p;
  std::vector<double> wiener;  // accumulated W_k(t), one per mode
  RngCursor rng_cursor{};

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

inline constexpr std::uint16_t kSnapshotVersion = 1;

/// Little-endian layout: "SDPK", u16 version, u32 n, u32 K, f64 time, f64 L,
/// u[n], p[n], W[K], cursor u64[4].
void write_snapshot(const Snapshot& s, const std::filesystem::path& path);
Snapshot read_snapshot(const std::filesystem::path& path);

std::vector<unsigned char> encode_snapshot(const Snapshot& s);
Snapshot decode_snapshot(const std::vector<unsigned char>& bytes);

}  // namespace sdp
