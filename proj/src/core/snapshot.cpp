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

#include "sdp/core/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "sdp/core/error.hpp"

namespace sdp {
namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian hosts are not supported");

constexpr unsigned char kMagic[4] = {'S', 'D', 'P', 'K'};

template <class U>
U to_little(U v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    U out = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out = static_cast<U>((out << 8) | ((v >> (8 * i)) & 0xFFu));
    }
    return out;
  }
}

class Writer {
 public:
  explicit Writer(std::vector<unsigned char>& out) : out_(out) {}
  template <class U>
  void put(U v) {
    v = to_little(v);
    unsigned char b[sizeof(U)];
    std::memcpy(b, &v, sizeof(U));
    out_.insert(out_.end(), b, b + sizeof(U));
  }
  void put_f64(double d) { put(std::bit_cast<std::uint64_t>(d)); }

 private:
  std::vector<unsigned char>& out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& in) : in_(in) {}
  template <class U>
  U get() {
    if (pos_ + sizeof(U) > in_.size()) {
      throw SnapshotError("unexpected end of snapshot");
    }
    U v;
    std::memcpy(&v, in_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return to_little(v);
  }
  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  const std::vector<unsigned char>& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<unsigned char> encode_snapshot(const Snapshot& s) {
  if (s.u.grid() != s.p.grid()) {
    throw SnapshotError("snapshot u and p live on different grids");
  }
  std::vector<unsigned char> out;
  const std::size_t n = s.u.size();
  out.reserve(4 + 2 + 4 + 4 + 16 + 8 * (2 * n + s.wiener.size() + 4));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  Writer w(out);
  w.put<std::uint16_t>(kSnapshotVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(n));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.wiener.size()));
  w.put_f64(s.time);
  w.put_f64(s.u.grid().half_width());
  for (double v : s.u.values()) w.put_f64(v);
  for (double v : s.p.values()) w.put_f64(v);
  for (double v : s.wiener) w.put_f64(v);
  for (std::uint64_t c : s.rng_cursor) w.put<std::uint64_t>(c);
  return out;
}

Snapshot decode_snapshot(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 4) throw SnapshotError("unexpected end of snapshot");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw SnapshotError("bad snapshot magic");
  }
  std::vector<unsigned char> body(bytes.begin() + 4, bytes.end());
  Reader r(body);
  const auto version = r.get<std::uint16_t>();
  if (version != kSnapshotVersion) {
    throw SnapshotError("unsupported snapshot version " +
                        std::to_string(version));
  }
  const auto n = r.get<std::uint32_t>();
  const auto k = r.get<std::uint32_t>();
  const double time = r.get_f64();
  const double half_width = r.get_f64();
  const std::size_t expected =
      8ull * (2ull * n + static_cast<std::size_t>(k) + 4ull);
  if (r.remaining() < expected) throw SnapshotError("unexpected end of snapshot");
  if (r.remaining() > expected) {
    throw SnapshotError("snapshot length mismatch: trailing bytes after payload");
  }
  const Grid1D grid(n, half_width);
  std::vector<double> u(n), p(n), w(k);
  for (auto& v : u) v = r.get_f64();
  for (auto& v : p) v = r.get_f64();
  for (auto& v : w) v = r.get_f64();
  RngCursor cursor{};
  for (auto& c : cursor) c = r.get<std::uint64_t>();
  return Snapshot{time, Field(grid, std::move(u)), Field(grid, std::move(p)),
                  std::move(w), cursor};
}

void write_snapshot(const Snapshot& s, const std::filesystem::path& path) {
  const auto bytes = encode_snapshot(s);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SnapshotError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw SnapshotError("write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace sdp
