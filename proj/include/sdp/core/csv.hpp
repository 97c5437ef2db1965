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

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace sdp {

/// Shortest round-trip decimal representation (deterministic across runs).
std::string format_double(double v);

/// Minimal CSV writer; the header row is emitted on construction.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& columns);

  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((write_cell(cells, first), first = false), ...);
    out_ << '\n';
  }

  void flush() { out_.flush(); }

 private:
  void write_cell(double v, bool first);
  void write_cell(std::string_view s, bool first);
  void write_cell(const std::string& s, bool first) {
    write_cell(std::string_view(s), first);
  }
  void write_cell(const char* s, bool first) {
    write_cell(std::string_view(s), first);
  }
  void write_cell(std::uint64_t v, bool first);
  void write_cell(int v, bool first);
  void write_cell(bool v, bool first) { write_cell(v ? "1" : "0", first); }

  std::ofstream out_;
};

/// Parsed CSV (header + rows of string cells).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace sdp
