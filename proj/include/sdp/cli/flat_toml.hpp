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

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sdp {

/// Value of one `key = value` line: number, bool, string or number array.
using FlatValue = std::variant<double, bool, std::string, std::vector<double>>;

struct FlatEntry {
  FlatValue value;
  int line = 0;
};

/// Parses the flat TOML subset used for run configs: one `key = value` per
/// line, `#` comments, no tables. Throws ConfigError("<key>" or "syntax")
/// with the line number on malformed input or duplicate keys.
std::map<std::string, FlatEntry> parse_flat_toml(std::string_view text);

}  // namespace sdp
