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

#include "sdp/cli/flat_toml.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "sdp/core/error.hpp"

namespace sdp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(int line, const std::string& key, const std::string& what) {
  throw ConfigError(key.empty() ? "syntax" : key, "line " + std::to_string(line) + ": " + what);
}

// Drops a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

bool parse_number(std::string_view s, double& out) {
  std::string clean;
  for (char c : s)
    if (c != '_') clean.push_back(c);
  if (!clean.empty() && clean.front() == '+') clean.erase(0, 1);
  const char* end = clean.data() + clean.size();
  auto res = std::from_chars(clean.data(), end, out);
  return res.ec == std::errc() && res.ptr == end && !clean.empty();
}

FlatValue parse_value(std::string_view raw, int line, const std::string& key) {
  const std::string_view v = trim(raw);
  if (v.empty()) fail(line, key, "missing value");
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') fail(line, key, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) {
        const char e = v[++i];
        out.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
      } else {
        out.push_back(v[i]);
      }
    }
    return out;
  }
  if (v.front() == '[') {
    if (v.back() != ']') fail(line, key, "unterminated array");
    std::vector<double> out;
    std::string_view body = trim(v.substr(1, v.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      const std::string_view item = trim(body.substr(0, comma));
      if (!item.empty()) {
        double x = 0.0;
        if (!parse_number(item, x)) fail(line, key, "array items must be numbers");
        out.push_back(x);
      }
      if (comma == std::string_view::npos) break;
      body = body.substr(comma + 1);
    }
    return out;
  }
  double x = 0.0;
  if (!parse_number(v, x)) fail(line, key, "cannot parse value '" + std::string(v) + "'");
  return x;
}

}  // namespace

std::map<std::string, FlatEntry> parse_flat_toml(std::string_view text) {
  std::map<std::string, FlatEntry> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') fail(line, "", "tables are not supported; the config is flat");
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) fail(line, "", "expected key = value");
    std::string key(trim(s.substr(0, eq)));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    if (key.empty()) fail(line, "", "empty key");
    for (char c : key) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
        fail(line, key, "invalid key '" + key + "'");
    }
    if (out.count(key)) fail(line, key, "duplicate key '" + key + "'");
    out.emplace(key, FlatEntry{parse_value(s.substr(eq + 1), line, key), line});
  }
  return out;
}

}  // namespace sdp
