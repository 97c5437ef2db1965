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

#include "sdp/core/report.hpp"

#include <algorithm>

namespace sdp {

void Report::add(std::string name, double measured, double bound, bool pass,
                 std::string note) {
  lines.push_back({std::move(name), measured, bound, pass, std::move(note)});
}

bool Report::all_pass() const {
  return std::all_of(lines.begin(), lines.end(),
                     [](const CheckLine& l) { return l.pass; });
}

const CheckLine* Report::find(const std::string& name) const {
  for (const auto& l : lines)
    if (l.name == name) return &l;
  return nullptr;
}

std::vector<std::string> Report::failures() const {
  std::vector<std::string> out;
  for (const auto& l : lines)
    if (!l.pass) out.push_back(l.name);
  return out;
}

}  // namespace sdp
