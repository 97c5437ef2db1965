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

#include <string>
#include <vector>

namespace sdp {

/// One verification line: measured value against a bound.
struct CheckLine {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string note;
};

struct Report {
  std::vector<CheckLine> lines;

  void add(std::string name, double measured, double bound, bool pass,
           std::string note = {});
  bool all_pass() const;
  const CheckLine* find(const std::string& name) const;
  std::vector<std::string> failures() const;
};

}  // namespace sdp
