// Copyright 2026 The DMHE Authors
//
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

#ifndef DMHE_CONDITIONS_H_
#define DMHE_CONDITIONS_H_

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace dmhe {

// One certificate: `value` compared against `threshold` with `relation`
// ("<" or ">"), plus the raw eigen-data that produced it.
struct ConditionEntry {
  std::string name;
  double value = 0.0;
  std::string relation = "<";
  double threshold = 1.0;
  bool holds = false;
  std::vector<std::pair<std::string, double>> details;
  std::string note;

  double detail(const std::string& key) const;  // throws if absent
};

struct ConditionReport {
  std::vector<ConditionEntry> entries;

  bool AllHold() const;
  const ConditionEntry& Find(const std::string& name) const;

  nlohmann::json ToJson() const;
  // Header: name,value,relation,threshold,holds,details
  std::string ToCsv() const;
};

}  // namespace dmhe

#endif  // DMHE_CONDITIONS_H_
