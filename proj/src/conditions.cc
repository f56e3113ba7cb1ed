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

#include "dmhe/conditions.h"

#include <sstream>

#include "dmhe/csv.h"
#include "dmhe/error.h"

namespace dmhe {

double ConditionEntry::detail(const std::string& key) const {
  for (const auto& [k, v] : details) {
    if (k == key) return v;
  }
  throw Error("condition " + name + " has no detail " + key);
}

bool ConditionReport::AllHold() const {
  for (const ConditionEntry& e : entries) {
    if (!e.holds) return false;
  }
  return true;
}

const ConditionEntry& ConditionReport::Find(const std::string& name) const {
  for (const ConditionEntry& e : entries) {
    if (e.name == name) return e;
  }
  throw Error("no condition named " + name);
}

nlohmann::json ConditionReport::ToJson() const {
  nlohmann::json out = nlohmann::json::array();
  for (const ConditionEntry& e : entries) {
    nlohmann::json j;
    j["name"] = e.name;
    j["value"] = e.value;
    j["relation"] = e.relation;
    j["threshold"] = e.threshold;
    j["holds"] = e.holds;
    nlohmann::json d = nlohmann::json::object();
    for (const auto& [k, v] : e.details) d[k] = v;
    j["details"] = d;
    if (!e.note.empty()) j["note"] = e.note;
    out.push_back(j);
  }
  return out;
}

std::string ConditionReport::ToCsv() const {
  std::ostringstream out;
  out << "name,value,relation,threshold,holds,details\n";
  for (const ConditionEntry& e : entries) {
    out << e.name << ',' << FormatDouble(e.value) << ',' << e.relation << ','
        << FormatDouble(e.threshold) << ',' << (e.holds ? "true" : "false")
        << ',';
    // key=value pairs separated by ';' keep the row a single CSV field.
    for (size_t j = 0; j < e.details.size(); ++j) {
      if (j > 0) out << ';';
      out << e.details[j].first << '=' << FormatDouble(e.details[j].second);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace dmhe
