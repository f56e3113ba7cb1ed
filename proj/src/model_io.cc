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

#include "dmhe/model_io.h"

#include <fstream>
#include <sstream>

#include "dmhe/error.h"
#include "dmhe/json_util.h"

namespace dmhe {

using nlohmann::json;

std::vector<SubsystemModel> ParseModelJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("model file: ") + e.what());
  }
  if (!doc.contains("subsystems") || !doc["subsystems"].is_array()) {
    throw ConfigError("model file: missing \"subsystems\" array");
  }
  std::vector<SubsystemModel> out;
  for (const json& entry : doc["subsystems"]) {
    SubsystemModel s;
    if (!entry.contains("id") || !entry["id"].is_number_integer()) {
      throw ConfigError("model file: subsystem without integer \"id\"");
    }
    s.id = entry["id"].get<int>();
    const std::string where = "subsystem " + std::to_string(s.id);
    s.a_self = MatrixFromJson(entry.value("A", json()), where + ".A");
    s.c_self = MatrixFromJson(entry.value("C", json()), where + ".C");
    if (entry.contains("B")) {
      s.b_self = MatrixFromJson(entry["B"], where + ".B");
    } else {
      s.b_self = Matrix(s.a_self.rows(), 0);
    }
    for (const char* key : {"A_coupling", "B_coupling"}) {
      if (!entry.contains(key)) continue;
      if (!entry[key].is_object()) {
        throw ConfigError(where + "." + key + ": expected an object");
      }
      auto& target = key[0] == 'A' ? s.a_coupling : s.b_coupling;
      for (const auto& [j, m] : entry[key].items()) {
        int neighbour = 0;
        try {
          neighbour = std::stoi(j);
        } catch (const std::exception&) {
          throw ConfigError(where + "." + key + ": bad neighbour id \"" + j +
                            "\"");
        }
        target.emplace(neighbour,
                       MatrixFromJson(m, where + "." + key + "." + j));
      }
    }
    out.push_back(std::move(s));
  }
  try {
    AssembleComposite(out);
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("model file: ") + e.what());
  }
  return out;
}

std::vector<SubsystemModel> LoadModelFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseModelJson(buffer.str());
}

std::string ModelToJson(const std::vector<SubsystemModel>& subsystems) {
  json doc;
  doc["subsystems"] = json::array();
  for (const SubsystemModel& s : subsystems) {
    json entry;
    entry["id"] = s.id;
    entry["A"] = MatrixToJson(s.a_self);
    entry["B"] = MatrixToJson(s.b_self);
    entry["C"] = MatrixToJson(s.c_self);
    json ac = json::object(), bc = json::object();
    for (const auto& [j, m] : s.a_coupling) ac[std::to_string(j)] = MatrixToJson(m);
    for (const auto& [j, m] : s.b_coupling) bc[std::to_string(j)] = MatrixToJson(m);
    entry["A_coupling"] = ac;
    entry["B_coupling"] = bc;
    doc["subsystems"].push_back(entry);
  }
  return doc.dump(2);
}

}  // namespace dmhe
