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

#include "dmhe/json_util.h"

#include <cmath>
#include <limits>

#include "dmhe/error.h"

namespace dmhe {
namespace {

double ScalarFromJson(const nlohmann::json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError(where + ": expected a number, got " + j.dump());
}

nlohmann::json ScalarToJson(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

}  // namespace

Matrix MatrixFromJson(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a nested array");
  const Index rows = static_cast<Index>(j.size());
  Index cols = 0;
  if (rows > 0) {
    if (!j[0].is_array()) throw ConfigError(where + ": expected a nested array");
    cols = static_cast<Index>(j[0].size());
  }
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const nlohmann::json& row = j[r];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ConfigError(where + ": ragged matrix at row " + std::to_string(r));
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = ScalarFromJson(row[c], where);
  }
  return m;
}

nlohmann::json MatrixToJson(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(ScalarToJson(m(r, c)));
    out.push_back(row);
  }
  return out;
}

Vector VectorFromJson(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (Index k = 0; k < v.size(); ++k) v(k) = ScalarFromJson(j[k], where);
  return v;
}

nlohmann::json VectorToJson(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(ScalarToJson(v(k)));
  return out;
}

}  // namespace dmhe
