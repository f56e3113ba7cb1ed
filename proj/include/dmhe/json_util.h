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

#ifndef DMHE_JSON_UTIL_H_
#define DMHE_JSON_UTIL_H_

#include <string>

#include <json.hpp>

#include "dmhe/linalg.h"

namespace dmhe {

// Row-major nested array <-> dense matrix. Ragged or non-numeric input
// raises ConfigError mentioning `where`.
Matrix MatrixFromJson(const nlohmann::json& j, const std::string& where);
nlohmann::json MatrixToJson(const Matrix& m);

// Flat numeric array. The strings "inf" and "-inf" are accepted so that
// unbounded box components survive a round trip.
Vector VectorFromJson(const nlohmann::json& j, const std::string& where);
nlohmann::json VectorToJson(const Vector& v);

}  // namespace dmhe

#endif  // DMHE_JSON_UTIL_H_
