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

#ifndef DMHE_MODEL_IO_H_
#define DMHE_MODEL_IO_H_

#include <string>
#include <vector>

#include "dmhe/model.h"

namespace dmhe {

// Model file layout (matrices are row-major nested arrays):
//
//   {"subsystems": [
//     {"id": 0, "A": [[..]], "B": [[..]], "C": [[..]],
//      "A_coupling": {"1": [[..]]}, "B_coupling": {"1": [[..]]}},
//     ...]}
//
// "B" may be omitted for a subsystem without inputs. Parsed subsystems are
// validated individually and by assembly; failures raise ConfigError.
std::vector<SubsystemModel> ParseModelJson(const std::string& text);
std::vector<SubsystemModel> LoadModelFile(const std::string& path);
std::string ModelToJson(const std::vector<SubsystemModel>& subsystems);

}  // namespace dmhe

#endif  // DMHE_MODEL_IO_H_
