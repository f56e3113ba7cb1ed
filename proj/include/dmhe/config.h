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

#ifndef DMHE_CONFIG_H_
#define DMHE_CONFIG_H_

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmhe/box.h"
#include "dmhe/box_qp.h"
#include "dmhe/coordinator.h"
#include "dmhe/model.h"
#include "dmhe/simulator.h"
#include "dmhe/weights.h"

namespace dmhe {

struct EvaluationSettings {
  int runs = 25;
  int samples = 100;  // y_0 .. y_{samples-1}
  std::vector<int> horizons = {2, 5, 10, 15, 20};
  bool timed = false;
};

// Fully resolved run configuration; every field has been checked against
// the model dimensions. See README for the file schema.
struct RunConfig {
  std::string model_source = "benchmark";  // "benchmark" or a file path
  std::vector<SubsystemModel> subsystems;
  std::optional<CompositeModel> model;
  std::optional<BenchmarkBundle> benchmark;

  Vector scaling;  // componentwise divisor used for physical reporting
  EstimationSchedule schedule;
  EstimatorWeights weights;
  std::optional<BoxConstraints> boxes;
  BoxQpOptions qp;
  NoiseSpec noise;
  Vector x0;             // true initial state, scaled coordinates
  Vector initial_guess;  // estimator initial guess, scaled coordinates
  Vector input;          // constant input, scaled coordinates
  EvaluationSettings evaluation;
  std::string output_dir = "out";

  nlohmann::json source;  // the document as parsed, for fingerprinting

  const CompositeModel& Model() const { return *model; }
  // FNV-1a hash of the canonical JSON of the resolved settings.
  std::string Fingerprint() const;
  nlohmann::json ResolvedJson() const;
};

// Throws ConfigError with a path-like location on any invalid entry.
RunConfig ParseRunConfig(const nlohmann::json& doc,
                         const std::string& base_dir = ".");
RunConfig LoadRunConfig(const std::string& path);

// Defaults: benchmark model, unconstrained DMHE-1 with P = 0.1, Q = R = 1e-4.
RunConfig DefaultRunConfig();

}  // namespace dmhe

#endif  // DMHE_CONFIG_H_
