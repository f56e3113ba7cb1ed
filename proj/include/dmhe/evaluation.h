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

#ifndef DMHE_EVALUATION_H_
#define DMHE_EVALUATION_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmhe/conditions.h"
#include "dmhe/config.h"
#include "dmhe/coordinator.h"
#include "dmhe/simulator.h"

namespace dmhe {

// sqrt( sum_j ||xhat^j - x^j||^2 / n ) over the n subsystems. Throws
// Error when the two lists differ in length or a pair differs in size.
double RmseAt(std::span<const Vector> estimates, std::span<const Vector> truth);

// Simulated data for one run: the trajectory is shared by every estimator
// evaluated on that run.
Trajectory SimulateRun(const RunConfig& config, std::uint64_t seed);

struct RunResult {
  std::vector<int> instants;  // k = N .. samples-1
  std::vector<double> rmse_scaled;
  std::vector<double> rmse_physical;
  std::vector<EstimateRecord> records;
  TimingSamples timing;
};

// Runs the configured estimator over a trajectory. The estimate emitted at
// k is x_hat_{k-N|k}; it is compared with the true x_{k-N}.
RunResult EvaluateRun(const RunConfig& config, const Trajectory& trajectory,
                      bool timed = false);

struct TimingStats {
  std::string mode;
  int horizon = 0;
  long long executions = 0;
  double mean_seconds = 0.0;
  double max_seconds = 0.0;
};

TimingStats SummarizeTiming(const TimingSamples& samples, Mode mode,
                            int horizon);

struct RunSummary {
  std::string mode;
  int horizon = 0;
  int runs = 0;
  std::vector<int> instants;
  std::vector<double> rmse_scaled;    // mean over runs, per instant
  std::vector<double> rmse_physical;
  double mean_rmse_scaled = 0.0;      // time mean of the above
  double mean_rmse_physical = 0.0;
  std::vector<TimingStats> timing;    // empty unless timed
  ConditionReport conditions;
  std::string fingerprint;

  nlohmann::json ToJson() const;
};

// Independent runs seeded with MixSeed(config.noise.seed, run). Runs are
// distributed over `threads` workers (0 = hardware concurrency; timed
// evaluations always run on one thread). Aggregation is in run-index order.
// A failing run aborts with its index in the message.
RunSummary MonteCarlo(const RunConfig& config, int runs,
                      std::vector<RunResult>* per_run = nullptr,
                      unsigned threads = 0);

struct SweepRow {
  int horizon = 0;
  double mean_rmse_scaled = 0.0;
  double mean_rmse_physical = 0.0;
};

// One MonteCarlo per horizon, with the same per-run seeds.
std::vector<SweepRow> HorizonSweep(const RunConfig& config,
                                   std::span<const int> horizons, int runs);

// Per local-estimator execution wall-clock statistics for each mode and
// horizon. Empty when config.evaluation.timed is false.
std::vector<TimingStats> TimingReport(const RunConfig& config,
                                      std::span<const Mode> modes,
                                      std::span<const int> horizons, int runs);

}  // namespace dmhe

#endif  // DMHE_EVALUATION_H_
