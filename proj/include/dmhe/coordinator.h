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

#ifndef DMHE_COORDINATOR_H_
#define DMHE_COORDINATOR_H_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dmhe/box.h"
#include "dmhe/box_qp.h"
#include "dmhe/cmhe.h"
#include "dmhe/conditions.h"
#include "dmhe/dmhe1.h"
#include "dmhe/dmhe2.h"
#include "dmhe/model.h"
#include "dmhe/weights.h"

namespace dmhe {

enum class Mode { kDmhe1, kDmhe2, kCmheReference };

std::string ModeName(Mode mode);        // "dmhe1", "dmhe2", "cmhe"
Mode ParseMode(const std::string& name);  // throws ConfigError

struct EstimationSchedule {
  int horizon = 10;
  int max_iterations = 5;  // Jacobi rounds per sampling instant
  Mode mode = Mode::kDmhe1;
  bool keep_history = false;

  void Validate() const;  // throws ConfigError
};

struct EstimateRecord {
  int k = 0;
  std::vector<Vector> estimates;  // x_hat^i_{k-N|k}, final round
  std::vector<Vector> priors;     // x_bar^i_{k-N}
  // Round 0 (initialization) through the last round, when kept.
  std::vector<std::vector<LocalIterate>> history;

  Vector StackedEstimate() const;
  Vector StackedPrior() const;
};

// Wall-clock seconds of every local estimator execution, in call order.
struct TimingSamples {
  std::vector<double> seconds;
};

// Runs the per-instant loop: window assembly, prior prediction from the
// previous instant, iterate initialization at the prior with zero
// disturbances, and `max_iterations` Jacobi rounds. Rounds are executed
// sequentially; every update of round p reads only the round-(p-1)
// snapshot, so the result does not depend on the update order.
class DistributedEstimator {
 public:
  // `boxes` is required for kDmhe2 and optional for the reference mode
  // (which then solves the constrained centralized problem).
  DistributedEstimator(const CompositeModel& model,
                       const EstimatorWeights& weights,
                       EstimationSchedule schedule,
                       std::optional<BoxConstraints> boxes = std::nullopt,
                       BoxQpOptions qp_options = {});
  ~DistributedEstimator();
  DistributedEstimator(const DistributedEstimator&) = delete;
  DistributedEstimator& operator=(const DistributedEstimator&) = delete;

  const CompositeModel& model() const;
  const StackedMaps& maps() const;
  const WeightBundle& bundle() const;
  const EstimationSchedule& schedule() const;
  const Dmhe1Estimator& dmhe1() const;
  const Dmhe2Estimator& dmhe2() const;  // throws Error unless boxes given

  // x_bar^i_{k-N} = sum_j A_ij x_hat^j + sum_j B_ij u_j from the previous
  // instant's final estimates. Throws ProtocolError when a neighbour's
  // estimate is missing.
  Vector ComputePrior(int i, const EstimateRecord& previous,
                      const Vector& u_previous) const;

  // Window ending at k taken from sample-indexed streams (column t holds
  // y_t / u_t). The prior is left empty.
  WindowState MakeWindow(int k, const Matrix& y, const Matrix& u) const;

  // One Jacobi round from the stacked round-(p-1) iterate. `order` lists
  // the subsystems in the order their updates are executed; the result is
  // the same for every permutation.
  Vector RunRound(const Vector& input_free_outputs, const Vector& z_previous,
                  std::span<const Vector> priors, int iteration,
                  std::span<const int> order,
                  TimingSamples* timing = nullptr) const;

  // window.prior must hold the stacked prior.
  EstimateRecord RunInstant(int k, const WindowState& window,
                            TimingSamples* timing = nullptr) const;

  // Processes k = N, N+1, ..., y.cols()-1. The first window uses
  // `initial_guess` as prior; later priors chain from the previous record.
  std::vector<EstimateRecord> RunTrajectory(const Matrix& y, const Matrix& u,
                                            const Vector& initial_guess,
                                            TimingSamples* timing = nullptr)
      const;

  // Four certificates for the configured horizon and weights.
  ConditionReport Conditions() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace dmhe

#endif  // DMHE_COORDINATOR_H_
