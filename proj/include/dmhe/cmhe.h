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

#ifndef DMHE_CMHE_H_
#define DMHE_CMHE_H_

#include "dmhe/box.h"
#include "dmhe/box_qp.h"
#include "dmhe/linalg.h"
#include "dmhe/model.h"
#include "dmhe/weights.h"

namespace dmhe {

// Data of one estimation window ending at instant k.
struct WindowState {
  int k = 0;
  Vector y_window;  // y_{k-N}, ..., y_k stacked, (N+1) n_y
  Vector u_window;  // u_{k-N}, ..., u_{k-1} stacked, N n_u
  Vector prior;     // x_bar_{k-N}, n_x

  // Throws DimensionError when the lengths disagree with the model.
  void Validate(const CompositeModel& model, int horizon) const;
};

struct FullEstimate {
  Vector x_hat;         // estimate of x_{k-N}
  Vector w_hat_window;  // w_{k-N}, ..., w_{k-1}, stage-major
  double objective_value = 0.0;

  Vector Stacked() const;  // z = [x_hat; w_hat_window]
};

// Measurements with the known input response removed: y - Lambda u.
Vector InputFreeOutputs(const WindowState& window, const StackedMaps& maps);

// Right-hand side b of H z = b, the linear term of the window objective.
Vector WindowRhs(const WindowState& window, const WeightBundle& bundle,
                 const StackedMaps& maps);

// Window objective evaluated by forward simulation of
//   x_{t+1} = A x_t + B u_t + w_t
// from the decision vector z; independent of the stacked maps.
double WindowObjective(const Vector& z, const WindowState& window,
                       const CompositeModel& model,
                       const EstimatorWeights& weights, int horizon);

// Gradient H z - b of the window objective.
Vector WindowGradient(const Vector& z, const Vector& rhs,
                      const WeightBundle& bundle);

// Unique minimizer of the window objective. Throws ConditioningError when
// the Hessian cannot be factorized.
FullEstimate SolveCmheUnconstrained(const WindowState& window,
                                    const WeightBundle& bundle,
                                    const StackedMaps& maps,
                                    const CompositeModel& model,
                                    const EstimatorWeights& weights);

// Box-constrained minimizer. Throws Error on an empty box and
// ConvergenceError when the QP solver does not settle.
FullEstimate SolveCmheConstrained(const WindowState& window,
                                  const WeightBundle& bundle,
                                  const StackedMaps& maps,
                                  const CompositeModel& model,
                                  const EstimatorWeights& weights,
                                  const BoxConstraints& boxes,
                                  const BoxQpOptions& options = {});

FullEstimate SplitDecision(const Vector& z, Index state_dim);

}  // namespace dmhe

#endif  // DMHE_CMHE_H_
