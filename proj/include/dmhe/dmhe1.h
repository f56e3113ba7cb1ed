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

#ifndef DMHE_DMHE1_H_
#define DMHE_DMHE1_H_

#include <span>
#include <vector>

#include "dmhe/cmhe.h"
#include "dmhe/conditions.h"
#include "dmhe/linalg.h"
#include "dmhe/model.h"
#include "dmhe/weights.h"

namespace dmhe {

// Iterate of local estimator i after `iteration` Jacobi rounds.
struct LocalIterate {
  int subsystem = 0;
  Vector x_hat;         // n_x^i
  Vector w_hat_window;  // N n_x^i, stage-major
  int iteration = 0;

  Vector Stacked() const;  // z_i = [x_hat; w_hat_window]
};

// Stacks per-subsystem iterates into the global z ordering. Throws
// ProtocolError unless every subsystem appears exactly once.
Vector StackIterates(const DecisionLayout& layout,
                     std::span<const LocalIterate> iterates);
std::vector<LocalIterate> UnstackIterates(const DecisionLayout& layout,
                                          const Vector& z, int iteration);

// Checks that `iterates` holds one round-(p-1) iterate per subsystem, in
// subsystem order. Throws ProtocolError otherwise.
void CheckRound(std::span<const LocalIterate> iterates, int num_subsystems,
                int expected_iteration);

// Residual measurements seen by estimator i when its neighbours are frozen:
//   (y - Lambda u) - sum_{l != i} Pi_l z_l.
Vector NeighbourResidual(int i, const Vector& input_free_outputs,
                         const Vector& z_previous, const WeightBundle& bundle);

// Closed-form local estimator. Every window-independent factorization is
// done at construction.
class Dmhe1Estimator {
 public:
  // The referenced objects must outlive the estimator.
  Dmhe1Estimator(const CompositeModel& model, const StackedMaps& maps,
                 const WeightBundle& bundle);

  // One update of estimator i from the round-(p-1) iterates of all
  // subsystems. Throws ProtocolError on a round mismatch.
  LocalIterate LocalUpdate(int i, const WindowState& window,
                           std::span<const LocalIterate> previous,
                           const Vector& prior_i) const;

  // Same, with y - Lambda u and the stacked previous iterate supplied by
  // the caller (used by the coordinator to avoid recomputation).
  LocalIterate LocalUpdateStacked(int i, const Vector& input_free_outputs,
                                  const Vector& z_previous,
                                  const Vector& prior_i, int iteration) const;

  int num_subsystems() const { return static_cast<int>(local_.size()); }

 private:
  struct LocalFactors {
    Matrix o, gamma;   // O_{:,i}, Gamma_{:,i}
    Matrix r_inv_o, r_inv_gamma;
    Matrix m12, m21;
    Cholesky m11, m22;
    Cholesky x_schur;  // P_i^-1 + O_i'(R + G_i Q_i G_i')^-1 O_i
    Cholesky w_schur;  // Q_i^-1 + G_i'(R + O_i P_i O_i')^-1 G_i
  };

  const CompositeModel& model_;
  const StackedMaps& maps_;
  const WeightBundle& bundle_;
  std::vector<LocalFactors> local_;
};

// Global form of one Jacobi round: M_d z+ = M_k - M_r z.
struct IterationMatrices {
  Matrix Md, Mr;
  Cholesky Md_llt;
  double spectral_radius_iter = 0.0;  // rho(M_d^-1 M_r)
};

IterationMatrices BuildIterationMatrices(const WeightBundle& bundle);

// M_k for the window: the right-hand side of the full optimality system.
Vector IterationOffset(const WindowState& window, const WeightBundle& bundle,
                       const StackedMaps& maps);

Vector GlobalIterationStep(const Vector& z_previous,
                           const IterationMatrices& matrices,
                           const Vector& offset);

// rho(M_d^-1 M_r) < 1.
ConditionEntry CheckIterationConvergence(const IterationMatrices& matrices);

// rho((P^-1 + O'(R + G Q G')^-1 O)^-1 P^-1 A) < 1.
ConditionEntry CheckErrorStability(const WeightBundle& bundle,
                                   const StackedMaps& maps,
                                   const CompositeModel& model);

}  // namespace dmhe

#endif  // DMHE_DMHE1_H_
