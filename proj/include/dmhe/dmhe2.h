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

#ifndef DMHE_DMHE2_H_
#define DMHE_DMHE2_H_

#include <span>
#include <vector>

#include "dmhe/box.h"
#include "dmhe/box_qp.h"
#include "dmhe/cmhe.h"
#include "dmhe/conditions.h"
#include "dmhe/dmhe1.h"
#include "dmhe/model.h"
#include "dmhe/weights.h"

namespace dmhe {

// Box-constrained local estimator: each update minimizes the subsystem
// objective with the neighbours frozen at round p-1,
//   min 0.5 z_i' F_i z_i - c_i' z_i   over the box of subsystem i,
// with F_i = Q~_i^-1 + Pi_i' R^-1 Pi_i.
class Dmhe2Estimator {
 public:
  // The referenced objects must outlive the estimator.
  Dmhe2Estimator(const CompositeModel& model, const StackedMaps& maps,
                 const WeightBundle& bundle, const BoxConstraints& boxes,
                 BoxQpOptions options = {});

  // Warm-started from estimator i's own round-(p-1) iterate. The result
  // lies in the box exactly. Throws ConvergenceError when the inner solver
  // hits its cap and ProtocolError on a round mismatch.
  LocalIterate LocalQpSolve(int i, const WindowState& window,
                            std::span<const LocalIterate> previous,
                            const Vector& prior_i) const;

  LocalIterate LocalQpSolveStacked(int i, const Vector& input_free_outputs,
                                   const Vector& z_previous,
                                   const Vector& prior_i, int iteration) const;

  // Linear term c_i of the local problem.
  Vector LocalLinearTerm(int i, const Vector& input_free_outputs,
                         const Vector& z_previous, const Vector& prior_i) const;

  const Matrix& local_hessian(int i) const { return local_[i].qp.hessian(); }
  const Box& local_box(int i) const { return local_[i].box; }
  int num_subsystems() const { return static_cast<int>(local_.size()); }

 private:
  struct Local {
    BoxQp qp;
    Box box;
    Matrix r_inv_pi;  // R^-1 Pi_i
  };

  const CompositeModel& model_;
  const StackedMaps& maps_;
  const WeightBundle& bundle_;
  std::vector<Local> local_;
};

// Scaled gradient projection z+ = [z - gamma F^-1 grad Phi(z)]+, with
// grad Phi(z) = H z - b.
struct SgpOperator {
  Matrix F;
  Matrix H;
  Vector b;
  double gamma = 1.0;
};

// F = H_d, gamma = 1: the operator whose F-metric step is one Jacobi round
// of the local QPs.
SgpOperator BuildSgpOperator(const WeightBundle& bundle, const Vector& rhs);

enum class SgpProjection {
  // Clamp of the unconstrained scaled step.
  kEuclidean,
  // argmin over the box of the F-norm distance to the scaled step.
  kScaledMetric,
};

Vector SgpStep(const Vector& z_previous, const SgpOperator& op, const Box& box,
               SgpProjection projection = SgpProjection::kScaledMetric,
               const BoxQpOptions& options = {});

// 2 lambda_min(H_d) > lambda_max(H).
ConditionEntry CheckDmhe2Convergence(const WeightBundle& bundle);

// 8 lambda_min(A' P^-1 A) / lambda_max(P^-1 + O'(R + G Q G'/2)^-1 O) < 1.
// The details also carry 8 lambda_max(A' P^-1 A) / lambda_min(...), a
// diagnostic that is not part of the certificate.
ConditionEntry CheckDmhe2Stability(const WeightBundle& bundle,
                                   const StackedMaps& maps,
                                   const CompositeModel& model);

}  // namespace dmhe

#endif  // DMHE_DMHE2_H_
