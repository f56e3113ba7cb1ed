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

#ifndef DMHE_WEIGHTS_H_
#define DMHE_WEIGHTS_H_

#include <vector>

#include "dmhe/linalg.h"
#include "dmhe/model.h"

namespace dmhe {

// Tuning of one local estimator: prior weight P_i, disturbance weight Q_i
// and measurement weight R_i. The cost uses their inverses.
struct SubsystemWeights {
  Matrix P;
  Matrix Q;
  Matrix R;
};

struct EstimatorWeights {
  std::vector<SubsystemWeights> subsystems;

  // Scaled identities p*I, q*I, r*I for every subsystem.
  static EstimatorWeights Uniform(const CompositeModel& model, double p,
                                  double q, double r);

  // Sizes against the partition and positive definiteness. Throws
  // DimensionError or ConditioningError naming e.g. "P_1".
  void Validate(const CompositeModel& model) const;
};

// Ordering of the stacked decision vector
//   z = [x_{k-N} (n_x); w_{k-N}; ...; w_{k-1}]   (stage-major, n_x each)
// and the per-subsystem index sets into it.
class DecisionLayout {
 public:
  DecisionLayout(const CompositeModel& model, int horizon);

  int horizon() const { return horizon_; }
  Index size() const { return static_cast<Index>(owner_.size()); }
  int num_subsystems() const { return static_cast<int>(x_idx_.size()); }

  // Subsystem owning each component of z.
  const std::vector<int>& owner() const { return owner_; }

  // Global positions of x^i, of {w^i} (stage-major) and of z_i = (x^i, w^i).
  const std::vector<Index>& x_indices(int i) const;
  const std::vector<Index>& w_indices(int i) const;
  const std::vector<Index>& z_indices(int i) const;

  // z in subsystem-major order [z_1; ...; z_n] and back.
  Vector ToSubsystemMajor(const Vector& z) const;
  Vector FromSubsystemMajor(const Vector& z_sub) const;
  // Permutation list: entry m of the subsystem-major vector is z(perm[m]).
  const std::vector<Index>& subsystem_major_order() const { return perm_; }

 private:
  int horizon_;
  std::vector<int> owner_;
  std::vector<std::vector<Index>> x_idx_, w_idx_, z_idx_;
  std::vector<Index> perm_;
};

// Everything the estimators and certificates need, derived once per
// (model, horizon, weights). All matrices are in the global z ordering
// unless the name says otherwise.
struct WeightBundle {
  DecisionLayout layout;

  Matrix P, P_inv;            // blkdiag(P_i)
  Matrix Q_bold, Q_bold_inv;  // N stages of blkdiag(Q_i)
  Matrix R_bold, R_bold_inv;  // N + 1 stages of blkdiag(R_i)
  Cholesky R_bold_llt;
  Matrix Q_tilde, Q_tilde_inv;  // blkdiag(P, Q_bold)

  Matrix Pi;  // [O Gamma]

  // Blocks of Pi^T R^-1 Pi and their same-subsystem / cross-subsystem
  // parts; (.)_d + (.)_r reproduces the full block.
  Matrix OtRO, OtRO_d, OtRO_r;
  Matrix OtRG, OtRG_d, OtRG_r;
  Matrix GtRG, GtRG_d, GtRG_r;

  // Hessian of the window objective, H = Q_tilde^-1 + Pi^T R^-1 Pi, and its
  // split. H_d keeps P^-1 and Q_bold^-1 since both are block diagonal.
  Matrix H, H_d, H_r;

  // Per-subsystem pieces.
  std::vector<Matrix> P_i_inv;       // P_i^-1
  std::vector<Matrix> Q_bold_i;      // N copies of Q_i
  std::vector<Matrix> Q_bold_i_inv;  // N copies of Q_i^-1
  std::vector<Matrix> Pi_i;          // [O_{:,i} Gamma_{:,i}]

  WeightBundle(DecisionLayout l) : layout(std::move(l)) {}
};

WeightBundle DeriveComposites(const EstimatorWeights& weights,
                              const StackedMaps& maps,
                              const CompositeModel& model);

}  // namespace dmhe

#endif  // DMHE_WEIGHTS_H_
