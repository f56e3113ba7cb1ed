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

#ifndef DMHE_MODEL_H_
#define DMHE_MODEL_H_

#include <map>
#include <span>
#include <vector>

#include "dmhe/linalg.h"

namespace dmhe {

// One subsystem of a partitioned linear system
//   x+_i = A_ii x_i + sum_j A_ij x_j + B_ii u_i + sum_j B_ij u_j + w_i
//   y_i  = C_ii x_i + v_i
// Subsystem ids are 0-based. Coupling maps never contain the subsystem's
// own id; a missing entry means a zero block.
struct SubsystemModel {
  int id = 0;
  Matrix a_self;
  std::map<int, Matrix> a_coupling;
  Matrix b_self;
  std::map<int, Matrix> b_coupling;
  Matrix c_self;

  Index state_dim() const { return a_self.rows(); }
  Index input_dim() const { return b_self.cols(); }
  Index output_dim() const { return c_self.rows(); }

  // Checks the invariants that do not depend on the neighbours.
  void Validate() const;
};

struct SubsystemBlock {
  Index state_offset = 0;
  Index input_offset = 0;
  Index output_offset = 0;
  Index state_dim = 0;
  Index input_dim = 0;
  Index output_dim = 0;
};

// Assembled (A, B, C) with the partition bookkeeping. Immutable.
class CompositeModel {
 public:
  CompositeModel(Matrix a, Matrix b, Matrix c,
                 std::vector<SubsystemBlock> partition);

  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  const Matrix& C() const { return c_; }

  int num_subsystems() const { return static_cast<int>(partition_.size()); }
  const std::vector<SubsystemBlock>& partition() const { return partition_; }
  // Throws UnknownSubsystemError.
  const SubsystemBlock& block(int i) const;

  Index state_dim() const { return a_.rows(); }
  Index input_dim() const { return b_.cols(); }
  Index output_dim() const { return c_.rows(); }

  // Subsystem id of every state / output component.
  std::vector<int> StateOwner() const;
  std::vector<int> OutputOwner() const;

  // Inverse of AssembleComposite for one subsystem. Zero coupling blocks are
  // omitted from the coupling maps.
  SubsystemModel ExtractSubsystem(int i) const;

 private:
  Matrix a_, b_, c_;
  std::vector<SubsystemBlock> partition_;
};

// Block-assembles the composite model. Subsystems must carry ids 0..n-1
// (in any order); the partition follows id order. Throws DimensionError
// naming both subsystems on an inconsistent coupling block.
CompositeModel AssembleComposite(std::span<const SubsystemModel> subsystems);

// Horizon-stacked maps from (x_{k-N}, {w}, {u}) to {y}_{k-N}^{k}:
//   O      = [C; CA; ...; CA^N]
//   Gamma  block (t, s) = C A^{t-s-1} for s < t, zero otherwise
//   Lambda block (t, s) = C A^{t-s-1} B for s < t, zero otherwise
// The disturbance and input sequences are stage-major.
class StackedMaps {
 public:
  StackedMaps(int horizon, Matrix o, Matrix gamma, Matrix lambda);

  int horizon() const { return horizon_; }
  const Matrix& O() const { return o_; }
  const Matrix& Gamma() const { return gamma_; }
  const Matrix& Lambda() const { return lambda_; }

 private:
  int horizon_;
  Matrix o_, gamma_, lambda_;
};

// Throws DimensionError when horizon < 1.
StackedMaps BuildStackedMaps(const CompositeModel& model, int horizon);

struct ObservabilityReport {
  bool observable = false;
  Index rank = 0;
  Index required_rank = 0;
  double tolerance = 0.0;
  Vector singular_values;
};

// Rank test of O with tolerance n_x * eps * sigma_max.
ObservabilityReport CheckObservability(const CompositeModel& model,
                                       int horizon);

// Index lists used to cut the stacked maps per subsystem.
std::vector<Index> StateIndices(const CompositeModel& model, int i);
std::vector<Index> DisturbanceIndices(const CompositeModel& model, int horizon,
                                      int i);
std::vector<Index> OutputRowIndices(const CompositeModel& model, int horizon,
                                    int l);

struct ColumnBlock {
  Matrix O;      // O_[:,i]
  Matrix Gamma;  // Gamma_[:,i]
};

struct RowBlock {
  Matrix O;       // O^l
  Matrix Gamma;   // Gamma^l
  Matrix Lambda;  // Lambda^l
};

ColumnBlock ExtractColumnBlock(const StackedMaps& maps,
                               const CompositeModel& model, int i);
RowBlock ExtractRowBlock(const StackedMaps& maps, const CompositeModel& model,
                         int l);

}  // namespace dmhe

#endif  // DMHE_MODEL_H_
