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

#include "dmhe/weights.h"

#include <string>

#include "dmhe/error.h"

namespace dmhe {
namespace {

std::string Label(const char* name, int i) {
  return std::string(name) + "_" + std::to_string(i);
}

void CheckSquare(const Matrix& m, Index dim, const std::string& label) {
  if (m.rows() != dim || m.cols() != dim) {
    throw DimensionError(label + " must be " + std::to_string(dim) + "x" +
                         std::to_string(dim) + ", got " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

void CheckSymmetricPd(const Matrix& m, const std::string& label) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (!(m - m.transpose()).isZero(1e-12 * scale)) {
    throw ConditioningError(label + ": not symmetric");
  }
  FactorSpd(m, label);
}

}  // namespace

EstimatorWeights EstimatorWeights::Uniform(const CompositeModel& model,
                                           double p, double q, double r) {
  EstimatorWeights w;
  for (const SubsystemBlock& blk : model.partition()) {
    w.subsystems.push_back({p * Matrix::Identity(blk.state_dim, blk.state_dim),
                            q * Matrix::Identity(blk.state_dim, blk.state_dim),
                            r * Matrix::Identity(blk.output_dim,
                                                 blk.output_dim)});
  }
  return w;
}

void EstimatorWeights::Validate(const CompositeModel& model) const {
  if (static_cast<int>(subsystems.size()) != model.num_subsystems()) {
    throw DimensionError("weights given for " +
                         std::to_string(subsystems.size()) +
                         " subsystems, model has " +
                         std::to_string(model.num_subsystems()));
  }
  for (int i = 0; i < model.num_subsystems(); ++i) {
    const SubsystemBlock& blk = model.block(i);
    const SubsystemWeights& w = subsystems[i];
    CheckSquare(w.P, blk.state_dim, Label("P", i));
    CheckSquare(w.Q, blk.state_dim, Label("Q", i));
    CheckSquare(w.R, blk.output_dim, Label("R", i));
    CheckSymmetricPd(w.P, Label("P", i));
    CheckSymmetricPd(w.Q, Label("Q", i));
    CheckSymmetricPd(w.R, Label("R", i));
  }
}

DecisionLayout::DecisionLayout(const CompositeModel& model, int horizon)
    : horizon_(horizon) {
  if (horizon < 1) throw DimensionError("DecisionLayout: horizon must be >= 1");
  const int n = model.num_subsystems();
  const std::vector<int> state_owner = model.StateOwner();
  owner_ = state_owner;
  for (int s = 0; s < horizon; ++s) {
    owner_.insert(owner_.end(), state_owner.begin(), state_owner.end());
  }
  x_idx_.resize(n);
  w_idx_.resize(n);
  z_idx_.resize(n);
  for (int i = 0; i < n; ++i) {
    x_idx_[i] = StateIndices(model, i);
    w_idx_[i] = DisturbanceIndices(model, horizon, i);
    for (Index& j : w_idx_[i]) j += model.state_dim();
    z_idx_[i] = x_idx_[i];
    z_idx_[i].insert(z_idx_[i].end(), w_idx_[i].begin(), w_idx_[i].end());
    perm_.insert(perm_.end(), z_idx_[i].begin(), z_idx_[i].end());
  }
}

const std::vector<Index>& DecisionLayout::x_indices(int i) const {
  if (i < 0 || i >= num_subsystems()) throw UnknownSubsystemError(i);
  return x_idx_[i];
}

const std::vector<Index>& DecisionLayout::w_indices(int i) const {
  if (i < 0 || i >= num_subsystems()) throw UnknownSubsystemError(i);
  return w_idx_[i];
}

const std::vector<Index>& DecisionLayout::z_indices(int i) const {
  if (i < 0 || i >= num_subsystems()) throw UnknownSubsystemError(i);
  return z_idx_[i];
}

Vector DecisionLayout::ToSubsystemMajor(const Vector& z) const {
  if (z.size() != size()) throw DimensionError("ToSubsystemMajor: bad size");
  return Gather(z, perm_);
}

Vector DecisionLayout::FromSubsystemMajor(const Vector& z_sub) const {
  if (z_sub.size() != size()) {
    throw DimensionError("FromSubsystemMajor: bad size");
  }
  Vector z(size());
  Scatter(z_sub, perm_, z);
  return z;
}

WeightBundle DeriveComposites(const EstimatorWeights& weights,
                              const StackedMaps& maps,
                              const CompositeModel& model) {
  weights.Validate(model);
  const int n = model.num_subsystems();
  const int horizon = maps.horizon();
  const Index nx = model.state_dim();
  if (maps.O().cols() != nx ||
      maps.O().rows() != (horizon + 1) * model.output_dim()) {
    throw DimensionError("DeriveComposites: stacked maps do not match model");
  }

  WeightBundle b{DecisionLayout(model, horizon)};
  std::vector<Matrix> p_blocks, p_inv_blocks, q_blocks, q_inv_blocks,
      r_blocks, r_inv_blocks;
  for (int i = 0; i < n; ++i) {
    const SubsystemWeights& w = weights.subsystems[i];
    p_blocks.push_back(w.P);
    p_inv_blocks.push_back(SpdInverse(w.P, Label("P", i)));
    q_blocks.push_back(w.Q);
    q_inv_blocks.push_back(SpdInverse(w.Q, Label("Q", i)));
    r_blocks.push_back(w.R);
    r_inv_blocks.push_back(SpdInverse(w.R, Label("R", i)));
  }
  b.P = BlockDiagonal(p_blocks);
  b.P_inv = BlockDiagonal(p_inv_blocks);
  const Matrix q = BlockDiagonal(q_blocks);
  const Matrix q_inv = BlockDiagonal(q_inv_blocks);
  const Matrix r = BlockDiagonal(r_blocks);
  const Matrix r_inv = BlockDiagonal(r_inv_blocks);
  b.Q_bold = RepeatBlockDiagonal(q, horizon);
  b.Q_bold_inv = RepeatBlockDiagonal(q_inv, horizon);
  b.R_bold = RepeatBlockDiagonal(r, horizon + 1);
  b.R_bold_inv = RepeatBlockDiagonal(r_inv, horizon + 1);
  b.R_bold_llt = FactorSpd(b.R_bold, "R");

  const Matrix pq[] = {b.P, b.Q_bold};
  const Matrix pq_inv[] = {b.P_inv, b.Q_bold_inv};
  b.Q_tilde = BlockDiagonal(pq);
  b.Q_tilde_inv = BlockDiagonal(pq_inv);

  const Matrix& o = maps.O();
  const Matrix& g = maps.Gamma();
  b.Pi.resize(o.rows(), o.cols() + g.cols());
  b.Pi << o, g;

  const Matrix r_inv_o = b.R_bold_inv * o;
  const Matrix r_inv_g = b.R_bold_inv * g;
  b.OtRO = o.transpose() * r_inv_o;
  b.OtRG = o.transpose() * r_inv_g;
  b.GtRG = g.transpose() * r_inv_g;
  // Exact symmetry keeps the eigen-solvers and Cholesky honest.
  b.OtRO = 0.5 * (b.OtRO + b.OtRO.transpose()).eval();
  b.GtRG = 0.5 * (b.GtRG + b.GtRG.transpose()).eval();

  const std::vector<int> x_owner = model.StateOwner();
  std::vector<int> w_owner;
  for (int s = 0; s < horizon; ++s) {
    w_owner.insert(w_owner.end(), x_owner.begin(), x_owner.end());
  }
  b.OtRO_d = SameOwnerPart(b.OtRO, x_owner, x_owner);
  b.OtRO_r = b.OtRO - b.OtRO_d;
  b.OtRG_d = SameOwnerPart(b.OtRG, x_owner, w_owner);
  b.OtRG_r = b.OtRG - b.OtRG_d;
  b.GtRG_d = SameOwnerPart(b.GtRG, w_owner, w_owner);
  b.GtRG_r = b.GtRG - b.GtRG_d;

  const Index nz = b.layout.size();
  b.H.resize(nz, nz);
  b.H << b.P_inv + b.OtRO, b.OtRG, b.OtRG.transpose(), b.Q_bold_inv + b.GtRG;
  const std::vector<int>& owner = b.layout.owner();
  b.H_d = SameOwnerPart(b.H, owner, owner);
  b.H_r = b.H - b.H_d;

  for (int i = 0; i < n; ++i) {
    b.P_i_inv.push_back(p_inv_blocks[i]);
    b.Q_bold_i.push_back(RepeatBlockDiagonal(q_blocks[i], horizon));
    b.Q_bold_i_inv.push_back(RepeatBlockDiagonal(q_inv_blocks[i], horizon));
    b.Pi_i.push_back(GatherColumns(b.Pi, b.layout.z_indices(i)));
  }
  return b;
}

}  // namespace dmhe
