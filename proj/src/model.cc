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

#include "dmhe/model.h"

#include <algorithm>
#include <string>

#include "dmhe/error.h"

namespace dmhe {
namespace {

std::string Dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

void SubsystemModel::Validate() const {
  const std::string name = "subsystem " + std::to_string(id);
  if (a_self.rows() <= 0 || a_self.rows() != a_self.cols()) {
    throw DimensionError(name + ": A_self must be square and nonempty, got " +
                         Dims(a_self));
  }
  if (c_self.rows() <= 0 || c_self.cols() != state_dim()) {
    throw DimensionError(name + ": C_self must be n_y x " +
                         std::to_string(state_dim()) + ", got " +
                         Dims(c_self));
  }
  // n_u may be zero (no local inputs); the row count must still agree.
  if (b_self.rows() != state_dim()) {
    throw DimensionError(name + ": B_self must have " +
                         std::to_string(state_dim()) + " rows, got " +
                         Dims(b_self));
  }
  for (const auto& [j, m] : a_coupling) {
    if (j == id) throw DimensionError(name + ": A coupling lists itself");
    if (m.rows() != state_dim()) {
      throw DimensionError(name + ": A coupling to subsystem " +
                           std::to_string(j) + " has " +
                           std::to_string(m.rows()) + " rows");
    }
  }
  for (const auto& [j, m] : b_coupling) {
    if (j == id) throw DimensionError(name + ": B coupling lists itself");
    if (m.rows() != state_dim()) {
      throw DimensionError(name + ": B coupling to subsystem " +
                           std::to_string(j) + " has " +
                           std::to_string(m.rows()) + " rows");
    }
  }
}

CompositeModel::CompositeModel(Matrix a, Matrix b, Matrix c,
                               std::vector<SubsystemBlock> partition)
    : a_(std::move(a)),
      b_(std::move(b)),
      c_(std::move(c)),
      partition_(std::move(partition)) {
  Index nx = 0, nu = 0, ny = 0;
  for (const SubsystemBlock& blk : partition_) {
    nx += blk.state_dim;
    nu += blk.input_dim;
    ny += blk.output_dim;
  }
  if (a_.rows() != nx || a_.cols() != nx || b_.rows() != nx ||
      b_.cols() != nu || c_.rows() != ny || c_.cols() != nx) {
    throw DimensionError("CompositeModel: matrices do not match partition");
  }
}

const SubsystemBlock& CompositeModel::block(int i) const {
  if (i < 0 || i >= num_subsystems()) throw UnknownSubsystemError(i);
  return partition_[i];
}

std::vector<int> CompositeModel::StateOwner() const {
  std::vector<int> owner;
  owner.reserve(state_dim());
  for (int i = 0; i < num_subsystems(); ++i) {
    owner.insert(owner.end(), partition_[i].state_dim, i);
  }
  return owner;
}

std::vector<int> CompositeModel::OutputOwner() const {
  std::vector<int> owner;
  owner.reserve(output_dim());
  for (int i = 0; i < num_subsystems(); ++i) {
    owner.insert(owner.end(), partition_[i].output_dim, i);
  }
  return owner;
}

SubsystemModel CompositeModel::ExtractSubsystem(int i) const {
  const SubsystemBlock& me = block(i);
  SubsystemModel sub;
  sub.id = i;
  sub.a_self = a_.block(me.state_offset, me.state_offset, me.state_dim,
                        me.state_dim);
  sub.b_self = b_.block(me.state_offset, me.input_offset, me.state_dim,
                        me.input_dim);
  sub.c_self = c_.block(me.output_offset, me.state_offset, me.output_dim,
                        me.state_dim);
  for (int j = 0; j < num_subsystems(); ++j) {
    if (j == i) continue;
    const SubsystemBlock& other = partition_[j];
    Matrix aij = a_.block(me.state_offset, other.state_offset, me.state_dim,
                          other.state_dim);
    if (!aij.isZero(0.0)) sub.a_coupling.emplace(j, std::move(aij));
    Matrix bij = b_.block(me.state_offset, other.input_offset, me.state_dim,
                          other.input_dim);
    if (bij.size() > 0 && !bij.isZero(0.0)) {
      sub.b_coupling.emplace(j, std::move(bij));
    }
  }
  return sub;
}

CompositeModel AssembleComposite(std::span<const SubsystemModel> subsystems) {
  const int n = static_cast<int>(subsystems.size());
  if (n == 0) throw DimensionError("AssembleComposite: no subsystems");

  std::vector<const SubsystemModel*> by_id(n, nullptr);
  for (const SubsystemModel& s : subsystems) {
    s.Validate();
    if (s.id < 0 || s.id >= n) {
      throw DimensionError("AssembleComposite: subsystem id " +
                           std::to_string(s.id) + " outside 0.." +
                           std::to_string(n - 1));
    }
    if (by_id[s.id] != nullptr) {
      throw DimensionError("AssembleComposite: duplicate subsystem id " +
                           std::to_string(s.id));
    }
    by_id[s.id] = &s;
  }

  std::vector<SubsystemBlock> partition(n);
  Index nx = 0, nu = 0, ny = 0;
  for (int i = 0; i < n; ++i) {
    const SubsystemModel& s = *by_id[i];
    partition[i] = {nx, nu, ny, s.state_dim(), s.input_dim(), s.output_dim()};
    nx += s.state_dim();
    nu += s.input_dim();
    ny += s.output_dim();
  }

  Matrix a = Matrix::Zero(nx, nx);
  Matrix b = Matrix::Zero(nx, nu);
  Matrix c = Matrix::Zero(ny, nx);
  for (int i = 0; i < n; ++i) {
    const SubsystemModel& s = *by_id[i];
    const SubsystemBlock& me = partition[i];
    a.block(me.state_offset, me.state_offset, me.state_dim, me.state_dim) =
        s.a_self;
    b.block(me.state_offset, me.input_offset, me.state_dim, me.input_dim) =
        s.b_self;
    c.block(me.output_offset, me.state_offset, me.output_dim, me.state_dim) =
        s.c_self;
    for (const auto& [j, m] : s.a_coupling) {
      if (j < 0 || j >= n) {
        throw DimensionError("subsystem " + std::to_string(i) +
                             " couples to unknown subsystem " +
                             std::to_string(j));
      }
      const SubsystemBlock& other = partition[j];
      if (m.cols() != other.state_dim) {
        throw DimensionError("A coupling from subsystem " + std::to_string(i) +
                             " to subsystem " + std::to_string(j) + " has " +
                             std::to_string(m.cols()) +
                             " columns but subsystem " + std::to_string(j) +
                             " has " + std::to_string(other.state_dim) +
                             " states");
      }
      a.block(me.state_offset, other.state_offset, me.state_dim,
              other.state_dim) = m;
    }
    for (const auto& [j, m] : s.b_coupling) {
      if (j < 0 || j >= n) {
        throw DimensionError("subsystem " + std::to_string(i) +
                             " couples to unknown subsystem " +
                             std::to_string(j));
      }
      const SubsystemBlock& other = partition[j];
      if (m.cols() != other.input_dim) {
        throw DimensionError("B coupling from subsystem " + std::to_string(i) +
                             " to subsystem " + std::to_string(j) + " has " +
                             std::to_string(m.cols()) +
                             " columns but subsystem " + std::to_string(j) +
                             " has " + std::to_string(other.input_dim) +
                             " inputs");
      }
      b.block(me.state_offset, other.input_offset, me.state_dim,
              other.input_dim) = m;
    }
  }
  return CompositeModel(std::move(a), std::move(b), std::move(c),
                        std::move(partition));
}

StackedMaps::StackedMaps(int horizon, Matrix o, Matrix gamma, Matrix lambda)
    : horizon_(horizon),
      o_(std::move(o)),
      gamma_(std::move(gamma)),
      lambda_(std::move(lambda)) {}

StackedMaps BuildStackedMaps(const CompositeModel& model, int horizon) {
  if (horizon < 1) {
    throw DimensionError("BuildStackedMaps: horizon must be >= 1, got " +
                         std::to_string(horizon));
  }
  const Index nx = model.state_dim();
  const Index nu = model.input_dim();
  const Index ny = model.output_dim();
  const int stages = horizon + 1;

  // ca_pow[t] = C A^t, t = 0..N
  std::vector<Matrix> ca_pow(stages);
  ca_pow[0] = model.C();
  for (int t = 1; t < stages; ++t) ca_pow[t] = ca_pow[t - 1] * model.A();

  Matrix o(stages * ny, nx);
  for (int t = 0; t < stages; ++t) o.middleRows(t * ny, ny) = ca_pow[t];

  Matrix gamma = Matrix::Zero(stages * ny, horizon * nx);
  Matrix lambda = Matrix::Zero(stages * ny, horizon * nu);
  for (int t = 1; t < stages; ++t) {
    for (int s = 0; s < t; ++s) {
      const Matrix& cap = ca_pow[t - s - 1];
      gamma.block(t * ny, s * nx, ny, nx) = cap;
      if (nu > 0) lambda.block(t * ny, s * nu, ny, nu) = cap * model.B();
    }
  }
  return StackedMaps(horizon, std::move(o), std::move(gamma),
                     std::move(lambda));
}

ObservabilityReport CheckObservability(const CompositeModel& model,
                                       int horizon) {
  const StackedMaps maps = BuildStackedMaps(model, horizon);
  Eigen::JacobiSVD<Matrix> svd(maps.O());
  ObservabilityReport report;
  report.singular_values = svd.singularValues();
  report.required_rank = model.state_dim();
  report.tolerance = RankTolerance(report.singular_values, model.state_dim());
  report.rank = 0;
  for (Index j = 0; j < report.singular_values.size(); ++j) {
    if (report.singular_values(j) > report.tolerance) ++report.rank;
  }
  report.observable = report.rank == report.required_rank;
  return report;
}

std::vector<Index> StateIndices(const CompositeModel& model, int i) {
  const SubsystemBlock& blk = model.block(i);
  std::vector<Index> idx(blk.state_dim);
  for (Index j = 0; j < blk.state_dim; ++j) idx[j] = blk.state_offset + j;
  return idx;
}

std::vector<Index> DisturbanceIndices(const CompositeModel& model, int horizon,
                                      int i) {
  const SubsystemBlock& blk = model.block(i);
  const Index nx = model.state_dim();
  std::vector<Index> idx;
  idx.reserve(horizon * blk.state_dim);
  for (int s = 0; s < horizon; ++s) {
    for (Index j = 0; j < blk.state_dim; ++j) {
      idx.push_back(s * nx + blk.state_offset + j);
    }
  }
  return idx;
}

std::vector<Index> OutputRowIndices(const CompositeModel& model, int horizon,
                                    int l) {
  const SubsystemBlock& blk = model.block(l);
  const Index ny = model.output_dim();
  std::vector<Index> idx;
  idx.reserve((horizon + 1) * blk.output_dim);
  for (int t = 0; t <= horizon; ++t) {
    for (Index j = 0; j < blk.output_dim; ++j) {
      idx.push_back(t * ny + blk.output_offset + j);
    }
  }
  return idx;
}

ColumnBlock ExtractColumnBlock(const StackedMaps& maps,
                               const CompositeModel& model, int i) {
  const std::vector<Index> x_idx = StateIndices(model, i);
  const std::vector<Index> w_idx =
      DisturbanceIndices(model, maps.horizon(), i);
  return {GatherColumns(maps.O(), x_idx), GatherColumns(maps.Gamma(), w_idx)};
}

RowBlock ExtractRowBlock(const StackedMaps& maps, const CompositeModel& model,
                         int l) {
  const std::vector<Index> rows = OutputRowIndices(model, maps.horizon(), l);
  return {GatherRows(maps.O(), rows), GatherRows(maps.Gamma(), rows),
          GatherRows(maps.Lambda(), rows)};
}

}  // namespace dmhe
