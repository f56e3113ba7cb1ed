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

#include "dmhe/dmhe1.h"

#include <string>

#include "dmhe/error.h"

namespace dmhe {

Vector LocalIterate::Stacked() const {
  Vector z(x_hat.size() + w_hat_window.size());
  z << x_hat, w_hat_window;
  return z;
}

void CheckRound(std::span<const LocalIterate> iterates, int num_subsystems,
                int expected_iteration) {
  if (static_cast<int>(iterates.size()) != num_subsystems) {
    throw ProtocolError("expected " + std::to_string(num_subsystems) +
                        " iterates, got " + std::to_string(iterates.size()));
  }
  for (int l = 0; l < num_subsystems; ++l) {
    if (iterates[l].subsystem != l) {
      throw ProtocolError("iterate slot " + std::to_string(l) +
                          " holds subsystem " +
                          std::to_string(iterates[l].subsystem));
    }
    if (iterates[l].iteration != expected_iteration) {
      throw ProtocolError("subsystem " + std::to_string(l) +
                          " sent iteration " +
                          std::to_string(iterates[l].iteration) +
                          ", expected " + std::to_string(expected_iteration));
    }
  }
}

Vector StackIterates(const DecisionLayout& layout,
                     std::span<const LocalIterate> iterates) {
  CheckRound(iterates, layout.num_subsystems(),
             iterates.empty() ? 0 : iterates[0].iteration);
  Vector z(layout.size());
  for (const LocalIterate& it : iterates) {
    const Vector zi = it.Stacked();
    if (zi.size() != static_cast<Index>(layout.z_indices(it.subsystem).size())) {
      throw DimensionError("iterate of subsystem " +
                           std::to_string(it.subsystem) + " has wrong size");
    }
    Scatter(zi, layout.z_indices(it.subsystem), z);
  }
  return z;
}

std::vector<LocalIterate> UnstackIterates(const DecisionLayout& layout,
                                          const Vector& z, int iteration) {
  if (z.size() != layout.size()) throw DimensionError("UnstackIterates: size");
  std::vector<LocalIterate> out;
  for (int i = 0; i < layout.num_subsystems(); ++i) {
    out.push_back({i, Gather(z, layout.x_indices(i)),
                   Gather(z, layout.w_indices(i)), iteration});
  }
  return out;
}

Vector NeighbourResidual(int i, const Vector& input_free_outputs,
                         const Vector& z_previous, const WeightBundle& bundle) {
  // Own entries zeroed rather than added back, so z_i cannot leak in
  // through cancellation error.
  Vector others = z_previous;
  for (Index g : bundle.layout.z_indices(i)) others(g) = 0.0;
  return input_free_outputs - bundle.Pi * others;
}

Dmhe1Estimator::Dmhe1Estimator(const CompositeModel& model,
                               const StackedMaps& maps,
                               const WeightBundle& bundle)
    : model_(model), maps_(maps), bundle_(bundle) {
  for (int i = 0; i < model.num_subsystems(); ++i) {
    const std::string who = "subsystem " + std::to_string(i);
    const ColumnBlock cols = ExtractColumnBlock(maps, model, i);
    LocalFactors f;
    f.o = cols.O;
    f.gamma = cols.Gamma;
    f.r_inv_o = bundle.R_bold_inv * f.o;
    f.r_inv_gamma = bundle.R_bold_inv * f.gamma;
    const Matrix& p_inv = bundle.P_i_inv[i];
    const Matrix& q_inv = bundle.Q_bold_i_inv[i];
    const Matrix p = SpdInverse(p_inv, who + " P_i^-1");
    const Matrix& q = bundle.Q_bold_i[i];

    Matrix m11 = p_inv + f.o.transpose() * f.r_inv_o;
    Matrix m22 = q_inv + f.gamma.transpose() * f.r_inv_gamma;
    f.m12 = f.o.transpose() * f.r_inv_gamma;
    f.m21 = f.m12.transpose();
    f.m11 = FactorSpd(0.5 * (m11 + m11.transpose()), who + " m11");
    f.m22 = FactorSpd(0.5 * (m22 + m22.transpose()), who + " m22");

    // Schur complements written through the matrix inversion lemma, so
    // only the outer weights and the measurement weight are inverted.
    const Cholesky r_gq = FactorSpd(
        bundle.R_bold + f.gamma * q * f.gamma.transpose(),
        who + " R + Gamma_i Q_i Gamma_i'");
    Matrix sx = p_inv + f.o.transpose() * r_gq.solve(f.o);
    f.x_schur = FactorSpd(0.5 * (sx + sx.transpose()), who + " state Schur");
    const Cholesky r_op = FactorSpd(bundle.R_bold + f.o * p * f.o.transpose(),
                                    who + " R + O_i P_i O_i'");
    Matrix sw = q_inv + f.gamma.transpose() * r_op.solve(f.gamma);
    f.w_schur =
        FactorSpd(0.5 * (sw + sw.transpose()), who + " disturbance Schur");
    local_.push_back(std::move(f));
  }
}

LocalIterate Dmhe1Estimator::LocalUpdate(int i, const WindowState& window,
                                         std::span<const LocalIterate> previous,
                                         const Vector& prior_i) const {
  if (i < 0 || i >= num_subsystems()) throw UnknownSubsystemError(i);
  window.Validate(model_, maps_.horizon());
  const int p_prev = previous.empty() ? 0 : previous[0].iteration;
  CheckRound(previous, num_subsystems(), p_prev);
  return LocalUpdateStacked(i, InputFreeOutputs(window, maps_),
                            StackIterates(bundle_.layout, previous), prior_i,
                            p_prev + 1);
}

LocalIterate Dmhe1Estimator::LocalUpdateStacked(int i,
                                                const Vector& input_free_outputs,
                                                const Vector& z_previous,
                                                const Vector& prior_i,
                                                int iteration) const {
  if (i < 0 || i >= num_subsystems()) throw UnknownSubsystemError(i);
  const LocalFactors& f = local_[i];
  if (prior_i.size() != f.o.cols()) {
    throw DimensionError("prior of subsystem " + std::to_string(i) +
                         " must have " + std::to_string(f.o.cols()) +
                         " entries");
  }
  const Vector r = NeighbourResidual(i, input_free_outputs, z_previous, bundle_);
  const Vector c1 = bundle_.P_i_inv[i] * prior_i + f.r_inv_o.transpose() * r;
  const Vector c2 = f.r_inv_gamma.transpose() * r;

  LocalIterate out;
  out.subsystem = i;
  out.iteration = iteration;
  out.x_hat = f.x_schur.solve(c1 - f.m12 * f.m22.solve(c2));
  out.w_hat_window = f.w_schur.solve(c2 - f.m21 * f.m11.solve(c1));
  return out;
}

IterationMatrices BuildIterationMatrices(const WeightBundle& bundle) {
  IterationMatrices m;
  m.Md = bundle.H_d;
  m.Mr = bundle.H_r;
  m.Md_llt = FactorSpd(m.Md, "M_d");
  m.spectral_radius_iter = SpectralRadius(m.Md_llt.solve(m.Mr));
  return m;
}

Vector IterationOffset(const WindowState& window, const WeightBundle& bundle,
                       const StackedMaps& maps) {
  return WindowRhs(window, bundle, maps);
}

Vector GlobalIterationStep(const Vector& z_previous,
                           const IterationMatrices& matrices,
                           const Vector& offset) {
  if (z_previous.size() != matrices.Md.rows() ||
      offset.size() != matrices.Md.rows()) {
    throw DimensionError("GlobalIterationStep: size mismatch");
  }
  return matrices.Md_llt.solve(offset - matrices.Mr * z_previous);
}

ConditionEntry CheckIterationConvergence(const IterationMatrices& matrices) {
  ConditionEntry e;
  e.name = "iteration_convergence";
  e.value = matrices.spectral_radius_iter;
  e.relation = "<";
  e.threshold = 1.0;
  e.holds = e.value < 1.0;
  e.details = {{"spectral_radius", e.value}};
  return e;
}

ConditionEntry CheckErrorStability(const WeightBundle& bundle,
                                   const StackedMaps& maps,
                                   const CompositeModel& model) {
  const Matrix& o = maps.O();
  const Matrix& g = maps.Gamma();
  const Cholesky outer = FactorSpd(
      bundle.R_bold + g * bundle.Q_bold * g.transpose(), "R + Gamma Q Gamma'");
  const Matrix info = bundle.P_inv + o.transpose() * outer.solve(o);
  const Cholesky info_llt = FactorSpd(0.5 * (info + info.transpose()),
                                      "P^-1 + O'(R + Gamma Q Gamma')^-1 O");
  const Matrix closed_loop = info_llt.solve(bundle.P_inv * model.A());
  ConditionEntry e;
  e.name = "error_stability_dmhe1";
  e.value = SpectralRadius(closed_loop);
  e.relation = "<";
  e.threshold = 1.0;
  e.holds = e.value < 1.0;
  e.details = {{"spectral_radius", e.value}};
  return e;
}

}  // namespace dmhe
