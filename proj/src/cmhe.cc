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

#include "dmhe/cmhe.h"

#include <string>

#include "dmhe/error.h"

namespace dmhe {

void WindowState::Validate(const CompositeModel& model, int horizon) const {
  const Index ny = model.output_dim(), nu = model.input_dim();
  if (y_window.size() != (horizon + 1) * ny) {
    throw DimensionError("window: expected " +
                         std::to_string((horizon + 1) * ny) +
                         " stacked outputs, got " +
                         std::to_string(y_window.size()));
  }
  if (u_window.size() != horizon * nu) {
    throw DimensionError("window: expected " + std::to_string(horizon * nu) +
                         " stacked inputs, got " +
                         std::to_string(u_window.size()));
  }
  if (prior.size() != model.state_dim()) {
    throw DimensionError("window: prior must have " +
                         std::to_string(model.state_dim()) + " entries");
  }
}

Vector FullEstimate::Stacked() const {
  Vector z(x_hat.size() + w_hat_window.size());
  z << x_hat, w_hat_window;
  return z;
}

FullEstimate SplitDecision(const Vector& z, Index state_dim) {
  FullEstimate e;
  e.x_hat = z.head(state_dim);
  e.w_hat_window = z.tail(z.size() - state_dim);
  return e;
}

Vector InputFreeOutputs(const WindowState& window, const StackedMaps& maps) {
  if (maps.Lambda().cols() == 0) return window.y_window;
  return window.y_window - maps.Lambda() * window.u_window;
}

Vector WindowRhs(const WindowState& window, const WeightBundle& bundle,
                 const StackedMaps& maps) {
  const Vector r_inv_y = bundle.R_bold_inv * InputFreeOutputs(window, maps);
  Vector b(bundle.layout.size());
  const Index nx = maps.O().cols();
  b.head(nx) = bundle.P_inv * window.prior + maps.O().transpose() * r_inv_y;
  b.tail(b.size() - nx) = maps.Gamma().transpose() * r_inv_y;
  return b;
}

double WindowObjective(const Vector& z, const WindowState& window,
                       const CompositeModel& model,
                       const EstimatorWeights& weights, int horizon) {
  window.Validate(model, horizon);
  const Index nx = model.state_dim(), nu = model.input_dim(),
              ny = model.output_dim();
  if (z.size() != nx * (horizon + 1)) {
    throw DimensionError("WindowObjective: decision vector size");
  }
  std::vector<Matrix> p, q, r;
  for (const SubsystemWeights& w : weights.subsystems) {
    p.push_back(w.P);
    q.push_back(w.Q);
    r.push_back(w.R);
  }
  const Cholesky p_llt = FactorSpd(BlockDiagonal(p), "P");
  const Cholesky q_llt = FactorSpd(BlockDiagonal(q), "Q");
  const Cholesky r_llt = FactorSpd(BlockDiagonal(r), "R");
  auto weighted = [](const Cholesky& llt, const Vector& v) {
    return v.dot(llt.solve(v));
  };

  Vector x = z.head(nx);
  double cost = weighted(p_llt, x - window.prior);
  for (int t = 0; t <= horizon; ++t) {
    const Vector v = window.y_window.segment(t * ny, ny) - model.C() * x;
    cost += weighted(r_llt, v);
    if (t == horizon) break;
    const Vector w = z.segment(nx * (t + 1), nx);
    cost += weighted(q_llt, w);
    x = model.A() * x + w;
    if (nu > 0) x += model.B() * window.u_window.segment(t * nu, nu);
  }
  return 0.5 * cost;
}

Vector WindowGradient(const Vector& z, const Vector& rhs,
                      const WeightBundle& bundle) {
  return bundle.H * z - rhs;
}

FullEstimate SolveCmheUnconstrained(const WindowState& window,
                                    const WeightBundle& bundle,
                                    const StackedMaps& maps,
                                    const CompositeModel& model,
                                    const EstimatorWeights& weights) {
  window.Validate(model, maps.horizon());
  const Cholesky llt = FactorSpd(bundle.H, "centralized MHE Hessian");
  const Vector z = llt.solve(WindowRhs(window, bundle, maps));
  FullEstimate e = SplitDecision(z, model.state_dim());
  e.objective_value = WindowObjective(z, window, model, weights, maps.horizon());
  return e;
}

FullEstimate SolveCmheConstrained(const WindowState& window,
                                  const WeightBundle& bundle,
                                  const StackedMaps& maps,
                                  const CompositeModel& model,
                                  const EstimatorWeights& weights,
                                  const BoxConstraints& boxes,
                                  const BoxQpOptions& options) {
  window.Validate(model, maps.horizon());
  boxes.Validate(model);
  const Box box = boxes.Global(bundle.layout);
  const Vector rhs = WindowRhs(window, bundle, maps);
  const BoxQp qp(bundle.H, options);
  // Start from the clamped unconstrained minimizer.
  const Vector z0 = FactorSpd(bundle.H, "centralized MHE Hessian").solve(rhs);
  const BoxQpResult res = qp.Solve(rhs, box, z0);
  FullEstimate e = SplitDecision(res.z, model.state_dim());
  e.objective_value =
      WindowObjective(res.z, window, model, weights, maps.horizon());
  return e;
}

}  // namespace dmhe
