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

#ifndef DMHE_BOX_QP_H_
#define DMHE_BOX_QP_H_

#include "dmhe/box.h"
#include "dmhe/linalg.h"

namespace dmhe {

struct BoxQpOptions {
  enum class Method {
    // Projected gradient with momentum and adaptive restart, run on the
    // Jacobi-scaled problem. Diagonal scaling maps a box to a box, so every
    // iterate is still an exact clamp.
    kAccelerated,
    // Plain projected gradient with step 1/lambda_max(H).
    kProjectedGradient,
  };
  Method method = Method::kAccelerated;
  // Stop once the projected-gradient fixed-point residual
  //   || z - clamp(z - grad(z) / lambda_max(H)) ||_inf
  // drops to this value.
  double tolerance = 1e-10;
  int max_iterations = 50000;
};

struct BoxQpResult {
  Vector z;
  int iterations = 0;
  double residual = 0.0;
};

// min 0.5 z'Hz - c'z  subject to lower <= z <= upper, H symmetric positive
// definite. The Hessian-dependent setup is done once at construction.
class BoxQp {
 public:
  explicit BoxQp(Matrix hessian, BoxQpOptions options = {});

  // Throws ConvergenceError (carrying the residual) at the iteration cap.
  BoxQpResult Solve(const Vector& c, const Box& box, const Vector& z0) const;

  // Fixed-point residual used as stopping test.
  double Residual(const Vector& c, const Box& box, const Vector& z) const;

  const Matrix& hessian() const { return h_; }
  double lambda_max() const { return lambda_max_; }
  const BoxQpOptions& options() const { return options_; }

 private:
  BoxQpResult SolvePlain(const Vector& c, const Box& box, Vector z) const;
  BoxQpResult SolveAccelerated(const Vector& c, const Box& box,
                               const Vector& z0) const;

  Matrix h_;
  BoxQpOptions options_;
  double lambda_max_ = 0.0;
  Vector scale_;       // 1 / sqrt(diag H)
  Matrix h_scaled_;    // S H S
  double scaled_lambda_max_ = 0.0;
};

}  // namespace dmhe

#endif  // DMHE_BOX_QP_H_
