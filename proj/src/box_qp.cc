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

#include "dmhe/box_qp.h"

#include <cmath>
#include <string>

#include "dmhe/error.h"

namespace dmhe {

BoxQp::BoxQp(Matrix hessian, BoxQpOptions options)
    : h_(std::move(hessian)), options_(options) {
  if (h_.rows() != h_.cols() || h_.rows() == 0) {
    throw DimensionError("BoxQp: Hessian must be square and nonempty");
  }
  FactorSpd(h_, "box QP Hessian");
  lambda_max_ = SymmetricEigenExtremes(h_).max;
  scale_ = h_.diagonal().cwiseSqrt().cwiseInverse();
  h_scaled_ = scale_.asDiagonal() * h_ * scale_.asDiagonal();
  scaled_lambda_max_ = SymmetricEigenExtremes(h_scaled_).max;
}

double BoxQp::Residual(const Vector& c, const Box& box, const Vector& z) const {
  const Vector grad = h_ * z - c;
  return (z - ProjectBox(z - grad / lambda_max_, box)).lpNorm<Eigen::Infinity>();
}

BoxQpResult BoxQp::Solve(const Vector& c, const Box& box,
                         const Vector& z0) const {
  if (c.size() != h_.rows() || box.size() != h_.rows() ||
      z0.size() != h_.rows()) {
    throw DimensionError("BoxQp::Solve: size mismatch");
  }
  const Vector start = ProjectBox(z0, box);
  BoxQpResult result = options_.method == BoxQpOptions::Method::kAccelerated
                           ? SolveAccelerated(c, box, start)
                           : SolvePlain(c, box, start);
  // Guard against round-off in the unscaling.
  result.z = ProjectBox(result.z, box);
  return result;
}

BoxQpResult BoxQp::SolvePlain(const Vector& c, const Box& box,
                              Vector z) const {
  const double step = 1.0 / lambda_max_;
  double residual = 0.0;
  for (int it = 1; it <= options_.max_iterations; ++it) {
    const Vector next = ProjectBox(z - step * (h_ * z - c), box);
    residual = (next - z).lpNorm<Eigen::Infinity>();
    z = next;
    if (residual <= options_.tolerance) return {z, it, residual};
  }
  throw ConvergenceError("box QP: projected gradient hit the iteration cap (" +
                             std::to_string(options_.max_iterations) +
                             "), residual " + std::to_string(residual),
                         residual, options_.max_iterations);
}

BoxQpResult BoxQp::SolveAccelerated(const Vector& c, const Box& box,
                                    const Vector& z0) const {
  // Work in y = S^-1 z, where the problem is 0.5 y'(SHS)y - (Sc)'y over the
  // box [S^-1 lower, S^-1 upper].
  const Vector inv_scale = scale_.cwiseInverse();
  const Box ybox{box.lower.cwiseProduct(inv_scale),
                 box.upper.cwiseProduct(inv_scale)};
  const Vector sc = scale_.cwiseProduct(c);
  const double step = 1.0 / scaled_lambda_max_;

  Vector x = z0.cwiseProduct(inv_scale);
  Vector y = x;
  double t = 1.0;
  double residual = Residual(c, box, z0);
  if (residual <= options_.tolerance) return {z0, 0, residual};

  for (int it = 1; it <= options_.max_iterations; ++it) {
    const Vector grad = h_scaled_ * y - sc;
    const Vector x_next = ProjectBox(y - step * grad, ybox);
    // Adaptive restart: drop momentum when it points uphill.
    if (grad.dot(x_next - x) > 0.0) {
      t = 1.0;
      y = x;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_next + ((t - 1.0) / t_next) * (x_next - x);
    x = x_next;
    t = t_next;
    const Vector z = scale_.cwiseProduct(x);
    residual = Residual(c, box, z);
    if (residual <= options_.tolerance) return {z, it, residual};
  }
  throw ConvergenceError("box QP: accelerated solver hit the iteration cap (" +
                             std::to_string(options_.max_iterations) +
                             "), residual " + std::to_string(residual),
                         residual, options_.max_iterations);
}

}  // namespace dmhe
