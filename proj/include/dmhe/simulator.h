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

#ifndef DMHE_SIMULATOR_H_
#define DMHE_SIMULATOR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmhe/box.h"
#include "dmhe/linalg.h"
#include "dmhe/model.h"

namespace dmhe {

// Gaussian state disturbances and measurement noise. A standard deviation
// vector of length 1 is broadcast to every component. With a bound, each
// component is redrawn until it lies in [-bound, bound], so the logged
// vectors satisfy ||w||_inf <= bound.
struct NoiseSpec {
  Vector sigma_w = Vector::Zero(1);
  Vector sigma_v = Vector::Zero(1);
  std::optional<double> w_bound;
  std::optional<double> v_bound;
  std::uint64_t seed = 0;

  void Validate(const CompositeModel& model) const;  // throws ConfigError
};

struct Trajectory {
  Matrix x;  // x_0 .. x_T        (n_x, T+1)
  Matrix y;  // y_0 .. y_T        (n_y, T+1)
  Matrix u;  // u_0 .. u_{T-1}    (n_u, T)
  Matrix w;  // w_0 .. w_{T-1}    (n_x, T)
  Matrix v;  // v_0 .. v_T        (n_y, T+1)
};

// x_{t+1} = A x_t + B u_t + w_t,  y_t = C x_t + v_t  for t = 0..T.
// `u` must have T columns (or zero rows when the model has no inputs).
Trajectory Simulate(const CompositeModel& model, const Vector& x0,
                    const Matrix& u, const NoiseSpec& noise, int steps);

// Same, with prescribed disturbance and noise sequences.
Trajectory SimulateWith(const CompositeModel& model, const Vector& x0,
                        const Matrix& u, const Matrix& w, const Matrix& v);

// Derives an independent, well-mixed seed for run `index` from `master`.
std::uint64_t MixSeed(std::uint64_t master, std::uint64_t index);

// Reactor-reactor-separator process linearized at its steady state. The
// model acts on scaled deviations (x - x_s) / scaling.
struct BenchmarkBundle {
  std::vector<SubsystemModel> subsystems;
  CompositeModel model;
  Vector steady_state;    // x_s, physical units
  Vector scaling;         // componentwise divisor
  Vector x0;              // true initial state, physical
  Vector initial_guess;   // estimator initial guess, physical
  double sample_time = 0.02;  // h
  // Steady inputs and process parameters, kept for reference.
  std::map<std::string, double> steady_inputs;
  std::map<std::string, double> parameters;
  std::vector<std::string> state_names;
};

// `temperature_divisor` scales the temperature deviations; mass fractions
// use divisor 1.
BenchmarkBundle LoadBenchmark(double temperature_divisor = 100.0);

// (physical - x_s) / scaling and back. Throws Error on a nonpositive
// scaling entry.
Vector Scale(const Vector& physical, const BenchmarkBundle& bundle);
Vector Unscale(const Vector& scaled, const BenchmarkBundle& bundle);

// Componentwise division / multiplication by a scaling vector.
Vector ScaleBy(const Vector& v, const Vector& scaling);
Vector UnscaleBy(const Vector& v, const Vector& scaling);

// Physical feasibility in scaled deviation coordinates: mass fractions in
// [0, 1], temperatures >= 0 K, disturbances in [-w_bound, w_bound].
BoxConstraints BenchmarkBoxes(const BenchmarkBundle& bundle, double w_bound);

}  // namespace dmhe

#endif  // DMHE_SIMULATOR_H_
