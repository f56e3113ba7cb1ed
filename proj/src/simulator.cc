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

#include "dmhe/simulator.h"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "dmhe/error.h"

namespace dmhe {
namespace {

Vector Broadcast(const Vector& sigma, Index dim) {
  if (sigma.size() == 1) return Vector::Constant(dim, sigma(0));
  return sigma;
}

void CheckSigma(const Vector& sigma, Index dim, const char* what) {
  if (sigma.size() != 1 && sigma.size() != dim) {
    throw ConfigError(std::string(what) + " must have 1 or " +
                      std::to_string(dim) + " entries");
  }
  for (Index j = 0; j < sigma.size(); ++j) {
    if (!(sigma(j) >= 0.0) || !std::isfinite(sigma(j))) {
      throw ConfigError(std::string(what) + " must be finite and >= 0");
    }
  }
}

// Componentwise truncated Gaussian by rejection.
Vector Draw(std::mt19937_64& rng, const Vector& sigma,
            const std::optional<double>& bound) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector out(sigma.size());
  for (Index j = 0; j < sigma.size(); ++j) {
    double x = sigma(j) * normal(rng);
    if (bound) {
      while (std::abs(x) > *bound) x = sigma(j) * normal(rng);
    }
    out(j) = x;
  }
  return out;
}

// Composite matrices of the discrete-time linearized process, h = 0.02 h,
// in scaled deviation coordinates. Row/column order:
// (xA1, xB1, T1, xA2, xB2, T2, xA3, xB3, T3).
Matrix BenchmarkA() {
  Matrix a(9, 9);
  a << 0.1401, -0.0079, -0.6150, 0.0925, -0.0034, -0.1887, 0.1978, -0.0055,
      -0.3139,  //
      0.2102, 0.3358, 0.1527, 0.0394, 0.1134, 0.0731, 0.1076, 0.2631, 0.0952,
      0.0395, 0.0059, 0.5144, 0.0135, 0.0022, 0.1789, 0.0298, 0.0055, 0.3992,
      0.1269, -0.0064, -0.6433, 0.0802, -0.0031, -0.2113, 0.1673, -0.0053,
      -0.2957,  //
      0.2529, 0.3696, 0.1645, 0.0580, 0.1203, 0.0773, 0.0882, 0.2067, 0.0968,
      0.0423, 0.0059, 0.5551, 0.0155, 0.0019, 0.1889, 0.0302, 0.0039, 0.3383,
      0.0660, 0.0061, -0.1895, 0.0464, 0.005, -0.0708, 0.0857, 0.0110,
      -0.0723,  //
      0.2793, 0.3550, -0.0335, 0.1851, 0.2450, -0.0069, 0.3195, 0.4402, 0.0020,
      0.0236, 0.0055, 0.4111, 0.0107, 0.0038, 0.2434, 0.0133, 0.0074, 0.3927;
  return a;
}

Matrix BenchmarkB() {
  Matrix b(9, 3);
  b << -0.0154, -0.0021, -0.0053,  //
      0.0050, 0.0010, 0.0019,      //
      0.0243, 0.0023, 0.0106,      //
      -0.0135, -0.0051, -0.0042,   //
      0.0047, 0.0024, 0.0016,      //
      0.0174, 0.0098, 0.0016,      //
      -0.0031, -0.0013, -0.0008,   //
      0.0002, 0.0003, 0.0001,      //
      0.0076, 0.0058, 0.0210;
  return b;
}

}  // namespace

void NoiseSpec::Validate(const CompositeModel& model) const {
  CheckSigma(sigma_w, model.state_dim(), "sigma_w");
  CheckSigma(sigma_v, model.output_dim(), "sigma_v");
  if (w_bound && !(*w_bound > 0.0)) throw ConfigError("w_bound must be > 0");
  if (v_bound && !(*v_bound > 0.0)) throw ConfigError("v_bound must be > 0");
}

Trajectory SimulateWith(const CompositeModel& model, const Vector& x0,
                        const Matrix& u, const Matrix& w, const Matrix& v) {
  const Index nx = model.state_dim(), nu = model.input_dim(),
              ny = model.output_dim();
  const Index steps = w.cols();
  if (steps < 1) throw DimensionError("Simulate: at least one step required");
  if (x0.size() != nx || w.rows() != nx || v.rows() != ny ||
      v.cols() != steps + 1) {
    throw DimensionError("Simulate: dimensions do not match the model");
  }
  if (nu > 0 && (u.rows() != nu || u.cols() < steps)) {
    throw DimensionError("Simulate: input stream has wrong shape");
  }
  Trajectory t;
  t.x.resize(nx, steps + 1);
  t.y.resize(ny, steps + 1);
  t.u = nu > 0 ? Matrix(u.leftCols(steps)) : Matrix(0, steps);
  t.w = w;
  t.v = v;
  t.x.col(0) = x0;
  for (Index k = 0; k < steps; ++k) {
    t.x.col(k + 1) = model.A() * t.x.col(k) + w.col(k);
    if (nu > 0) t.x.col(k + 1) += model.B() * u.col(k);
  }
  t.y = model.C() * t.x + v;
  return t;
}

Trajectory Simulate(const CompositeModel& model, const Vector& x0,
                    const Matrix& u, const NoiseSpec& noise, int steps) {
  noise.Validate(model);
  if (steps < 1) throw DimensionError("Simulate: at least one step required");
  const Vector sw = Broadcast(noise.sigma_w, model.state_dim());
  const Vector sv = Broadcast(noise.sigma_v, model.output_dim());
  std::mt19937_64 rng(noise.seed);
  Matrix w(model.state_dim(), steps);
  Matrix v(model.output_dim(), steps + 1);
  // Draw order: v_t then w_t per instant, so the log is reproducible from
  // the seed alone.
  for (int k = 0; k <= steps; ++k) {
    v.col(k) = Draw(rng, sv, noise.v_bound);
    if (k < steps) w.col(k) = Draw(rng, sw, noise.w_bound);
  }
  return SimulateWith(model, x0, u, w, v);
}

std::uint64_t MixSeed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over a golden-ratio stride.
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

BenchmarkBundle LoadBenchmark(double temperature_divisor) {
  if (!(temperature_divisor > 0.0)) {
    throw Error("temperature divisor must be positive");
  }
  const Matrix a = BenchmarkA();
  const Matrix b = BenchmarkB();
  std::vector<SubsystemModel> subs(3);
  for (int i = 0; i < 3; ++i) {
    SubsystemModel& s = subs[i];
    s.id = i;
    s.a_self = a.block(3 * i, 3 * i, 3, 3);
    s.b_self = b.block(3 * i, i, 3, 1);
    s.c_self = Matrix::Zero(1, 3);
    s.c_self(0, 2) = 1.0;  // vessel temperature
    for (int j = 0; j < 3; ++j) {
      if (j == i) continue;
      s.a_coupling[j] = a.block(3 * i, 3 * j, 3, 3);
      s.b_coupling[j] = b.block(3 * i, j, 3, 1);
    }
  }
  CompositeModel model = AssembleComposite(subs);
  BenchmarkBundle bb{subs, model, {}, {}, {}, {}, 0.02, {}, {}, {}};
  bb.steady_state.resize(9);
  bb.steady_state << 0.2055, 0.6751, 474.0056, 0.2243, 0.6564, 467.2124,
      0.0781, 0.7032, 468.9572;
  bb.x0.resize(9);
  bb.x0 << 0.1939, 0.7404, 528.3482, 0.2162, 0.7190, 520.0649, 0.0716, 0.7373,
      522.3765;
  bb.initial_guess.resize(9);
  bb.initial_guess << 0.2080, 0.7943, 566.7735, 0.2319, 0.7712, 557.8878,
      0.0768, 0.7910, 560.3675;
  bb.scaling = Vector::Ones(9);
  for (int i = 0; i < 3; ++i) bb.scaling(3 * i + 2) = temperature_divisor;
  bb.sample_time = 0.02;
  bb.steady_inputs = {{"Q1_kJ_per_h", 2.8e6},  {"Q2_kJ_per_h", 1.1e6},
                      {"Q3_kJ_per_h", 2.8e6},  {"F10_m3_per_h", 5.04},
                      {"F20_m3_per_h", 5.04},  {"Fr_m3_per_h", 50.4},
                      {"Fp_m3_per_h", 0.504}};
  bb.parameters = {{"V1", 1.0},        {"V2", 0.5},
                   {"V3", 1.0},        {"alpha_A", 3.5},
                   {"alpha_B", 1.0},   {"alpha_C", 0.5},
                   {"T10_K", 300.0},   {"T20_K", 300.0},
                   {"E1_kJ_per_kmol", 5.0e4},
                   {"E2_kJ_per_kmol", 6.0e4},
                   {"R_kJ_per_kmol_K", 8.314},
                   {"rho_kg_per_m3", 1000.0},
                   {"dH1_kJ_per_kmol", -6.0e4},
                   {"dH2_kJ_per_kmol", -7.0e4},
                   {"dHvap1_kJ_per_kmol", -3.53e4},
                   {"dHvap2_kJ_per_kmol", -1.57e4},
                   {"dHvap3_kJ_per_kmol", -4.068e4},
                   {"k1_per_s", 2.77e3},
                   {"k2_per_s", 2.6e3},
                   {"cp_kJ_per_kg_K", 4.2},
                   {"xA10", 1.0},      {"xB10", 0.0},
                   {"xA20", 1.0},      {"xB20", 0.0}};
  bb.state_names = {"xA1", "xB1", "T1", "xA2", "xB2",
                    "T2",  "xA3", "xB3", "T3"};
  return bb;
}

Vector ScaleBy(const Vector& v, const Vector& scaling) {
  if (v.size() != scaling.size()) throw DimensionError("Scale: size mismatch");
  for (Index j = 0; j < scaling.size(); ++j) {
    if (!(scaling(j) > 0.0)) {
      throw Error("scaling entry " + std::to_string(j) + " is not positive");
    }
  }
  return v.cwiseQuotient(scaling);
}

Vector UnscaleBy(const Vector& v, const Vector& scaling) {
  if (v.size() != scaling.size()) throw DimensionError("Unscale: size mismatch");
  for (Index j = 0; j < scaling.size(); ++j) {
    if (!(scaling(j) > 0.0)) {
      throw Error("scaling entry " + std::to_string(j) + " is not positive");
    }
  }
  return v.cwiseProduct(scaling);
}

Vector Scale(const Vector& physical, const BenchmarkBundle& bundle) {
  return ScaleBy(physical - bundle.steady_state, bundle.scaling);
}

Vector Unscale(const Vector& scaled, const BenchmarkBundle& bundle) {
  return UnscaleBy(scaled, bundle.scaling) + bundle.steady_state;
}

BoxConstraints BenchmarkBoxes(const BenchmarkBundle& bundle, double w_bound) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<SubsystemBox> boxes;
  for (int i = 0; i < 3; ++i) {
    SubsystemBox b;
    b.x_lower.resize(3);
    b.x_upper.resize(3);
    for (int c = 0; c < 3; ++c) {
      const int j = 3 * i + c;
      const double xs = bundle.steady_state(j), s = bundle.scaling(j);
      if (c < 2) {
        b.x_lower(c) = (0.0 - xs) / s;
        b.x_upper(c) = (1.0 - xs) / s;
      } else {
        b.x_lower(c) = (0.0 - xs) / s;
        b.x_upper(c) = kInf;
      }
    }
    b.w_lower = Vector::Constant(3, -w_bound);
    b.w_upper = Vector::Constant(3, w_bound);
    boxes.push_back(b);
  }
  return BoxConstraints(std::move(boxes));
}

}  // namespace dmhe
