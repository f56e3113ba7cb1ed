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

#include "dmhe/coordinator.h"

#include <chrono>
#include <numeric>
#include <string>

#include "dmhe/error.h"

namespace dmhe {

std::string ModeName(Mode mode) {
  switch (mode) {
    case Mode::kDmhe1:
      return "dmhe1";
    case Mode::kDmhe2:
      return "dmhe2";
    case Mode::kCmheReference:
      return "cmhe";
  }
  return "unknown";
}

Mode ParseMode(const std::string& name) {
  if (name == "dmhe1") return Mode::kDmhe1;
  if (name == "dmhe2") return Mode::kDmhe2;
  if (name == "cmhe" || name == "cmhe-reference") return Mode::kCmheReference;
  throw ConfigError("unknown mode \"" + name +
                    "\" (expected dmhe1, dmhe2 or cmhe)");
}

void EstimationSchedule::Validate() const {
  if (horizon < 1) {
    throw ConfigError("horizon must be >= 1, got " + std::to_string(horizon));
  }
  if (max_iterations < 1) {
    throw ConfigError("iterations per instant must be >= 1, got " +
                      std::to_string(max_iterations));
  }
}

Vector EstimateRecord::StackedEstimate() const {
  Index n = 0;
  for (const Vector& e : estimates) n += e.size();
  Vector out(n);
  Index off = 0;
  for (const Vector& e : estimates) {
    out.segment(off, e.size()) = e;
    off += e.size();
  }
  return out;
}

Vector EstimateRecord::StackedPrior() const {
  Index n = 0;
  for (const Vector& e : priors) n += e.size();
  Vector out(n);
  Index off = 0;
  for (const Vector& e : priors) {
    out.segment(off, e.size()) = e;
    off += e.size();
  }
  return out;
}

struct DistributedEstimator::State {
  State(const CompositeModel& m, const EstimatorWeights& w,
        EstimationSchedule s, std::optional<BoxConstraints> b,
        BoxQpOptions o)
      : model(m),
        weights(w),
        schedule(s),
        boxes(std::move(b)),
        qp_options(o),
        maps(BuildStackedMaps(model, s.horizon)),
        bundle(DeriveComposites(weights, maps, model)),
        dmhe1(model, maps, bundle) {
    for (int i = 0; i < model.num_subsystems(); ++i) {
      subsystems.push_back(model.ExtractSubsystem(i));
    }
    if (boxes) {
      dmhe2 = std::make_unique<Dmhe2Estimator>(model, maps, bundle, *boxes,
                                               qp_options);
    }
  }

  CompositeModel model;
  EstimatorWeights weights;
  EstimationSchedule schedule;
  std::optional<BoxConstraints> boxes;
  BoxQpOptions qp_options;
  StackedMaps maps;
  WeightBundle bundle;
  Dmhe1Estimator dmhe1;
  std::unique_ptr<Dmhe2Estimator> dmhe2;
  std::vector<SubsystemModel> subsystems;
};

DistributedEstimator::DistributedEstimator(const CompositeModel& model,
                                           const EstimatorWeights& weights,
                                           EstimationSchedule schedule,
                                           std::optional<BoxConstraints> boxes,
                                           BoxQpOptions qp_options) {
  schedule.Validate();
  if (schedule.mode == Mode::kDmhe2 && !boxes) {
    throw ConfigError("dmhe2 mode needs box constraints");
  }
  state_ = std::make_unique<State>(model, weights, schedule, std::move(boxes),
                                   qp_options);
}

DistributedEstimator::~DistributedEstimator() = default;

const CompositeModel& DistributedEstimator::model() const {
  return state_->model;
}
const StackedMaps& DistributedEstimator::maps() const { return state_->maps; }
const WeightBundle& DistributedEstimator::bundle() const {
  return state_->bundle;
}
const EstimationSchedule& DistributedEstimator::schedule() const {
  return state_->schedule;
}
const Dmhe1Estimator& DistributedEstimator::dmhe1() const {
  return state_->dmhe1;
}
const Dmhe2Estimator& DistributedEstimator::dmhe2() const {
  if (!state_->dmhe2) throw Error("no box constraints configured");
  return *state_->dmhe2;
}

Vector DistributedEstimator::ComputePrior(int i, const EstimateRecord& previous,
                                          const Vector& u_previous) const {
  const CompositeModel& model = state_->model;
  const int n = model.num_subsystems();
  if (i < 0 || i >= n) throw UnknownSubsystemError(i);
  if (static_cast<int>(previous.estimates.size()) != n) {
    throw ProtocolError("previous record holds " +
                        std::to_string(previous.estimates.size()) +
                        " estimates, expected " + std::to_string(n));
  }
  for (int j = 0; j < n; ++j) {
    if (previous.estimates[j].size() != model.block(j).state_dim) {
      throw ProtocolError("estimate of subsystem " + std::to_string(j) +
                          " missing from instant " +
                          std::to_string(previous.k));
    }
  }
  if (u_previous.size() != model.input_dim()) {
    throw DimensionError("ComputePrior: input has wrong size");
  }
  const SubsystemModel& s = state_->subsystems[i];
  auto input_of = [&](int j) {
    const SubsystemBlock& b = model.block(j);
    return u_previous.segment(b.input_offset, b.input_dim);
  };
  Vector prior = s.a_self * previous.estimates[i];
  if (s.b_self.cols() > 0) prior += s.b_self * input_of(i);
  for (const auto& [j, a_ij] : s.a_coupling) {
    prior += a_ij * previous.estimates[j];
  }
  for (const auto& [j, b_ij] : s.b_coupling) {
    prior += b_ij * input_of(j);
  }
  return prior;
}

WindowState DistributedEstimator::MakeWindow(int k, const Matrix& y,
                                             const Matrix& u) const {
  const int horizon = state_->schedule.horizon;
  const Index ny = state_->model.output_dim();
  const Index nu = state_->model.input_dim();
  if (k < horizon || k >= y.cols()) {
    throw DimensionError("MakeWindow: instant " + std::to_string(k) +
                         " outside the measured stream");
  }
  if (y.rows() != ny || (nu > 0 && (u.rows() != nu || u.cols() < k))) {
    throw DimensionError("MakeWindow: stream dimensions do not match model");
  }
  WindowState w;
  w.k = k;
  w.y_window.resize((horizon + 1) * ny);
  for (int t = 0; t <= horizon; ++t) {
    w.y_window.segment(t * ny, ny) = y.col(k - horizon + t);
  }
  w.u_window.resize(horizon * nu);
  for (int t = 0; t < horizon && nu > 0; ++t) {
    w.u_window.segment(t * nu, nu) = u.col(k - horizon + t);
  }
  return w;
}

Vector DistributedEstimator::RunRound(const Vector& input_free_outputs,
                                      const Vector& z_previous,
                                      std::span<const Vector> priors,
                                      int iteration, std::span<const int> order,
                                      TimingSamples* timing) const {
  const State& st = *state_;
  const int n = st.model.num_subsystems();
  if (static_cast<int>(order.size()) != n ||
      static_cast<int>(priors.size()) != n) {
    throw ProtocolError("RunRound: one update per subsystem required");
  }
  std::vector<bool> seen(n, false);
  Vector z_next = Vector::Zero(z_previous.size());
  for (int i : order) {
    if (i < 0 || i >= n || seen[i]) {
      throw ProtocolError("RunRound: update order is not a permutation");
    }
    seen[i] = true;
    const auto start = std::chrono::steady_clock::now();
    LocalIterate it;
    if (st.schedule.mode == Mode::kDmhe2) {
      try {
        it = st.dmhe2->LocalQpSolveStacked(i, input_free_outputs, z_previous,
                                           priors[i], iteration);
      } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string(e.what()) + " [p=" +
                                   std::to_string(iteration) + ", subsystem " +
                                   std::to_string(i) + "]",
                               e.residual(), e.iterations());
      }
    } else {
      it = st.dmhe1.LocalUpdateStacked(i, input_free_outputs, z_previous,
                                       priors[i], iteration);
    }
    if (timing) {
      timing->seconds.push_back(std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - start)
                                    .count());
    }
    Scatter(it.Stacked(), st.bundle.layout.z_indices(i), z_next);
  }
  return z_next;
}

EstimateRecord DistributedEstimator::RunInstant(int k,
                                                const WindowState& window,
                                                TimingSamples* timing) const {
  const State& st = *state_;
  window.Validate(st.model, st.schedule.horizon);
  const DecisionLayout& layout = st.bundle.layout;
  const int n = st.model.num_subsystems();

  EstimateRecord rec;
  rec.k = k;
  for (int i = 0; i < n; ++i) {
    rec.priors.push_back(Gather(window.prior, layout.x_indices(i)));
  }

  if (st.schedule.mode == Mode::kCmheReference) {
    const auto start = std::chrono::steady_clock::now();
    const FullEstimate e =
        st.boxes ? SolveCmheConstrained(window, st.bundle, st.maps, st.model,
                                        st.weights, *st.boxes, st.qp_options)
                 : SolveCmheUnconstrained(window, st.bundle, st.maps, st.model,
                                          st.weights);
    if (timing) {
      timing->seconds.push_back(std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - start)
                                    .count());
    }
    for (int i = 0; i < n; ++i) {
      rec.estimates.push_back(Gather(e.x_hat, layout.x_indices(i)));
    }
    return rec;
  }

  // Round 0: prior for the state, zero disturbances.
  Vector z = Vector::Zero(layout.size());
  for (int i = 0; i < n; ++i) Scatter(rec.priors[i], layout.x_indices(i), z);
  if (st.schedule.keep_history) {
    rec.history.push_back(UnstackIterates(layout, z, 0));
  }

  const Vector yf = InputFreeOutputs(window, st.maps);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int p = 1; p <= st.schedule.max_iterations; ++p) {
    try {
      z = RunRound(yf, z, rec.priors, p, order, timing);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " [k=" +
                                 std::to_string(k) + "]",
                             e.residual(), e.iterations());
    }
    if (st.schedule.keep_history) {
      rec.history.push_back(UnstackIterates(layout, z, p));
    }
  }
  for (int i = 0; i < n; ++i) {
    rec.estimates.push_back(Gather(z, layout.x_indices(i)));
  }
  return rec;
}

std::vector<EstimateRecord> DistributedEstimator::RunTrajectory(
    const Matrix& y, const Matrix& u, const Vector& initial_guess,
    TimingSamples* timing) const {
  const State& st = *state_;
  const int horizon = st.schedule.horizon;
  if (y.cols() < horizon + 1) {
    throw DimensionError("measurement stream has " + std::to_string(y.cols()) +
                         " samples, one window needs " +
                         std::to_string(horizon + 1));
  }
  if (initial_guess.size() != st.model.state_dim()) {
    throw DimensionError("initial guess has wrong size");
  }
  std::vector<EstimateRecord> records;
  for (int k = horizon; k < y.cols(); ++k) {
    WindowState window = MakeWindow(k, y, u);
    if (records.empty()) {
      window.prior = initial_guess;
    } else {
      const Vector u_prev = st.model.input_dim() > 0
                                ? Vector(u.col(k - horizon - 1))
                                : Vector(0);
      window.prior.resize(st.model.state_dim());
      for (int i = 0; i < st.model.num_subsystems(); ++i) {
        Scatter(ComputePrior(i, records.back(), u_prev),
                st.bundle.layout.x_indices(i), window.prior);
      }
    }
    records.push_back(RunInstant(k, window, timing));
  }
  return records;
}

ConditionReport DistributedEstimator::Conditions() const {
  const State& st = *state_;
  ConditionReport report;
  report.entries.push_back(
      CheckIterationConvergence(BuildIterationMatrices(st.bundle)));
  report.entries.push_back(CheckErrorStability(st.bundle, st.maps, st.model));
  report.entries.push_back(CheckDmhe2Convergence(st.bundle));
  report.entries.push_back(CheckDmhe2Stability(st.bundle, st.maps, st.model));
  return report;
}

}  // namespace dmhe
