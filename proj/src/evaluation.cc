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

#include "dmhe/evaluation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "dmhe/error.h"

namespace dmhe {

double RmseAt(std::span<const Vector> estimates,
              std::span<const Vector> truth) {
  if (estimates.empty() || estimates.size() != truth.size()) {
    throw Error("RmseAt: need one estimate per subsystem (" +
                std::to_string(estimates.size()) + " estimates, " +
                std::to_string(truth.size()) + " true states)");
  }
  double sum = 0.0;
  for (size_t j = 0; j < estimates.size(); ++j) {
    if (estimates[j].size() != truth[j].size()) {
      throw Error("RmseAt: subsystem " + std::to_string(j) + " size mismatch");
    }
    sum += (estimates[j] - truth[j]).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(estimates.size()));
}

Trajectory SimulateRun(const RunConfig& config, std::uint64_t seed) {
  const CompositeModel& model = config.Model();
  const int steps = config.evaluation.samples - 1;
  Matrix u = config.input.replicate(1, steps);
  NoiseSpec noise = config.noise;
  noise.seed = seed;
  return Simulate(model, config.x0, u, noise, steps);
}

RunResult EvaluateRun(const RunConfig& config, const Trajectory& trajectory,
                      bool timed) {
  const CompositeModel& model = config.Model();
  const DistributedEstimator estimator(model, config.weights, config.schedule,
                                       config.boxes, config.qp);
  RunResult r;
  r.records = estimator.RunTrajectory(trajectory.y, trajectory.u,
                                      config.initial_guess,
                                      timed ? &r.timing : nullptr);
  const int horizon = config.schedule.horizon;
  const int n = model.num_subsystems();
  for (const EstimateRecord& rec : r.records) {
    const Vector truth = trajectory.x.col(rec.k - horizon);
    std::vector<Vector> t_scaled, e_phys, t_phys;
    for (int i = 0; i < n; ++i) {
      const SubsystemBlock& b = model.block(i);
      const Vector s = config.scaling.segment(b.state_offset, b.state_dim);
      t_scaled.push_back(truth.segment(b.state_offset, b.state_dim));
      // Steady-state offsets cancel in the difference.
      e_phys.push_back(rec.estimates[i].cwiseProduct(s));
      t_phys.push_back(t_scaled.back().cwiseProduct(s));
    }
    r.instants.push_back(rec.k);
    r.rmse_scaled.push_back(RmseAt(rec.estimates, t_scaled));
    r.rmse_physical.push_back(RmseAt(e_phys, t_phys));
  }
  return r;
}

TimingStats SummarizeTiming(const TimingSamples& samples, Mode mode,
                            int horizon) {
  TimingStats t;
  t.mode = ModeName(mode);
  t.horizon = horizon;
  t.executions = static_cast<long long>(samples.seconds.size());
  if (t.executions == 0) return t;
  double sum = 0.0;
  for (double s : samples.seconds) {
    sum += s;
    t.max_seconds = std::max(t.max_seconds, s);
  }
  t.mean_seconds = sum / static_cast<double>(t.executions);
  return t;
}

nlohmann::json RunSummary::ToJson() const {
  nlohmann::json j;
  j["mode"] = mode;
  j["horizon"] = horizon;
  j["runs"] = runs;
  j["instants"] = instants;
  j["rmse_scaled"] = rmse_scaled;
  j["rmse_physical"] = rmse_physical;
  j["mean_rmse_scaled"] = mean_rmse_scaled;
  j["mean_rmse_physical"] = mean_rmse_physical;
  nlohmann::json t = nlohmann::json::array();
  for (const TimingStats& s : timing) {
    t.push_back({{"mode", s.mode},
                 {"horizon", s.horizon},
                 {"executions", s.executions},
                 {"mean_seconds", s.mean_seconds},
                 {"max_seconds", s.max_seconds}});
  }
  j["timing"] = t;
  j["conditions"] = conditions.ToJson();
  j["fingerprint"] = fingerprint;
  return j;
}

RunSummary MonteCarlo(const RunConfig& config, int runs,
                      std::vector<RunResult>* per_run, unsigned threads) {
  if (runs < 1) throw Error("MonteCarlo: runs must be >= 1");
  const bool timed = config.evaluation.timed;
  std::vector<RunResult> results(runs);
  std::vector<std::exception_ptr> errors(runs);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int r = next++; r < runs; r = next++) {
      try {
        const Trajectory traj =
            SimulateRun(config, MixSeed(config.noise.seed, r));
        results[r] = EvaluateRun(config, traj, timed);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (timed) threads = 1;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(runs));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (int r = 0; r < runs; ++r) {
    if (!errors[r]) continue;
    try {
      std::rethrow_exception(errors[r]);
    } catch (const std::exception& e) {
      throw Error("Monte Carlo run " + std::to_string(r) + " failed: " +
                  e.what());
    }
  }

  RunSummary s;
  s.mode = ModeName(config.schedule.mode);
  s.horizon = config.schedule.horizon;
  s.runs = runs;
  s.instants = results[0].instants;
  const size_t len = s.instants.size();
  s.rmse_scaled.assign(len, 0.0);
  s.rmse_physical.assign(len, 0.0);
  TimingSamples all_timing;
  for (int r = 0; r < runs; ++r) {
    for (size_t t = 0; t < len; ++t) {
      s.rmse_scaled[t] += results[r].rmse_scaled[t];
      s.rmse_physical[t] += results[r].rmse_physical[t];
    }
    all_timing.seconds.insert(all_timing.seconds.end(),
                              results[r].timing.seconds.begin(),
                              results[r].timing.seconds.end());
  }
  for (size_t t = 0; t < len; ++t) {
    s.rmse_scaled[t] /= runs;
    s.rmse_physical[t] /= runs;
    s.mean_rmse_scaled += s.rmse_scaled[t];
    s.mean_rmse_physical += s.rmse_physical[t];
  }
  if (len > 0) {
    s.mean_rmse_scaled /= static_cast<double>(len);
    s.mean_rmse_physical /= static_cast<double>(len);
  }
  if (timed) {
    s.timing.push_back(
        SummarizeTiming(all_timing, config.schedule.mode, s.horizon));
  }
  {
    const DistributedEstimator est(config.Model(), config.weights,
                                   config.schedule, config.boxes, config.qp);
    s.conditions = est.Conditions();
  }
  s.fingerprint = config.Fingerprint();
  if (per_run) *per_run = std::move(results);
  return s;
}

std::vector<SweepRow> HorizonSweep(const RunConfig& config,
                                   std::span<const int> horizons, int runs) {
  std::vector<SweepRow> rows;
  for (int h : horizons) {
    RunConfig c = config;
    c.schedule.horizon = h;
    c.schedule.Validate();
    if (c.evaluation.samples < h + 1) {
      throw Error("horizon " + std::to_string(h) + " exceeds the stream");
    }
    const RunSummary s = MonteCarlo(c, runs);
    rows.push_back({h, s.mean_rmse_scaled, s.mean_rmse_physical});
  }
  return rows;
}

std::vector<TimingStats> TimingReport(const RunConfig& config,
                                      std::span<const Mode> modes,
                                      std::span<const int> horizons, int runs) {
  std::vector<TimingStats> out;
  if (!config.evaluation.timed) return out;
  for (Mode m : modes) {
    for (int h : horizons) {
      RunConfig c = config;
      c.schedule.mode = m;
      c.schedule.horizon = h;
      if (m == Mode::kDmhe2 && !c.boxes) {
        throw ConfigError("timing dmhe2 needs box constraints");
      }
      const RunSummary s = MonteCarlo(c, runs);
      out.push_back(s.timing.at(0));
    }
  }
  return out;
}

}  // namespace dmhe
