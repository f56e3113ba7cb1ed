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

#include <cmath>

#include <gtest/gtest.h>

#include "dmhe/error.h"

namespace dmhe {
namespace {

RunConfig SmallConfig(Mode mode) {
  RunConfig c = DefaultRunConfig();
  c.schedule.mode = mode;
  c.schedule.horizon = 4;
  c.schedule.max_iterations = 3;
  c.weights = EstimatorWeights::Uniform(c.Model(), 0.1, 1e-4, 1.0);
  c.evaluation.samples = 30;
  if (mode == Mode::kDmhe2) c.boxes = BenchmarkBoxes(*c.benchmark, 0.1);
  return c;
}

TEST(RmseTest, HandCases) {
  const std::vector<Vector> truth = {Vector::Zero(3), Vector::Zero(2),
                                     Vector::Zero(1)};
  EXPECT_EQ(RmseAt(truth, truth), 0.0);
  const std::vector<Vector> est = {(Vector(3) << 3, 0, 0).finished(),
                                   (Vector(2) << 0, 4).finished(),
                                   Vector::Zero(1)};
  EXPECT_DOUBLE_EQ(RmseAt(est, truth), std::sqrt(25.0 / 3.0));
  const std::vector<Vector> one = {Vector::Constant(1, -2.5)};
  const std::vector<Vector> zero = {Vector::Zero(1)};
  EXPECT_DOUBLE_EQ(RmseAt(one, zero), 2.5);
  EXPECT_THROW(RmseAt(std::vector<Vector>(est.begin(), est.end() - 1), truth),
               Error);
  const std::vector<Vector> wrong = {Vector::Zero(3), Vector::Zero(3),
                                     Vector::Zero(1)};
  EXPECT_THROW(RmseAt(wrong, truth), Error);
}

// ||e|| / sqrt(n) on the stacked error equals the per-subsystem formula.
TEST(RmseTest, StackedFormula) {
  std::vector<Vector> est, truth;
  Vector e_all(0);
  for (int i = 0; i < 4; ++i) {
    est.push_back(Vector::LinSpaced(i + 1, 0.1 * i, 1.0));
    truth.push_back(Vector::Constant(i + 1, 0.3));
    const Vector e = est.back() - truth.back();
    e_all.conservativeResize(e_all.size() + e.size());
    e_all.tail(e.size()) = e;
  }
  EXPECT_NEAR(RmseAt(est, truth), e_all.norm() / 2.0, 1e-15);
}

TEST(EvaluationTest, SingleRunEqualsTrajectoryEvaluation) {
  const RunConfig c = SmallConfig(Mode::kDmhe1);
  std::vector<RunResult> runs;
  const RunSummary s = MonteCarlo(c, 1, &runs, 1);
  const Trajectory t = SimulateRun(c, MixSeed(c.noise.seed, 0));
  const RunResult r = EvaluateRun(c, t);
  EXPECT_EQ(s.rmse_scaled, r.rmse_scaled);
  EXPECT_EQ(s.instants, r.instants);
  ASSERT_EQ(r.instants.size(), 30u - 4u);
  EXPECT_EQ(r.instants.front(), 4);
  // Record k is compared with x_{k-N}.
  const EstimateRecord& rec = r.records[3];
  std::vector<Vector> truth;
  for (int i = 0; i < 3; ++i) {
    truth.push_back(t.x.col(rec.k - 4).segment(3 * i, 3));
  }
  EXPECT_EQ(r.rmse_scaled[3], RmseAt(rec.estimates, truth));
}

TEST(EvaluationTest, SummaryIsMeanOfRuns) {
  const RunConfig c = SmallConfig(Mode::kDmhe1);
  std::vector<RunResult> runs;
  const RunSummary s = MonteCarlo(c, 4, &runs, 2);
  ASSERT_EQ(runs.size(), 4u);
  double time_mean = 0.0;
  for (size_t t = 0; t < s.instants.size(); ++t) {
    double m = 0.0, mp = 0.0;
    for (const RunResult& r : runs) {
      m += r.rmse_scaled[t];
      mp += r.rmse_physical[t];
    }
    EXPECT_NEAR(s.rmse_scaled[t], m / 4.0, 1e-15 * (1 + m));
    EXPECT_NEAR(s.rmse_physical[t], mp / 4.0, 1e-15 * (1 + mp));
    EXPECT_GE(s.rmse_scaled[t], 0.0);
    time_mean += m / 4.0;
  }
  time_mean /= static_cast<double>(s.instants.size());
  EXPECT_NEAR(s.mean_rmse_scaled, time_mean, 1e-14 * (1 + time_mean));
  EXPECT_EQ(s.runs, 4);
  EXPECT_EQ(s.conditions.entries.size(), 4u);
  EXPECT_FALSE(s.fingerprint.empty());
}

TEST(EvaluationTest, PhysicalErrorUsesScaling) {
  const RunConfig c = SmallConfig(Mode::kCmheReference);
  const Trajectory t = SimulateRun(c, 3);
  const RunResult r = EvaluateRun(c, t);
  const EstimateRecord& rec = r.records.back();
  const Vector e = (rec.StackedEstimate() - t.x.col(rec.k - 4))
                       .cwiseProduct(c.scaling);
  EXPECT_NEAR(r.rmse_physical.back(), e.norm() / std::sqrt(3.0),
              1e-12 * (1 + e.norm()));
}

TEST(EvaluationTest, DeterministicAcrossThreadCounts) {
  const RunConfig c = SmallConfig(Mode::kDmhe2);
  const RunSummary a = MonteCarlo(c, 3, nullptr, 1);
  const RunSummary b = MonteCarlo(c, 3, nullptr, 3);
  EXPECT_EQ(a.rmse_scaled, b.rmse_scaled);
  EXPECT_EQ(a.mean_rmse_scaled, b.mean_rmse_scaled);
  RunConfig other = c;
  other.noise.seed = c.noise.seed + 1;
  EXPECT_NE(MonteCarlo(other, 3, nullptr, 1).rmse_scaled, a.rmse_scaled);
}

// All modes evaluated on one run see the same disturbance log.
TEST(EvaluationTest, ModesShareRealizations) {
  const RunConfig a = SmallConfig(Mode::kDmhe1);
  const RunConfig b = SmallConfig(Mode::kDmhe2);
  const Trajectory ta = SimulateRun(a, 17), tb = SimulateRun(b, 17);
  EXPECT_EQ(ta.w, tb.w);
  EXPECT_EQ(ta.v, tb.v);
}

TEST(EvaluationTest, SweepDelegatesToMonteCarlo) {
  const RunConfig c = SmallConfig(Mode::kDmhe1);
  const std::vector<int> horizons = {2, 4};
  const std::vector<SweepRow> rows = HorizonSweep(c, horizons, 2);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].horizon, 4);
  EXPECT_DOUBLE_EQ(rows[1].mean_rmse_scaled,
                   MonteCarlo(c, 2, nullptr, 1).mean_rmse_scaled);
  RunConfig c2 = c;
  c2.schedule.horizon = 2;
  EXPECT_DOUBLE_EQ(rows[0].mean_rmse_scaled,
                   MonteCarlo(c2, 2, nullptr, 1).mean_rmse_scaled);
}

TEST(EvaluationTest, TimingOnlyWhenEnabled) {
  RunConfig c = SmallConfig(Mode::kDmhe1);
  const std::vector<Mode> modes = {Mode::kDmhe1};
  const std::vector<int> horizons = {2};
  EXPECT_TRUE(TimingReport(c, modes, horizons, 1).empty());
  EXPECT_TRUE(MonteCarlo(c, 1, nullptr, 1).timing.empty());
  c.evaluation.timed = true;
  const std::vector<TimingStats> t = TimingReport(c, modes, horizons, 1);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].mode, "dmhe1");
  EXPECT_EQ(t[0].horizon, 2);
  // (samples - N) instants, p rounds, 3 estimators.
  EXPECT_EQ(t[0].executions, (30 - 2) * 3 * 3);
  EXPECT_GT(t[0].mean_seconds, 0.0);
  EXPECT_GE(t[0].max_seconds, t[0].mean_seconds);
}

TEST(EvaluationTest, SummarizeTimingArithmetic) {
  TimingSamples s;
  s.seconds = {1.0, 2.0, 6.0};
  const TimingStats t = SummarizeTiming(s, Mode::kDmhe2, 5);
  EXPECT_EQ(t.executions, 3);
  EXPECT_DOUBLE_EQ(t.mean_seconds, 3.0);
  EXPECT_DOUBLE_EQ(t.max_seconds, 6.0);
  EXPECT_EQ(SummarizeTiming({}, Mode::kDmhe1, 5).executions, 0);
}

TEST(EvaluationTest, FailingRunReportsIndex) {
  RunConfig c = SmallConfig(Mode::kDmhe1);
  c.evaluation.samples = 3;  // shorter than one window
  try {
    MonteCarlo(c, 2, nullptr, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("run 0"), std::string::npos) << e.what();
  }
  EXPECT_THROW(MonteCarlo(c, 0), Error);
}

}  // namespace
}  // namespace dmhe
