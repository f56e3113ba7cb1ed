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

// Batch front end: dmhe {check|simulate|estimate|montecarlo|sweep} [flags].

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmhe/config.h"
#include "dmhe/coordinator.h"
#include "dmhe/csv.h"
#include "dmhe/error.h"
#include "dmhe/evaluation.h"
#include "dmhe/simulator.h"

namespace {

constexpr int kExitFailedCertificate = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<int> horizon;
  std::optional<int> iters;
  std::optional<int> runs;
  std::optional<std::string> out;
  bool timed = false;
};

dmhe::RunConfig Resolve(const Flags& f) {
  dmhe::RunConfig c =
      f.config.empty() ? dmhe::DefaultRunConfig() : dmhe::LoadRunConfig(f.config);
  if (f.seed) c.noise.seed = *f.seed;
  if (f.mode) c.schedule.mode = dmhe::ParseMode(*f.mode);
  if (f.horizon) c.schedule.horizon = *f.horizon;
  if (f.iters) c.schedule.max_iterations = *f.iters;
  if (f.runs) c.evaluation.runs = *f.runs;
  if (f.out) c.output_dir = *f.out;
  if (f.timed) c.evaluation.timed = true;
  c.schedule.Validate();
  if (c.schedule.mode == dmhe::Mode::kDmhe2 && !c.boxes) {
    throw dmhe::ConfigError("mode dmhe2 requires \"boxes\" in the config");
  }
  if (c.evaluation.runs < 1) throw dmhe::ConfigError("--runs must be >= 1");
  if (c.evaluation.samples < c.schedule.horizon + 1) {
    throw dmhe::ConfigError("horizon longer than the simulated stream");
  }
  return c;
}

std::string OutPath(const dmhe::RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.output_dir) / name).string();
}

void PrintConditions(const dmhe::ConditionReport& report) {
  std::printf("%-30s %-14s %-3s %-14s %s\n", "certificate", "value", "", "threshold",
              "holds");
  for (const dmhe::ConditionEntry& e : report.entries) {
    std::printf("%-30s %-14.6g %-3s %-14.6g %s\n", e.name.c_str(), e.value,
                e.relation.c_str(), e.threshold, e.holds ? "yes" : "no");
  }
}

int CmdCheck(const dmhe::RunConfig& c) {
  const dmhe::DistributedEstimator est(c.Model(), c.weights, c.schedule,
                                       c.boxes, c.qp);
  const dmhe::ConditionReport report = est.Conditions();
  PrintConditions(report);
  dmhe::WriteTextFile(OutPath(c, "conditions.csv"), report.ToCsv());
  dmhe::WriteTextFile(OutPath(c, "conditions.json"),
                      report.ToJson().dump(2) + "\n");
  return report.AllHold() ? 0 : kExitFailedCertificate;
}

void WriteTrajectory(const dmhe::RunConfig& c, const dmhe::Trajectory& t) {
  dmhe::CsvWriter csv(OutPath(c, "trajectory.csv"),
                      {"k", "component", "truth", "measurement"});
  const dmhe::Matrix cx = c.Model().C() * t.x;
  for (dmhe::Index k = 0; k < t.x.cols(); ++k) {
    for (dmhe::Index j = 0; j < t.x.rows(); ++j) {
      csv << static_cast<long long>(k) << "x" + std::to_string(j) << t.x(j, k)
          << "";
      csv.EndRow();
    }
    for (dmhe::Index j = 0; j < t.y.rows(); ++j) {
      csv << static_cast<long long>(k) << "y" + std::to_string(j) << cx(j, k)
          << t.y(j, k);
      csv.EndRow();
    }
  }
}

int CmdSimulate(const dmhe::RunConfig& c) {
  const dmhe::Trajectory t = dmhe::SimulateRun(c, c.noise.seed);
  WriteTrajectory(c, t);
  std::printf("simulated %lld samples -> %s\n",
              static_cast<long long>(t.x.cols()),
              OutPath(c, "trajectory.csv").c_str());
  return 0;
}

int CmdEstimate(const dmhe::RunConfig& c) {
  const dmhe::Trajectory t = dmhe::SimulateRun(c, c.noise.seed);
  WriteTrajectory(c, t);
  const dmhe::RunResult r = dmhe::EvaluateRun(c, t, c.evaluation.timed);
  const dmhe::CompositeModel& model = c.Model();
  const int horizon = c.schedule.horizon;

  dmhe::CsvWriter lng(OutPath(c, "estimates.csv"),
                      {"k", "subsystem", "component", "prior", "estimate",
                       "truth"});
  std::vector<std::string> header = {"k", "estimated_instant"};
  for (dmhe::Index j = 0; j < model.state_dim(); ++j) {
    header.push_back("xhat_" + std::to_string(j));
  }
  dmhe::CsvWriter wide(OutPath(c, "estimates_wide.csv"), header);
  for (const dmhe::EstimateRecord& rec : r.records) {
    const dmhe::Vector truth = t.x.col(rec.k - horizon);
    wide << rec.k << rec.k - horizon;
    for (int i = 0; i < model.num_subsystems(); ++i) {
      const dmhe::SubsystemBlock& b = model.block(i);
      for (dmhe::Index j = 0; j < b.state_dim; ++j) {
        lng << rec.k << i << static_cast<long long>(j) << rec.priors[i](j)
            << rec.estimates[i](j) << truth(b.state_offset + j);
        lng.EndRow();
        wide << rec.estimates[i](j);
      }
    }
    wide.EndRow();
  }
  dmhe::CsvWriter rm(OutPath(c, "rmse.csv"),
                     {"k", "rmse_scaled", "rmse_physical"});
  double mean = 0.0;
  for (size_t j = 0; j < r.instants.size(); ++j) {
    rm << r.instants[j] << r.rmse_scaled[j] << r.rmse_physical[j];
    rm.EndRow();
    mean += r.rmse_scaled[j];
  }
  mean /= std::max<size_t>(1, r.instants.size());
  std::printf("mode %s, N=%d, p_max=%d: %zu instants, time-mean RMSE %.6g "
              "(scaled)\n",
              dmhe::ModeName(c.schedule.mode).c_str(), horizon,
              c.schedule.max_iterations, r.records.size(), mean);
  return 0;
}

int CmdMonteCarlo(const dmhe::RunConfig& c) {
  const dmhe::RunSummary s = dmhe::MonteCarlo(c, c.evaluation.runs);
  dmhe::CsvWriter csv(OutPath(c, "summary.csv"),
                      {"k", "rmse_scaled", "rmse_physical"});
  for (size_t j = 0; j < s.instants.size(); ++j) {
    csv << s.instants[j] << s.rmse_scaled[j] << s.rmse_physical[j];
    csv.EndRow();
  }
  dmhe::WriteTextFile(OutPath(c, "summary.json"), s.ToJson().dump(2) + "\n");
  std::printf("mode %s, N=%d, %d runs: time-mean RMSE %.6g scaled, %.6g "
              "physical\n",
              s.mode.c_str(), s.horizon, s.runs, s.mean_rmse_scaled,
              s.mean_rmse_physical);
  for (const dmhe::TimingStats& t : s.timing) {
    std::printf("timing: %lld executions, mean %.3g s, max %.3g s\n",
                t.executions, t.mean_seconds, t.max_seconds);
  }
  return 0;
}

int CmdSweep(const dmhe::RunConfig& c) {
  const std::vector<dmhe::SweepRow> rows =
      dmhe::HorizonSweep(c, c.evaluation.horizons, c.evaluation.runs);
  dmhe::CsvWriter csv(OutPath(c, "sweep.csv"),
                      {"horizon", "mean_rmse_scaled", "mean_rmse_physical"});
  for (const dmhe::SweepRow& r : rows) {
    csv << r.horizon << r.mean_rmse_scaled << r.mean_rmse_physical;
    csv.EndRow();
    std::printf("N=%-3d RMSE %.6g (scaled) %.6g (physical)\n", r.horizon,
                r.mean_rmse_scaled, r.mean_rmse_physical);
  }
  if (c.evaluation.timed) {
    const dmhe::Mode mode = c.schedule.mode;
    const std::vector<dmhe::TimingStats> timing = dmhe::TimingReport(
        c, std::span<const dmhe::Mode>(&mode, 1), c.evaluation.horizons,
        c.evaluation.runs);
    dmhe::CsvWriter tc(OutPath(c, "timing.csv"),
                       {"mode", "horizon", "executions", "mean_seconds",
                        "max_seconds"});
    for (const dmhe::TimingStats& t : timing) {
      tc << t.mode << t.horizon << t.executions << t.mean_seconds
         << t.max_seconds;
      tc.EndRow();
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partition-based distributed moving horizon estimation"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "Run configuration (JSON)");
    sub->add_option("--seed", flags.seed, "Master seed");
    sub->add_option("--mode", flags.mode, "dmhe1 | dmhe2 | cmhe");
    sub->add_option("--horizon", flags.horizon, "Estimation horizon N");
    sub->add_option("--iters", flags.iters, "Jacobi rounds per instant");
    sub->add_option("--runs", flags.runs, "Monte Carlo runs");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_flag("--timed", flags.timed, "Collect per-execution timings");
  };
  CLI::App* check = app.add_subcommand("check", "Evaluate the certificates");
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate one run");
  CLI::App* estimate =
      app.add_subcommand("estimate", "Simulate and estimate one run");
  CLI::App* montecarlo =
      app.add_subcommand("montecarlo", "Monte Carlo RMSE summary");
  CLI::App* sweep = app.add_subcommand("sweep", "RMSE over several horizons");
  for (CLI::App* sub : {check, simulate, estimate, montecarlo, sweep}) {
    add_common(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitConfig;
  }

  try {
    const dmhe::RunConfig c = Resolve(flags);
    if (*check) return CmdCheck(c);
    if (*simulate) return CmdSimulate(c);
    if (*estimate) return CmdEstimate(c);
    if (*montecarlo) return CmdMonteCarlo(c);
    if (*sweep) return CmdSweep(c);
  } catch (const dmhe::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
