// cfisac: cell-free ISAC drone detection simulator
// Copyright (C) 2026 The cfisac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cfisac/config.hpp"
#include "cfisac/detector.hpp"
#include "cfisac/optimizer.hpp"
#include "cfisac/precoding.hpp"
#include "cfisac/scene.hpp"

namespace cfisac {

// omega_0 = 1 - step * (max_iterations - zeta), clamped to [0, 1].
struct WeightSchedule {
  double step = 0.05;
  int max_iterations = 20;

  double omega0(int zeta) const;
  Weights weights(int zeta) const;
  std::vector<double> grid() const; // zeta = 1..max_iterations
};

// Outcome of one optimize-then-detect step inside the weight loop.
struct WeightTrial {
  bool feasible = false;
  int tau = 0;
  double tau_continuous = 0.0;
  RVec rho;
  double p_d = 0.0;
  int ccp_iterations = 0;
  std::string diagnostics;
};

struct WeightLoopOutcome {
  int zeta = 0;
  double omega0 = 0.0;
  WeightTrial trial;
  bool exhausted = false; // never exceeded P_th
  bool any_feasible = false;
};

// Adaptive weight selection for one point. `attempt(omega0)` solves and
// evaluates P_d; the loop stops at the first zeta with P_d > P_th.
template <class Attempt>
WeightLoopOutcome run_weight_loop(const WeightSchedule& schedule, double p_th, Attempt&& attempt) {
  WeightLoopOutcome out;
  out.exhausted = true;
  for (int zeta = 1; zeta <= schedule.max_iterations; ++zeta) {
    const double w0 = schedule.omega0(zeta);
    WeightTrial trial = attempt(w0);
    out.any_feasible = out.any_feasible || trial.feasible;
    out.zeta = zeta;
    out.omega0 = w0;
    out.trial = std::move(trial);
    if (out.trial.feasible && out.trial.p_d > p_th) {
      out.exhausted = false;
      break;
    }
  }
  return out;
}

struct PointRecord {
  std::size_t point = 0;
  Vec3 position = Vec3::Zero();
  int tau = 0;
  double tau_continuous = 0.0;
  RVec rho;
  double omega0 = 0.0;
  int zeta = 0;        // 0 for fixed-weight runs
  double p_d = 0.0;    // reported estimate
  double loop_p_d = 0.0;
  bool outage = false;
  bool feasible = false;
  int ccp_iterations = 0;
  std::string diagnostics;

  double rho0() const { return rho.size() ? rho[0] : 0.0; }
};

struct SweepResult {
  std::vector<PointRecord> points;
  double aos_total_s = 0.0;
  double coverage_pct = 0.0;
  double symbol_rate = 0.0;
  double p_th = 0.0;
};

double total_aos(const std::vector<PointRecord>& points, double symbol_rate);
double coverage_percent(const std::vector<PointRecord>& points, double p_th);
SweepResult summarize(std::vector<PointRecord> points, double symbol_rate, double p_th);

struct SchedulerSettings {
  double sinr_threshold_db = 10.0;
  double p_th = 0.9;
  double p_fa = 0.1;
  double rho_max = 1.0;
  double tau_min = 50.0;
  double tau_max = 300.0;
  double rzf_regularizer = -1.0; // negative: default
  std::uint64_t loop_trials = 10000;
  std::uint64_t report_trials = 100000;
  double tol = 1e-4;
  int max_iters = 50;
  CcpOptions ccp;
  InitStrategy init = InitStrategy::MultiStart;
  WeightSchedule schedule;
  double symbol_rate = 2e7;
  std::uint64_t seed = 1;

  static SchedulerSettings from_config(const ScenarioConfig& cfg);
};

// Precomputed channels, precoders and sensing model for one point, with
// memoized solves (by omega_0) and detection estimates (by tau, rho_0,
// trial count). Not thread-safe; each point is owned by one worker.
class PointContext {
public:
  PointContext(const Scene& scene, std::size_t point, const SchedulerSettings& settings);

  std::size_t point() const { return point_; }
  const Vec3& position() const { return position_; }
  const SensingModel& model() const { return model_; }
  const OptimizationProblem& problem() const { return problem_; }
  bool valid() const { return error_.empty(); }
  const std::string& error() const { return error_; }

  const PointSolution& solve(double omega0);
  double detect(double rho0, int tau, std::uint64_t trials);
  WeightTrial attempt(double omega0);

private:
  std::size_t point_;
  Vec3 position_;
  const SchedulerSettings* settings_;
  SensingModel model_;
  OptimizationProblem problem_;
  std::string error_;
  std::uint64_t seed_;
  std::map<double, PointSolution> solves_;
  std::map<std::tuple<int, int, long long, std::uint64_t>, double> detections_;
};

// Owns one PointContext per sensing point so that adaptive and fixed-weight
// sweeps on the same scene share work. Points run on the OpenMP pool.
class AreaEvaluator {
public:
  AreaEvaluator(const Scene& scene, SchedulerSettings settings);

  const SchedulerSettings& settings() const { return settings_; }
  std::size_t size() const { return contexts_.size(); }
  PointContext& context(std::size_t s) { return *contexts_[s]; }

  SweepResult adaptive(double p_th);
  SweepResult adaptive() { return adaptive(settings_.p_th); }
  SweepResult fixed(double omega0, double p_th);
  SweepResult fixed(double omega0) { return fixed(omega0, settings_.p_th); }

  PointRecord adaptive_point(std::size_t s, double p_th);
  PointRecord fixed_point(std::size_t s, double omega0, double p_th);

private:
  SchedulerSettings settings_;
  std::vector<std::unique_ptr<PointContext>> contexts_;
};

PointRecord adaptive_weights_for_point(const Scene& scene, std::size_t point, const SchedulerSettings& settings);
SweepResult sweep_area(const Scene& scene, const SchedulerSettings& settings);
SweepResult fixed_weight_sweep(const Scene& scene, double omega0, const SchedulerSettings& settings);

} // namespace cfisac
