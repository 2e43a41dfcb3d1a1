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

#include "cfisac/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cfisac/rng.hpp"

namespace cfisac {

double WeightSchedule::omega0(int zeta) const {
  const double w0 = std::round((1.0 - step * (max_iterations - zeta)) * 1e12) / 1e12;
  return std::clamp(w0, 0.0, 1.0);
}

Weights WeightSchedule::weights(int zeta) const {
  const double w0 = omega0(zeta);
  return {w0, 1.0 - w0};
}

std::vector<double> WeightSchedule::grid() const {
  std::vector<double> g;
  for (int z = 1; z <= max_iterations; ++z) g.push_back(omega0(z));
  return g;
}

double total_aos(const std::vector<PointRecord>& points, double symbol_rate) {
  if (!(symbol_rate > 0)) throw std::invalid_argument("total_aos: symbol rate must be positive");
  double symbols = 0.0;
  for (const auto& p : points) symbols += p.tau;
  return symbols / symbol_rate;
}

double coverage_percent(const std::vector<PointRecord>& points, double p_th) {
  if (points.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& p : points)
    if (p.p_d >= p_th) ++hit;
  return 100.0 * static_cast<double>(hit) / static_cast<double>(points.size());
}

SweepResult summarize(std::vector<PointRecord> points, double symbol_rate, double p_th) {
  SweepResult r;
  r.aos_total_s = total_aos(points, symbol_rate);
  r.coverage_pct = coverage_percent(points, p_th);
  r.symbol_rate = symbol_rate;
  r.p_th = p_th;
  r.points = std::move(points);
  return r;
}

SchedulerSettings SchedulerSettings::from_config(const ScenarioConfig& cfg) {
  SchedulerSettings s;
  s.sinr_threshold_db = cfg.sensing.sinr_threshold_db;
  s.p_th = cfg.sensing.p_th;
  s.p_fa = cfg.sensing.p_fa;
  s.rho_max = cfg.rf.rho_max_w;
  s.tau_min = cfg.sensing.tau_min;
  s.tau_max = cfg.sensing.tau_max;
  s.rzf_regularizer = cfg.rf.rzf_regularizer;
  s.loop_trials = cfg.mc.loop_trials;
  s.report_trials = cfg.mc.report_trials;
  s.tol = cfg.solver.tol;
  s.max_iters = cfg.solver.max_iters;
  s.ccp.fpp_penalty = cfg.solver.fpp_penalty;
  s.ccp.slack_tol = cfg.solver.slack_tol;
  s.init = parse_init_strategy(cfg.solver.init);
  s.schedule.step = cfg.sensing.weight_step;
  s.schedule.max_iterations = cfg.sensing.weight_iterations;
  s.symbol_rate = cfg.symbol_rate();
  s.seed = cfg.seed;
  return s;
}

PointContext::PointContext(const Scene& scene, std::size_t point, const SchedulerSettings& settings)
    : point_(point), position_(scene.geometry().sensing_points.at(point)), settings_(&settings),
      seed_(derive_seed(settings.seed, {tag(Stream::Instance), point})) {
  try {
    const ChannelSet ch = scene.channels(point);
    const int M = scene.geometry().antennas_per_ap;
    const double reg = settings.rzf_regularizer >= 0
                           ? settings.rzf_regularizer
                           : default_rzf_regularizer(ch.ue_channels.size(), ch.noise_power, settings.rho_max);
    const PrecoderSet pre = make_precoders(ch, M, reg);
    model_ = assemble_sensing_model(ch, scene.angles(point), pre.w[0], M);
    problem_ = build_problem(ch, pre, model_, Weights{}, std::pow(10.0, settings.sinr_threshold_db / 10.0),
                             settings.rho_max, settings.tau_min, settings.tau_max);
  } catch (const std::exception& e) {
    error_ = e.what();
  }
}

const PointSolution& PointContext::solve(double omega0) {
  auto it = solves_.find(omega0);
  if (it != solves_.end()) return it->second;
  if (!valid()) throw std::runtime_error(error_);
  problem_.weights = Weights{omega0, 1.0 - omega0};
  PointSolution sol = solve_point(problem_, settings_->init, settings_->tol, settings_->max_iters, settings_->ccp);
  return solves_.emplace(omega0, std::move(sol)).first->second;
}

double PointContext::detect(double rho0, int tau, std::uint64_t trials) {
  // Powers equal to within one part in 10^6 share an estimate.
  int exponent = 0;
  long long mantissa = 0;
  double quantized = 0.0;
  if (rho0 > 0) {
    exponent = static_cast<int>(std::floor(std::log10(rho0))) - 6;
    const double unit = std::pow(10.0, exponent);
    mantissa = std::llround(rho0 / unit);
    quantized = static_cast<double>(mantissa) * unit;
  }
  const auto key = std::make_tuple(tau, exponent, mantissa, trials);
  auto it = detections_.find(key);
  if (it != detections_.end()) return it->second;
  const OperatingPoint op{quantized, static_cast<double>(tau), problem_.noise_power};
  const Threshold thr = calibrate_threshold(model_, op, settings_->p_fa, trials, seed_, Execution::Serial);
  const double p_d = detection_probability(model_, op, thr, trials, seed_, Execution::Serial);
  detections_.emplace(key, p_d);
  return p_d;
}

WeightTrial PointContext::attempt(double omega0) {
  WeightTrial t;
  try {
    const PointSolution& sol = solve(omega0);
    t.tau = sol.tau;
    t.tau_continuous = sol.tau_continuous;
    t.rho = sol.rho;
    t.ccp_iterations = sol.ccp_iterations;
    t.feasible = sol.feasible;
    if (sol.feasible) {
      t.p_d = detect(sol.rho[0], sol.tau, settings_->loop_trials);
    } else {
      std::ostringstream os;
      os << "infeasible at omega0=" << omega0 << " (violation " << sol.max_violation << ")";
      t.diagnostics = os.str();
    }
  } catch (const std::exception& e) {
    t.diagnostics = e.what();
  }
  return t;
}

AreaEvaluator::AreaEvaluator(const Scene& scene, SchedulerSettings settings) : settings_(std::move(settings)) {
  const std::size_t S = scene.geometry().S();
  if (S == 0) throw std::invalid_argument("AreaEvaluator: scene has no sensing points");
  contexts_.resize(S);
  const auto n = static_cast<long long>(S);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long s = 0; s < n; ++s)
    contexts_[static_cast<std::size_t>(s)] =
        std::make_unique<PointContext>(scene, static_cast<std::size_t>(s), settings_);
}

namespace {

PointRecord base_record(const PointContext& ctx) {
  PointRecord r;
  r.point = ctx.point();
  r.position = ctx.position();
  return r;
}

void fill_from_trial(PointRecord& r, const WeightTrial& t, double tau_fallback) {
  r.tau = t.tau > 0 ? t.tau : static_cast<int>(std::lround(tau_fallback));
  r.tau_continuous = t.tau_continuous;
  r.rho = t.rho;
  r.loop_p_d = t.p_d;
  r.feasible = t.feasible;
  r.ccp_iterations = t.ccp_iterations;
  r.diagnostics = t.diagnostics;
}

PointRecord adaptive_record(PointContext& ctx, const SchedulerSettings& settings, double p_th) {
  if (!(p_th > 0 && p_th < 1)) throw std::invalid_argument("adaptive weights: P_th must lie in (0, 1)");
  PointRecord r = base_record(ctx);
  const WeightLoopOutcome out =
      run_weight_loop(settings.schedule, p_th, [&](double w0) { return ctx.attempt(w0); });
  r.zeta = out.zeta;
  r.omega0 = out.omega0;
  fill_from_trial(r, out.trial, settings.tau_max);
  if (r.feasible) {
    r.p_d = settings.report_trials == settings.loop_trials
                ? out.trial.p_d
                : ctx.detect(out.trial.rho[0], out.trial.tau, settings.report_trials);
  }
  if (!out.any_feasible && r.diagnostics.empty()) r.diagnostics = "infeasible at every weight";
  r.outage = !out.any_feasible || (out.exhausted && r.p_d < p_th);
  return r;
}

} // namespace

PointRecord AreaEvaluator::adaptive_point(std::size_t s, double p_th) {
  return adaptive_record(*contexts_.at(s), settings_, p_th);
}

PointRecord AreaEvaluator::fixed_point(std::size_t s, double omega0, double p_th) {
  if (!(omega0 >= 0 && omega0 <= 1)) throw std::invalid_argument("fixed weights: omega0 must lie in [0, 1]");
  PointContext& ctx = *contexts_.at(s);
  PointRecord r = base_record(ctx);
  r.omega0 = omega0;
  const WeightTrial t = ctx.attempt(omega0);
  fill_from_trial(r, t, settings_.tau_max);
  if (r.feasible) {
    r.p_d = settings_.report_trials == settings_.loop_trials ? t.p_d
                                                              : ctx.detect(t.rho[0], t.tau, settings_.report_trials);
  }
  r.outage = !r.feasible || r.p_d < p_th;
  return r;
}

namespace {

template <class PerPoint>
std::vector<PointRecord> over_points(std::size_t S, PerPoint&& per_point) {
  std::vector<PointRecord> recs(S);
  const auto n = static_cast<long long>(S);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long s = 0; s < n; ++s) {
    const auto idx = static_cast<std::size_t>(s);
    try {
      recs[idx] = per_point(idx);
    } catch (const std::exception& e) {
      recs[idx].point = idx;
      recs[idx].outage = true;
      recs[idx].diagnostics = e.what();
    }
  }
  return recs;
}

} // namespace

SweepResult AreaEvaluator::adaptive(double p_th) {
  auto recs = over_points(contexts_.size(), [&](std::size_t s) { return adaptive_point(s, p_th); });
  for (auto& r : recs)
    if (r.tau == 0) r.tau = static_cast<int>(std::lround(settings_.tau_max));
  return summarize(std::move(recs), settings_.symbol_rate, p_th);
}

SweepResult AreaEvaluator::fixed(double omega0, double p_th) {
  if (!(omega0 >= 0 && omega0 <= 1)) throw std::invalid_argument("fixed weights: omega0 must lie in [0, 1]");
  auto recs = over_points(contexts_.size(), [&](std::size_t s) { return fixed_point(s, omega0, p_th); });
  for (auto& r : recs)
    if (r.tau == 0) r.tau = static_cast<int>(std::lround(settings_.tau_max));
  return summarize(std::move(recs), settings_.symbol_rate, p_th);
}

PointRecord adaptive_weights_for_point(const Scene& scene, std::size_t point, const SchedulerSettings& settings) {
  PointContext ctx(scene, point, settings);
  return adaptive_record(ctx, settings, settings.p_th);
}

SweepResult sweep_area(const Scene& scene, const SchedulerSettings& settings) {
  return AreaEvaluator(scene, settings).adaptive();
}

SweepResult fixed_weight_sweep(const Scene& scene, double omega0, const SchedulerSettings& settings) {
  return AreaEvaluator(scene, settings).fixed(omega0);
}

} // namespace cfisac
