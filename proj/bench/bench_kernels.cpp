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

#include <benchmark/benchmark.h>
#include <omp.h>

#include "cfisac/detector.hpp"
#include "cfisac/kernels.hpp"
#include "cfisac/precoding.hpp"
#include "cfisac/scene.hpp"
#include "cfisac/scheduler.hpp"

using namespace cfisac;

namespace {

const StatisticSampler& default_sampler() {
  static const StatisticSampler s = [] {
    const ScenarioConfig cfg;
    const Scene scene = build_scene(cfg, cfg.seed);
    const ChannelSet ch = scene.channels(45);
    const int M = scene.geometry().antennas_per_ap;
    const auto pre = make_precoders(ch, M, default_rzf_regularizer(ch.ue_channels.size(), ch.noise_power, 1.0));
    const auto model = assemble_sensing_model(ch, scene.angles(45), pre.w[0], M);
    return make_sampler(model, {0.3, 150, ch.noise_power});
  }();
  return s;
}

void BM_SampleSerial(benchmark::State& state) {
  const auto& s = default_sampler();
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_statistic_serial(s, Hypothesis::H1, n, 11));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_SampleParallel(benchmark::State& state) {
  const auto& s = default_sampler();
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_statistic_parallel(s, Hypothesis::H1, n, 11));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_CountSerial(benchmark::State& state) {
  const auto samples = sample_statistic_serial(default_sampler(), Hypothesis::H0, 1 << 20, 3);
  for (auto _ : state) benchmark::DoNotOptimize(count_at_or_above_serial(samples, 1.0));
}

void BM_CountParallel(benchmark::State& state) {
  const auto samples = sample_statistic_serial(default_sampler(), Hypothesis::H0, 1 << 20, 3);
  for (auto _ : state) benchmark::DoNotOptimize(count_at_or_above_parallel(samples, 1.0));
}

// Fixed-weight sweep over a reduced grid with 1 thread and with all threads.
void BM_FixedSweep(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.geometry.grid_side = 4;
  cfg.mc.loop_trials = 2000;
  cfg.mc.report_trials = 2000;
  const Scene scene = build_scene(cfg, cfg.seed);
  const auto settings = SchedulerSettings::from_config(cfg);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(state.range(0) == 0 ? 1 : saved);
  for (auto _ : state) benchmark::DoNotOptimize(fixed_weight_sweep(scene, 0.5, settings));
  omp_set_num_threads(saved);
}

} // namespace

BENCHMARK(BM_SampleSerial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleParallel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CountParallel)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FixedSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
