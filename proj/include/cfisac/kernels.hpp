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
#include <vector>

#include "cfisac/types.hpp"

namespace cfisac {

enum class Hypothesis { H0, H1 };

enum class Execution { Serial, Parallel };

// Everything one Monte Carlo trial of the accumulated statistic needs.
// Per trial:
//   H1: alpha ~ CN(0, I_{RL}) fresh, s_r = amplitude * beta_rows.row(r) . alpha_r
//   sum_y = s + n,  n ~ CN(0, noise_var I_R)     (H0: s = 0)
//   T = sum_y^H matrix sum_y
struct StatisticSampler {
  CMat beta_rows;        // R x L
  CMat matrix;           // R x R, Hermitian PSD
  double amplitude = 0;  // tau * sqrt(M rho0)
  double noise_var = 0;  // tau * sigma^2
};

// Trials are split into fixed chunks; chunk c draws from
// make_engine(seed, {c}), so both implementations return the same samples
// in the same order regardless of thread count.
inline constexpr std::uint64_t kTrialChunk = 1024;

std::vector<double> sample_statistic_serial(const StatisticSampler& s, Hypothesis h, std::uint64_t trials,
                                            std::uint64_t seed);
std::vector<double> sample_statistic_parallel(const StatisticSampler& s, Hypothesis h, std::uint64_t trials,
                                              std::uint64_t seed);

inline std::vector<double> sample_statistic(const StatisticSampler& s, Hypothesis h, std::uint64_t trials,
                                            std::uint64_t seed, Execution exec) {
  return exec == Execution::Serial ? sample_statistic_serial(s, h, trials, seed)
                                   : sample_statistic_parallel(s, h, trials, seed);
}

// Number of samples with value >= threshold.
std::uint64_t count_at_or_above_serial(const std::vector<double>& samples, double threshold);
std::uint64_t count_at_or_above_parallel(const std::vector<double>& samples, double threshold);

struct SampleMoments {
  double mean = 0;
  double std_error = 0;
};
SampleMoments moments(const std::vector<double>& samples);

} // namespace cfisac
