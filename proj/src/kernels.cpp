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

#include "cfisac/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cfisac/rng.hpp"

namespace cfisac {

namespace {

std::uint64_t num_chunks(std::uint64_t trials) { return (trials + kTrialChunk - 1) / kTrialChunk; }

void run_chunk(const StatisticSampler& s, Hypothesis h, std::uint64_t trials, std::uint64_t seed,
               std::uint64_t chunk, double* out) {
  const std::uint64_t begin = chunk * kTrialChunk;
  const std::uint64_t end = std::min(trials, begin + kTrialChunk);
  auto eng = make_engine(seed, {chunk});
  std::normal_distribution<double> gauss(0.0, 1.0);

  const Eigen::Index R = s.matrix.rows();
  const Eigen::Index L = s.beta_rows.cols();
  const double half = std::sqrt(0.5);
  const double noise_scale = std::sqrt(0.5 * s.noise_var);
  CVec y(R);
  CVec By(R);
  for (std::uint64_t t = begin; t < end; ++t) {
    for (Eigen::Index r = 0; r < R; ++r) {
      cplx signal(0.0, 0.0);
      if (h == Hypothesis::H1) {
        for (Eigen::Index l = 0; l < L; ++l) {
          const double re = gauss(eng);
          const double im = gauss(eng);
          signal += s.beta_rows(r, l) * cplx(half * re, half * im);
        }
        signal *= s.amplitude;
      }
      const double re = gauss(eng);
      const double im = gauss(eng);
      y[r] = signal + cplx(noise_scale * re, noise_scale * im);
    }
    By.noalias() = s.matrix * y;
    out[t] = std::max(0.0, y.dot(By).real());
  }
}

} // namespace

std::vector<double> sample_statistic_serial(const StatisticSampler& s, Hypothesis h, std::uint64_t trials,
                                            std::uint64_t seed) {
  std::vector<double> out(trials);
  const std::uint64_t chunks = num_chunks(trials);
  for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(s, h, trials, seed, c, out.data());
  return out;
}

std::vector<double> sample_statistic_parallel(const StatisticSampler& s, Hypothesis h, std::uint64_t trials,
                                              std::uint64_t seed) {
  std::vector<double> out(trials);
  const auto chunks = static_cast<std::int64_t>(num_chunks(trials));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < chunks; ++c) run_chunk(s, h, trials, seed, static_cast<std::uint64_t>(c), out.data());
  return out;
}

std::uint64_t count_at_or_above_serial(const std::vector<double>& samples, double threshold) {
  std::uint64_t n = 0;
  for (double v : samples) n += (v >= threshold) ? 1 : 0;
  return n;
}

std::uint64_t count_at_or_above_parallel(const std::vector<double>& samples, double threshold) {
  std::uint64_t n = 0;
  const auto size = static_cast<std::int64_t>(samples.size());
#pragma omp parallel for reduction(+ : n) schedule(static)
  for (std::int64_t i = 0; i < size; ++i) n += (samples[i] >= threshold) ? 1 : 0;
  return n;
}

SampleMoments moments(const std::vector<double>& samples) {
  if (samples.size() < 2) return {samples.empty() ? 0.0 : samples.front(), 0.0};
  // Welford
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t n = 0;
  for (double v : samples) {
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

} // namespace cfisac
