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

#include <doctest.h>

#include <cmath>

#include "cfisac/kernels.hpp"
#include "test_support.hpp"

using namespace cfisac;

namespace {

StatisticSampler sampler(std::mt19937_64& g) {
  StatisticSampler s;
  s.beta_rows = testing::random_cmat(g, 3, 2);
  const CMat X = testing::random_cmat(g, 3, 3);
  s.matrix = X * X.adjoint();
  s.amplitude = 1.7;
  s.noise_var = 2.0;
  return s;
}

} // namespace

TEST_CASE("parallel sampling reproduces the serial reference") {
  std::mt19937_64 g(1);
  const auto s = sampler(g);
  for (std::uint64_t n : {1ull, 1023ull, 1024ull, 1025ull, 5000ull}) {
    for (auto h : {Hypothesis::H0, Hypothesis::H1}) {
      const auto a = sample_statistic_serial(s, h, n, 77);
      const auto b = sample_statistic_parallel(s, h, n, 77);
      REQUIRE(a.size() == n);
      CHECK(a == b);
    }
  }
}

TEST_CASE("chunks are independent of the total trial count") {
  std::mt19937_64 g(2);
  const auto s = sampler(g);
  const auto a = sample_statistic_serial(s, Hypothesis::H1, 3000, 5);
  const auto b = sample_statistic_serial(s, Hypothesis::H1, 2048, 5);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(a[i] == b[i]);
  const auto c = sample_statistic_serial(s, Hypothesis::H1, 2048, 6);
  CHECK(c != b);
}

TEST_CASE("counts") {
  std::mt19937_64 g(3);
  const auto s = sampler(g);
  const auto v = sample_statistic_parallel(s, Hypothesis::H0, 10000, 9);
  for (double thr : {0.0, 1.0, 5.0, 20.0, 1e9}) {
    std::uint64_t oracle = 0;
    for (double x : v) oracle += x >= thr;
    CHECK(count_at_or_above_serial(v, thr) == oracle);
    CHECK(count_at_or_above_parallel(v, thr) == oracle);
  }
  // The boundary counts as a hit.
  CHECK(count_at_or_above_serial({1.0, 2.0}, 2.0) == 1);
}

TEST_CASE("noise-only mean is noise variance times trace") {
  std::mt19937_64 g(4);
  const auto s = sampler(g);
  const auto mom = moments(sample_statistic_parallel(s, Hypothesis::H0, 200000, 10));
  const double analytic = s.noise_var * s.matrix.trace().real();
  CHECK(std::abs(mom.mean - analytic) <= 3.0 * mom.std_error);

  // Independent RCS per pair: H1 adds amplitude^2 sum_r B_rr sum_l |beta_rl|^2.
  const auto m1 = moments(sample_statistic_parallel(s, Hypothesis::H1, 200000, 10));
  const RVec row_power = s.beta_rows.cwiseAbs2().rowwise().sum();
  const double signal = s.amplitude * s.amplitude * s.matrix.diagonal().real().dot(row_power);
  CHECK(std::abs(m1.mean - analytic - signal) <= 3.0 * m1.std_error);
}

TEST_CASE("moments") {
  const auto m = moments({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}
