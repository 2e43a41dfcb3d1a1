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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "cfisac/detector.hpp"
#include "test_support.hpp"

using namespace cfisac;
using cfisac::testing::random_model;

namespace {

// B = M rho0 beta^T (M rho0 tau beta^* beta^T + sigma^2 I)^-1 beta^*, formed
// directly in the R L dimension.
CMat direct_detector(const SensingModel& m, const OperatingPoint& op) {
  const double M = m.antennas_per_ap;
  const CMat bt = m.beta_t;               // R x RL
  const CMat G = bt.adjoint() * bt;       // beta^* beta^T
  CMat A = (M * op.rho0 * op.tau) * G;
  A.diagonal().array() += op.noise;
  return (M * op.rho0) * bt * A.inverse() * bt.adjoint();
}

SensingModel scalar_model(double d) {
  SensingModel m;
  m.antennas_per_ap = 1;
  m.beta_rows = CMat::Constant(1, 1, cplx(std::sqrt(d), 0));
  m.beta_t = m.beta_rows;
  m.gram_eigs = RVec::Constant(1, d);
  m.gram_eigvecs = CMat::Identity(1, 1);
  return m;
}

double binomial_halfwidth_99(double p, double n) { return 2.5758 * std::sqrt(p * (1 - p) / n); }

} // namespace

TEST_CASE("single-path model has one eigenvalue") {
  ChannelSet ch;
  SteeringAngles ang{RVec::Constant(1, 0.3), RVec::Constant(1, 0.2), RVec::Constant(1, 0.0), RVec::Constant(1, 0.0)};
  ch.target_channel = array_response(0.3, 0.2, 4).conjugate();
  ch.sensing_gains = RMat::Constant(1, 1, 2.5);
  const CVec w0 = ch.target_channel / ch.target_channel.norm();
  const auto m = assemble_sensing_model(ch, ang, w0, 4);
  const cplx gain = (array_response(0.3, 0.2, 4).transpose() * w0)(0);
  CHECK(m.gram_eigs.size() == 1);
  CHECK(m.gram_eigs[0] == doctest::Approx(2.5 * std::norm(gain)).epsilon(1e-12));
  // Coherent transmit beam: |a^T w0| = sqrt(M / L).
  CHECK(std::abs(gain) == doctest::Approx(2.0).epsilon(1e-12));

  ch.sensing_gains.setZero();
  const auto z = assemble_sensing_model(ch, ang, w0, 4);
  CHECK(z.gram_eigs.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sensing model structure and eigen-decomposition") {
  std::mt19937_64 g(21);
  for (int t = 0; t < 5; ++t) {
    const int R = 2, L = 3, M = 4;
    const auto m = random_model(g, R, L, M);
    CHECK(m.beta_t.rows() == R);
    CHECK(m.beta_t.cols() == R * L);
    for (int r = 0; r < R; ++r)
      for (int c = 0; c < R * L; ++c) {
        const cplx expect = (c / L == r) ? m.beta_rows(r, c % L) : cplx(0, 0);
        CHECK(m.beta_t(r, c) == expect);
      }

    const CMat G = m.gram();
    Eigen::ComplexEigenSolver<CMat> oracle(G);
    std::vector<double> ref;
    for (int i = 0; i < G.rows(); ++i) ref.push_back(oracle.eigenvalues()[i].real());
    std::sort(ref.rbegin(), ref.rend());
    for (int i = 0; i < G.rows(); ++i) {
      CHECK(std::abs(m.gram_eigs[i] - std::max(0.0, ref[static_cast<std::size_t>(i)])) < 1e-9 * G.norm());
      if (i > 0) CHECK(m.gram_eigs[i] <= m.gram_eigs[i - 1]);
      CHECK(m.gram_eigs[i] >= 0.0);
      if (i >= R) CHECK(m.gram_eigs[i] < 1e-12 * m.gram_eigs[0]);
    }
    const CMat rec = m.gram_eigvecs * m.gram_eigs.cast<cplx>().asDiagonal() * m.gram_eigvecs.adjoint();
    CHECK((rec - G).norm() <= 1e-10 * G.norm());
    CHECK((m.gram_eigvecs.adjoint() * m.gram_eigvecs - CMat::Identity(R * L, R * L)).norm() < 1e-10);
  }
}

TEST_CASE("detector matrix") {
  std::mt19937_64 g(22);
  const auto m = random_model(g, 4, 3, 2);
  const OperatingPoint op{0.7, 40, 1.3};
  const CMat B = detector_matrix(m, op);
  const CMat ref = direct_detector(m, op);
  CHECK((B - ref).norm() < 1e-10 * ref.norm());
  CHECK((B - B.adjoint()).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<CMat> eig(B);
  CHECK(eig.eigenvalues().minCoeff() > -1e-12 * eig.eigenvalues().maxCoeff());

  double prev = B.norm();
  for (double r0 : {0.1, 1e-2, 1e-4, 1e-8}) {
    const double n = detector_matrix(m, {r0, 40, 1.3}).norm();
    CHECK(n < prev);
    prev = n;
  }
  CHECK(detector_matrix(m, {0.0, 40, 1.3}).norm() == 0.0);
}

TEST_CASE("test statistic") {
  std::mt19937_64 g(23);
  const auto m = random_model(g, 3, 2, 2);
  const CMat B = detector_matrix(m, {0.5, 10, 1.0});
  CHECK(test_statistic(CVec::Zero(3), B) == 0.0);
  const CVec y = testing::random_cvec(g, 3);
  CHECK(test_statistic(y, CMat::Zero(3, 3)) == 0.0);

  cplx sum(0, 0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) sum += std::conj(y[i]) * B(i, j) * y[j];
  const double T = test_statistic(y, B);
  CHECK(std::abs(T - sum.real()) <= 1e-12 * std::abs(sum.real()));
  CHECK(T >= 0.0);
  CHECK_THROWS_AS(test_statistic(CVec::Zero(2), B), std::invalid_argument);
}

TEST_CASE("expected statistic") {
  const auto one = scalar_model(1.0);
  const OperatingPoint op{1.0, 1.0, 1.0};
  // (M tau rho0)^2 d^2 / (M rho0 tau d + sigma^2) = 1 / 2, and the 1x1
  // trace form: tr(G A^-1 G) with G = 1, A = 2.
  CHECK(statistic_gap_eigen(one, op) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(statistic_gap_trace(one, op) == doctest::Approx(1.0 * 1.0 / 2.0).epsilon(1e-15));
  CHECK(expected_statistic(one, op, Hypothesis::H0) == doctest::Approx(0.5).epsilon(1e-15));

  std::mt19937_64 g(24);
  const auto m = random_model(g, 5, 3, 4);
  CHECK(expected_statistic(m, {0.0, 20, 1.0}, Hypothesis::H0) == 0.0);
  CHECK(expected_statistic(m, {0.0, 20, 1.0}, Hypothesis::H1) == 0.0);

  for (double r0 : {0.01, 0.3, 2.0})
    for (double tau : {1.0, 17.0, 300.0}) {
      const OperatingPoint p{r0, tau, 0.8};
      const double tr = statistic_gap_trace(m, p), ei = statistic_gap_eigen(m, p);
      CHECK(std::abs(tr - ei) <= 1e-9 * std::abs(ei));
      CHECK(expected_statistic(m, p, Hypothesis::H1) - expected_statistic(m, p, Hypothesis::H0) ==
            doctest::Approx(tr).epsilon(1e-9));
      CHECK(expected_statistic(m, p, Hypothesis::H1) >= expected_statistic(m, p, Hypothesis::H0));
      CHECK(expected_statistic(m, p, Hypothesis::H0) >= 0.0);
    }

  double prev = 0;
  for (double r0 = 0.05; r0 < 2; r0 += 0.05) {
    const double gap = statistic_gap_eigen(m, {r0, 30, 1.0});
    CHECK(gap > prev);
    prev = gap;
  }
  prev = 0;
  for (double tau = 1; tau < 300; tau += 7) {
    const double gap = statistic_gap_trace(m, {0.2, tau, 1.0});
    CHECK(gap > prev);
    prev = gap;
  }
  CHECK_THROWS_AS(expected_statistic(m, {0.1, 0.5, 1.0}, Hypothesis::H0), std::invalid_argument);
}

TEST_CASE("Monte Carlo means match the analytic expectations") {
  std::mt19937_64 g(25);
  const auto m = random_model(g, 4, 3, 2, 0.05);
  const OperatingPoint op{0.4, 25, 1.0};
  const auto sampler = make_sampler(m, op);
  const double scale = m.antennas_per_ap * op.rho0; // samples use the normalized matrix
  for (auto h : {Hypothesis::H0, Hypothesis::H1}) {
    const auto mom = moments(sample_statistic(sampler, h, 100000, 99, Execution::Serial));
    const double analytic = expected_statistic(m, op, h);
    CHECK(std::abs(scale * mom.mean - analytic) <= 3.0 * scale * mom.std_error);
  }
}

TEST_CASE("threshold calibration") {
  std::mt19937_64 g(26);
  const auto m = random_model(g, 4, 3, 2, 0.05);
  const OperatingPoint op{0.4, 25, 1.0};
  const auto thr = calibrate_threshold(m, op, 0.1, 100000, 5);
  CHECK_FALSE(thr.degenerate);
  CHECK(thr.raw == doctest::Approx(m.antennas_per_ap * op.rho0 * thr.normalized));
  const double pfa = false_alarm_rate(m, op, thr, 100000, 5);
  CHECK(std::abs(pfa - 0.1) <= binomial_halfwidth_99(0.1, 1e5));

  const double loose = calibrate_threshold(m, op, 0.9, 100000, 5).normalized;
  const double median = calibrate_threshold(m, op, 0.5, 100000, 5).normalized;
  const double strict = calibrate_threshold(m, op, 0.01, 100000, 5).normalized;
  CHECK(loose < median);
  CHECK(median < thr.normalized);
  CHECK(thr.normalized < strict);

  const auto zero = calibrate_threshold(m, {0.0, 25, 1.0}, 0.1, 10000, 5);
  CHECK(zero.raw == 0.0);
  CHECK(zero.degenerate);
  CHECK_THROWS_AS(calibrate_threshold(m, op, 0.1, 999, 5), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_threshold(m, op, 1.0, 5000, 5), std::invalid_argument);
}

TEST_CASE("zero sensing power: detection equals false alarm") {
  std::mt19937_64 g(27);
  const auto m = random_model(g, 4, 3, 2, 0.05);
  const auto res = evaluate_detection(m, {0.0, 50, 1.0}, 0.1, 100000, 100000, 8);
  CHECK(res.degenerate);
  CHECK(std::abs(res.p_d - 0.1) <= binomial_halfwidth_99(0.1, 1e5) * std::sqrt(2.0));
}

TEST_CASE("detection probability grows with power and blocklength") {
  std::mt19937_64 g(28);
  const auto m = random_model(g, 4, 3, 2, 0.02);
  const double tol = 0.01; // Monte Carlo slack at 2e4 trials
  double prev = 0;
  for (double r0 : {0.0, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
    const double pd = evaluate_detection(m, {r0, 30, 1.0}, 0.1, 20000, 20000, 3).p_d;
    CHECK(pd >= prev - tol);
    prev = pd;
  }
  CHECK(prev > 0.5);
  prev = 0;
  for (double tau : {1.0, 5.0, 20.0, 50.0, 100.0, 300.0}) {
    const double pd = evaluate_detection(m, {0.2, tau, 1.0}, 0.1, 20000, 20000, 3).p_d;
    CHECK(pd >= prev - tol);
    prev = pd;
  }
}

TEST_CASE("serial and parallel detection agree exactly") {
  std::mt19937_64 g(29);
  const auto m = random_model(g, 4, 3, 2, 0.01);
  const OperatingPoint op{0.3, 40, 1.0};
  const auto a = evaluate_detection(m, op, 0.1, 5000, 7000, 12, Execution::Serial);
  const auto b = evaluate_detection(m, op, 0.1, 5000, 7000, 12, Execution::Parallel);
  CHECK(a.threshold == b.threshold);
  CHECK(a.p_d == b.p_d);
  CHECK(a.p_fa_empirical == b.p_fa_empirical);
}
