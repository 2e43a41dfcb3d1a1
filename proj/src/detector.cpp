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

#include "cfisac/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cfisac/rng.hpp"

namespace cfisac {

SensingModel assemble_sensing_model(const ChannelSet& channels, const SteeringAngles& angles, const CVec& w0,
                                    int antennas_per_ap) {
  const auto R = channels.sensing_gains.rows();
  const auto L = channels.sensing_gains.cols();
  const int M = antennas_per_ap;
  if (angles.tx_azimuth.size() != L || w0.size() != L * M)
    throw std::invalid_argument("assemble_sensing_model: dimension mismatch");

  SensingModel model;
  model.antennas_per_ap = M;
  model.beta_rows.resize(R, L);
  for (Eigen::Index l = 0; l < L; ++l) {
    const CVec a = array_response(angles.tx_azimuth[l], angles.tx_elevation[l], M);
    const cplx gain = a.cwiseProduct(w0.segment(l * M, M)).sum(); // a^T w_{0,l}
    for (Eigen::Index r = 0; r < R; ++r) model.beta_rows(r, l) = std::sqrt(channels.sensing_gains(r, l)) * gain;
  }

  model.beta_t = CMat::Zero(R, R * L);
  for (Eigen::Index r = 0; r < R; ++r) model.beta_t.block(r, r * L, 1, L) = model.beta_rows.row(r);

  const CMat G = model.gram();
  Eigen::SelfAdjointEigenSolver<CMat> eig(G);
  if (eig.info() != Eigen::Success) throw NumericalError("assemble_sensing_model: eigen-decomposition failed");
  const auto n = G.rows();
  model.gram_eigs.resize(n);
  model.gram_eigvecs.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    model.gram_eigs[i] = std::max(0.0, eig.eigenvalues()[n - 1 - i]);
    model.gram_eigvecs.col(i) = eig.eigenvectors().col(n - 1 - i);
  }
  return model;
}

CMat detector_shape(const SensingModel& model, const OperatingPoint& op) {
  const double c = model.antennas_per_ap * op.rho0 * op.tau;
  const CMat S = model.beta_t * model.beta_t.adjoint();
  CMat A = c * S;
  A.diagonal().array() += op.noise;
  const CMat X = A.ldlt().solve(S);
  return 0.5 * (X + X.adjoint());
}

CMat detector_matrix(const SensingModel& model, const OperatingPoint& op) {
  return (model.antennas_per_ap * op.rho0) * detector_shape(model, op);
}

double test_statistic(const CVec& ysum, const CMat& B) {
  if (ysum.size() != B.rows() || B.rows() != B.cols())
    throw std::invalid_argument("test_statistic: dimension mismatch");
  return std::max(0.0, ysum.dot(B * ysum).real());
}

namespace {

struct TraceTerms {
  double noise_term; // tau sigma^2 M rho0 tr(G A^{-1})
  double gap;        // (M tau rho0)^2 tr(G A^{-1} G)
};

TraceTerms trace_terms(const SensingModel& model, const OperatingPoint& op) {
  if (op.tau < 1.0 || op.rho0 < 0.0) throw std::invalid_argument("expected_statistic: need tau >= 1, rho0 >= 0");
  const double M = model.antennas_per_ap;
  const double c = M * op.rho0 * op.tau;
  const CMat G = model.gram();
  CMat A = c * G;
  A.diagonal().array() += op.noise;
  const CMat Y = A.ldlt().solve(G); // A^{-1} G
  const double tr_ga = Y.trace().real();
  const double tr_gag = (G * Y).trace().real();
  return {op.tau * op.noise * M * op.rho0 * tr_ga, c * c * tr_gag};
}

} // namespace

double expected_statistic(const SensingModel& model, const OperatingPoint& op, Hypothesis h) {
  const auto t = trace_terms(model, op);
  return h == Hypothesis::H0 ? t.noise_term : t.noise_term + t.gap;
}

double statistic_gap_trace(const SensingModel& model, const OperatingPoint& op) { return trace_terms(model, op).gap; }

double statistic_gap_eigen(const SensingModel& model, const OperatingPoint& op) {
  const double c = model.antennas_per_ap * op.rho0 * op.tau;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < model.gram_eigs.size(); ++i) {
    const double d = model.gram_eigs[i];
    sum += c * c * d * d / (c * d + op.noise);
  }
  return sum;
}

StatisticSampler make_sampler(const SensingModel& model, const OperatingPoint& op) {
  StatisticSampler s;
  s.beta_rows = model.beta_rows;
  s.matrix = detector_shape(model, op);
  s.amplitude = op.tau * std::sqrt(model.antennas_per_ap * op.rho0);
  s.noise_var = op.tau * op.noise;
  return s;
}

namespace {

bool is_zero(const CMat& m) { return m.cwiseAbs().maxCoeff() == 0.0; }

} // namespace

Threshold calibrate_threshold(const SensingModel& model, const OperatingPoint& op, double p_fa,
                              std::uint64_t trials, std::uint64_t seed, Execution exec) {
  if (trials < 1000) throw std::invalid_argument("calibrate_threshold: need at least 1000 trials");
  if (!(p_fa > 0.0 && p_fa < 1.0)) throw std::invalid_argument("calibrate_threshold: p_fa must lie in (0, 1)");
  const auto sampler = make_sampler(model, op);
  auto samples = sample_statistic(sampler, Hypothesis::H0, trials, derive_seed(seed, {tag(Stream::Calibration)}), exec);
  for (double v : samples)
    if (!std::isfinite(v)) throw NumericalError("calibrate_threshold: non-finite statistic sample");

  // The threshold is the smallest sample such that ceil(p_fa * n) samples
  // lie at or above it.
  const auto n = samples.size();
  const auto above = static_cast<std::size_t>(std::ceil(p_fa * static_cast<double>(n)));
  const std::size_t idx = n - std::clamp<std::size_t>(above, 1, n);
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(idx), samples.end());

  Threshold thr;
  thr.normalized = samples[idx];
  thr.raw = model.antennas_per_ap * op.rho0 * thr.normalized;
  thr.degenerate = op.rho0 == 0.0 || is_zero(sampler.matrix);
  return thr;
}

double detection_probability(const SensingModel& model, const OperatingPoint& op, const Threshold& threshold,
                             std::uint64_t trials, std::uint64_t seed, Execution exec) {
  if (trials < 1) throw std::invalid_argument("detection_probability: need at least one trial");
  const auto sampler = make_sampler(model, op);
  // A zero detector matrix carries no information; never declare a target.
  if (is_zero(sampler.matrix)) return 0.0;
  const auto samples = sample_statistic(sampler, Hypothesis::H1, trials, derive_seed(seed, {tag(Stream::Detection)}), exec);
  const auto hits = exec == Execution::Serial ? count_at_or_above_serial(samples, threshold.normalized)
                                              : count_at_or_above_parallel(samples, threshold.normalized);
  return static_cast<double>(hits) / static_cast<double>(trials);
}

double false_alarm_rate(const SensingModel& model, const OperatingPoint& op, const Threshold& threshold,
                        std::uint64_t trials, std::uint64_t seed, Execution exec) {
  const auto sampler = make_sampler(model, op);
  const auto samples = sample_statistic(sampler, Hypothesis::H0, trials, derive_seed(seed, {tag(Stream::FalseAlarm)}), exec);
  const auto hits = exec == Execution::Serial ? count_at_or_above_serial(samples, threshold.normalized)
                                              : count_at_or_above_parallel(samples, threshold.normalized);
  return static_cast<double>(hits) / static_cast<double>(trials);
}

DetectionResult evaluate_detection(const SensingModel& model, const OperatingPoint& op, double p_fa,
                                   std::uint64_t calibration_trials, std::uint64_t trials, std::uint64_t seed,
                                   Execution exec) {
  const auto thr = calibrate_threshold(model, op, p_fa, calibration_trials, seed, exec);
  DetectionResult res;
  res.threshold = thr.raw;
  res.normalized_threshold = thr.normalized;
  res.degenerate = thr.degenerate;
  res.p_fa_target = p_fa;
  res.trials = trials;
  res.p_fa_empirical = false_alarm_rate(model, op, thr, trials, seed, exec);
  res.p_d = detection_probability(model, op, thr, trials, seed, exec);
  return res;
}

} // namespace cfisac
