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

#include "cfisac/kernels.hpp"
#include "cfisac/scene.hpp"
#include "cfisac/types.hpp"

namespace cfisac {

// Multi-static sensing model after per-receiver MRC combining.
//
// beta_rows(r, l) = sqrt(beta_{r,l}) a^T(az_l, el_l) w_{0,l}; row r is
// beta_r^T. beta_t is the R x RL block-diagonal matrix whose r-th row
// carries beta_r^T in columns r*L .. r*L+L-1. The Gram matrix
// G = conj(beta) beta^T = beta_t^H beta_t (RL x RL) is decomposed as
// U diag(d) U^H with d sorted descending; at most R of the d are nonzero.
struct SensingModel {
  CMat beta_rows;
  CMat beta_t;
  RVec gram_eigs;
  CMat gram_eigvecs;
  int antennas_per_ap = 1;

  std::size_t R() const { return static_cast<std::size_t>(beta_rows.rows()); }
  std::size_t L() const { return static_cast<std::size_t>(beta_rows.cols()); }
  CMat gram() const { return beta_t.adjoint() * beta_t; }
};

// Per-candidate operating point of the detector.
struct OperatingPoint {
  double rho0 = 0.0;  // sensing power, W
  double tau = 1.0;   // blocklength, symbols
  double noise = 1.0; // sigma_n^2, W
};

// Threshold on the raw statistic T and on T / (M rho0). The normalized form
// keeps the decision rule meaningful as rho0 -> 0, where B itself vanishes.
struct Threshold {
  double raw = 0.0;
  double normalized = 0.0;
  bool degenerate = false;
};

struct DetectionResult {
  double threshold = 0.0;
  double normalized_threshold = 0.0;
  double p_fa_target = 0.0;
  double p_fa_empirical = 0.0;
  double p_d = 0.0;
  std::uint64_t trials = 0;
  bool degenerate = false;
};

SensingModel assemble_sensing_model(const ChannelSet& channels, const SteeringAngles& angles, const CVec& w0,
                                    int antennas_per_ap);

// B = M rho0 beta^T (M rho0 tau G + sigma^2 I)^{-1} conj(beta), evaluated in
// the equivalent R x R form (M rho0 tau S + sigma^2 I)^{-1} S with
// S = beta_t beta_t^H. Hermitian PSD.
CMat detector_matrix(const SensingModel& model, const OperatingPoint& op);

// B / (M rho0); finite (S / sigma^2) at rho0 = 0.
CMat detector_shape(const SensingModel& model, const OperatingPoint& op);

// T = (sum y)^H B (sum y).
double test_statistic(const CVec& ysum, const CMat& B);

// E{T|H} by the trace formulas over the RL x RL Gram matrix.
double expected_statistic(const SensingModel& model, const OperatingPoint& op, Hypothesis h);

// E{T|H1} - E{T|H0} = (M tau rho0)^2 tr(G (M rho0 tau G + sigma^2 I)^{-1} G).
double statistic_gap_trace(const SensingModel& model, const OperatingPoint& op);

// Same quantity from the eigenvalues: sum (M tau rho0)^2 d^2 / (M rho0 tau d + sigma^2).
double statistic_gap_eigen(const SensingModel& model, const OperatingPoint& op);

// Empirical (1 - p_fa) quantile of T under H0.
Threshold calibrate_threshold(const SensingModel& model, const OperatingPoint& op, double p_fa,
                              std::uint64_t trials, std::uint64_t seed, Execution exec = Execution::Parallel);

// Fraction of fresh H1 trials with T >= threshold.
double detection_probability(const SensingModel& model, const OperatingPoint& op, const Threshold& threshold,
                             std::uint64_t trials, std::uint64_t seed, Execution exec = Execution::Parallel);

// Fraction of fresh H0 trials with T >= threshold.
double false_alarm_rate(const SensingModel& model, const OperatingPoint& op, const Threshold& threshold,
                        std::uint64_t trials, std::uint64_t seed, Execution exec = Execution::Parallel);

// Calibration, fresh false-alarm check and detection estimate, each on an
// independent sub-stream of seed.
DetectionResult evaluate_detection(const SensingModel& model, const OperatingPoint& op, double p_fa,
                                   std::uint64_t calibration_trials, std::uint64_t trials, std::uint64_t seed,
                                   Execution exec = Execution::Parallel);

// Sampler configured for the normalized statistic T / (M rho0).
StatisticSampler make_sampler(const SensingModel& model, const OperatingPoint& op);

} // namespace cfisac
