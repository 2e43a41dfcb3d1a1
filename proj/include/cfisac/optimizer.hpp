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

#include <algorithm>
#include <string>
#include <vector>

#include "cfisac/convex.hpp"
#include "cfisac/detector.hpp"
#include "cfisac/precoding.hpp"
#include "cfisac/scene.hpp"
#include "cfisac/types.hpp"

namespace cfisac {

// omega_0 weighs the detection statistic, omega_1 the blocklength.
struct Weights {
  double precision = 1.0;
  double timeliness = 0.0;
};

// Per-point problem data. All channel-dependent coefficients are cached so
// that a solve never touches the precoders again.
//
// The precision term is measured in units of the noise power:
// (E{T|H1} - E{T|H0}) / sigma^2 = sum_i x_i^2 / (x_i + 1) with
// x_i = M d_i rho_bar_0 / sigma^2, which keeps it commensurate with tau.
struct OptimizationProblem {
  Weights weights;
  double sinr_threshold = 10.0; // linear
  double rho_max = 1.0;
  double tau_min = 1.0;
  double tau_max = 1.0;
  RMat ue_gains;    // K x (K+1); (k-1, j) = |h_k^H w_j|^2
  RMat ap_norms;    // L x (K+1); (l, k) = ||w_{k,l}||^2
  RVec eigenvalues; // active Gram eigenvalues, descending
  int antennas_per_ap = 1;
  double noise_power = 1.0;

  std::size_t K() const { return static_cast<std::size_t>(ue_gains.rows()); }
  std::size_t L() const { return static_cast<std::size_t>(ap_norms.rows()); }
  std::size_t terms() const { return static_cast<std::size_t>(eigenvalues.size()); }
  bool tau_fixed() const { return tau_max - tau_min <= 1e-12 * std::max(1.0, tau_max); }

  // Noise-normalized x_i per unit rho_bar_0.
  RVec x_coefficients() const;

  // omega_0 * gap / sigma^2 - omega_1 * tau at per-symbol power rho0.
  double objective(double rho0, double tau) const;
  // gap / sigma^2 at per-symbol power rho0.
  double precision_term(double rho0, double tau) const;

  double sinr(const RVec& rho, std::size_t k) const;  // UE k, 1-based
  double ap_power(const RVec& rho, std::size_t l) const;
};

// Terms whose eigenvalue is below this fraction of the largest are dropped.
inline constexpr double kEigenCutoff = 1e-12;

OptimizationProblem build_problem(const ChannelSet& channels, const PrecoderSet& precoders, const SensingModel& model,
                                  Weights weights, double sinr_threshold, double rho_max, double tau_min,
                                  double tau_max);

// One CCP iterate. x and y are noise-normalized; x_lin / y_lin is the point
// the concave part was linearized at to produce this iterate.
struct SubproblemState {
  RVec rho_bar; // K+1, watt-symbols
  double tau = 1.0;
  RVec x;
  RVec y;
  RVec slack;
  RVec x_lin;
  RVec y_lin;
  int iteration = 0;
  double penalty = 1.0;
  double surrogate = 0.0; // omega_0 sum y - omega_1 tau
  int newton_steps = 0;

  double max_slack() const { return slack.size() ? slack.maxCoeff() : 0.0; }
};

struct CcpOptions {
  double fpp_penalty = 1e3; // multiplied by omega_0 + omega_1
  double slack_tol = 1e-8;
};

// Builds the convex subproblem linearized at (state.x, state.y) and solves
// it from state. Throws NumericalError if the inner solver fails.
SubproblemState ccp_iteration(const OptimizationProblem& problem, const SubproblemState& state,
                              const ConvexSolver& solver);

// The convex subproblem itself, exposed for inspection and tests. Variable
// order: [tau (omitted when fixed), rho_bar_0..K, y_1..n, s_1..n].
ConvexProgram ccp_subproblem(const OptimizationProblem& problem, const RVec& x_lin, const RVec& y_lin,
                             double penalty);

enum class InitStrategy { TauMax, TauMin, MultiStart };

InitStrategy parse_init_strategy(const std::string& name);

struct PointSolution {
  int tau = 0;                 // rounded up
  double tau_continuous = 0.0; // as solved
  RVec rho;                    // per-symbol powers, W
  double objective = 0.0;      // at (rho, tau)
  double surrogate = 0.0;      // converged surrogate at tau_continuous
  int ccp_iterations = 0;
  bool converged = false;
  bool feasible = false;
  double max_violation = 0.0; // relative constraint violation (<= 0 when satisfied)
  double max_slack = 0.0;
  int newton_steps = 0;
  std::vector<double> surrogate_trace; // initial point first
  SubproblemState final_state;
  std::string start;
};

// Relative violation of the original constraints at (rho, tau):
// max over (gamma_c - SINR_k)/gamma_c, (P_l - rho_max)/rho_max and the
// blocklength bounds.
double constraint_violation(const OptimizationProblem& problem, const RVec& rho, double tau);

// Equal split across all K+1 streams scaled to the per-AP budget.
SubproblemState initial_state(const OptimizationProblem& problem, double tau);

PointSolution solve_point(const OptimizationProblem& problem, InitStrategy init, double tol, int max_iters,
                          const CcpOptions& options = {}, const ConvexSolver* solver = nullptr);

} // namespace cfisac
