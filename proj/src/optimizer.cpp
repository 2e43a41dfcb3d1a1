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

#include "cfisac/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cfisac {

RVec OptimizationProblem::x_coefficients() const {
  return eigenvalues * (static_cast<double>(antennas_per_ap) / noise_power);
}

double OptimizationProblem::precision_term(double rho0, double tau) const {
  const RVec x = x_coefficients() * (rho0 * tau);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) sum += x[i] * x[i] / (x[i] + 1.0);
  return sum;
}

double OptimizationProblem::objective(double rho0, double tau) const {
  return weights.precision * precision_term(rho0, tau) - weights.timeliness * tau;
}

double OptimizationProblem::sinr(const RVec& rho, std::size_t k) const {
  const auto row = static_cast<Eigen::Index>(k - 1);
  double interference = noise_power;
  for (Eigen::Index j = 0; j < ue_gains.cols(); ++j)
    if (j != static_cast<Eigen::Index>(k)) interference += rho[j] * ue_gains(row, j);
  return rho[static_cast<Eigen::Index>(k)] * ue_gains(row, static_cast<Eigen::Index>(k)) / interference;
}

double OptimizationProblem::ap_power(const RVec& rho, std::size_t l) const {
  return ap_norms.row(static_cast<Eigen::Index>(l)).dot(rho);
}

OptimizationProblem build_problem(const ChannelSet& channels, const PrecoderSet& precoders, const SensingModel& model,
                                  Weights weights, double sinr_threshold, double rho_max, double tau_min,
                                  double tau_max) {
  if (weights.precision < 0 || weights.timeliness < 0 || weights.precision + weights.timeliness <= 0)
    throw std::invalid_argument("build_problem: weights must be non-negative with a positive sum");
  if (!(sinr_threshold > 0)) throw std::invalid_argument("build_problem: SINR threshold must be positive");
  if (!(rho_max > 0)) throw std::invalid_argument("build_problem: rho_max must be positive");
  if (!(tau_min > 0) || tau_max < tau_min) throw std::invalid_argument("build_problem: need 0 < tau_min <= tau_max");

  OptimizationProblem p;
  p.weights = weights;
  p.sinr_threshold = sinr_threshold;
  p.rho_max = rho_max;
  p.tau_min = tau_min;
  p.tau_max = tau_max;
  p.antennas_per_ap = precoders.antennas_per_ap;
  p.noise_power = channels.noise_power;

  const auto K = static_cast<Eigen::Index>(precoders.K());
  const auto L = static_cast<Eigen::Index>(precoders.L());
  p.ue_gains.resize(K, K + 1);
  for (Eigen::Index k = 1; k <= K; ++k) {
    const CVec& h = channels.ue_channels[k - 1];
    for (Eigen::Index j = 0; j <= K; ++j) p.ue_gains(k - 1, j) = std::norm(h.dot(precoders.w[j]));
    if (p.ue_gains(k - 1, k) == 0.0)
      throw InfeasibleError("build_problem: UE " + std::to_string(k) + " has zero desired-signal gain");
  }
  p.ap_norms.resize(L, K + 1);
  for (Eigen::Index l = 0; l < L; ++l)
    for (Eigen::Index k = 0; k <= K; ++k) p.ap_norms(l, k) = precoders.slice_norm2(k, l);

  std::vector<double> active;
  const double d1 = model.gram_eigs.size() ? model.gram_eigs[0] : 0.0;
  for (Eigen::Index i = 0; i < model.gram_eigs.size(); ++i)
    if (d1 > 0 && model.gram_eigs[i] > kEigenCutoff * d1) active.push_back(model.gram_eigs[i]);
  p.eigenvalues = Eigen::Map<const RVec>(active.data(), static_cast<Eigen::Index>(active.size()));
  return p;
}

namespace {

struct Layout {
  bool tau_fixed;
  Eigen::Index streams; // K+1
  Eigen::Index terms;

  Eigen::Index tau() const { return 0; }
  Eigen::Index rho(Eigen::Index k) const { return (tau_fixed ? 0 : 1) + k; }
  Eigen::Index y(Eigen::Index i) const { return rho(streams) + i; }
  Eigen::Index s(Eigen::Index i) const { return y(terms) + i; }
  Eigen::Index linear_dim() const { return rho(streams); }
  Eigen::Index dim() const { return s(terms); }
};

Layout layout_of(const OptimizationProblem& p) {
  return {p.tau_fixed(), static_cast<Eigen::Index>(p.K() + 1), static_cast<Eigen::Index>(p.terms())};
}

// SINR, per-AP power, blocklength and non-negativity rows over the first
// `cols` columns. Each row is scaled so that its tau coefficient is +-1.
void linear_rows(const OptimizationProblem& p, const Layout& lay, Eigen::Index cols, RMat& A, RVec& b) {
  const auto K = static_cast<Eigen::Index>(p.K());
  const auto L = static_cast<Eigen::Index>(p.L());
  std::vector<RVec> rows;
  std::vector<double> rhs;
  auto push = [&](RVec row, double tau_coef, double bound) {
    if (lay.tau_fixed)
      bound -= tau_coef * p.tau_min;
    else
      row[lay.tau()] = tau_coef;
    rows.push_back(std::move(row));
    rhs.push_back(bound);
  };

  const double inv_noise = 1.0 / p.noise_power;
  for (Eigen::Index k = 1; k <= K; ++k) {
    RVec row = RVec::Zero(cols);
    for (Eigen::Index j = 0; j <= K; ++j) {
      if (j != k) row[lay.rho(j)] = p.ue_gains(k - 1, j) * inv_noise;
    }
    row[lay.rho(k)] = -p.ue_gains(k - 1, k) * inv_noise / p.sinr_threshold;
    push(std::move(row), 1.0, 0.0);
  }
  for (Eigen::Index l = 0; l < L; ++l) {
    RVec row = RVec::Zero(cols);
    for (Eigen::Index k = 0; k <= K; ++k) row[lay.rho(k)] = p.ap_norms(l, k) / p.rho_max;
    push(std::move(row), -1.0, 0.0);
  }
  if (!lay.tau_fixed) {
    push(RVec::Zero(cols), -1.0, -p.tau_min);
    push(RVec::Zero(cols), 1.0, p.tau_max);
  }
  for (Eigen::Index k = 0; k <= K; ++k) {
    RVec row = RVec::Zero(cols);
    row[lay.rho(k)] = -1.0;
    push(std::move(row), 0.0, 0.0);
  }

  A.resize(static_cast<Eigen::Index>(rows.size()), cols);
  b.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    A.row(static_cast<Eigen::Index>(i)) = rows[i];
    b[static_cast<Eigen::Index>(i)] = rhs[i];
  }
}

RVec pack_linear(const Layout& lay, const SubproblemState& st) {
  RVec z(lay.linear_dim());
  if (!lay.tau_fixed) z[lay.tau()] = st.tau;
  for (Eigen::Index k = 0; k < lay.streams; ++k) z[lay.rho(k)] = st.rho_bar[k];
  return z;
}

void set_epigraph_tight(const OptimizationProblem& p, SubproblemState& st) {
  st.x = p.x_coefficients() * st.rho_bar[0];
  st.y = st.x.array().square() / (st.x.array() + 1.0);
  st.slack = RVec::Zero(st.x.size());
  st.surrogate = p.weights.precision * st.y.sum() - p.weights.timeliness * st.tau;
}

} // namespace

ConvexProgram ccp_subproblem(const OptimizationProblem& p, const RVec& x_lin, const RVec& y_lin, double penalty) {
  const Layout lay = layout_of(p);
  const Eigen::Index n = lay.dim();
  ConvexProgram prog;
  prog.objective = RVec::Zero(n);
  if (!lay.tau_fixed) prog.objective[lay.tau()] = p.weights.timeliness;
  for (Eigen::Index i = 0; i < lay.terms; ++i) {
    prog.objective[lay.y(i)] = -p.weights.precision;
    prog.objective[lay.s(i)] = penalty;
  }

  RMat A_lin;
  RVec b_lin;
  linear_rows(p, lay, n, A_lin, b_lin);
  prog.A.resize(A_lin.rows() + lay.terms, n);
  prog.b.resize(b_lin.size() + lay.terms);
  prog.A.topRows(A_lin.rows()) = A_lin;
  prog.b.head(b_lin.size()) = b_lin;
  prog.A.bottomRows(lay.terms).setZero();
  prog.b.tail(lay.terms).setZero();
  for (Eigen::Index i = 0; i < lay.terms; ++i) prog.A(A_lin.rows() + i, lay.s(i)) = -1.0;

  // (x + y)^2 + 2y - 6 x0 x - 2 y0 y + 3 x0^2 + y0^2 - s <= 0, with
  // x = c * rho_bar_0 (noise-normalized units).
  const RVec c = p.x_coefficients();
  for (Eigen::Index i = 0; i < lay.terms; ++i) {
    QuadraticConstraint q;
    q.factor = RMat::Zero(n, 1);
    q.factor(lay.rho(0), 0) = c[i];
    q.factor(lay.y(i), 0) = 1.0;
    q.linear = RVec::Zero(n);
    q.linear[lay.rho(0)] = -6.0 * x_lin[i] * c[i];
    q.linear[lay.y(i)] = 2.0 - 2.0 * y_lin[i];
    q.linear[lay.s(i)] = -1.0;
    q.constant = 3.0 * x_lin[i] * x_lin[i] + y_lin[i] * y_lin[i];
    prog.quadratic.push_back(std::move(q));
  }
  return prog;
}

SubproblemState ccp_iteration(const OptimizationProblem& p, const SubproblemState& state, const ConvexSolver& solver) {
  const Layout lay = layout_of(p);
  const ConvexProgram prog = ccp_subproblem(p, state.x, state.y, state.penalty);

  RVec z = RVec::Zero(lay.dim());
  z.head(lay.linear_dim()) = pack_linear(lay, state);
  for (Eigen::Index i = 0; i < lay.terms; ++i) z[lay.y(i)] = state.y[i];
  for (Eigen::Index i = 0; i < lay.terms; ++i) z[lay.s(i)] = std::max(0.0, prog.quadratic[i].value(z)) + 1.0;
  if (prog.A.rows() > 0 && !((prog.A * z - prog.b).maxCoeff() < 0.0))
    throw std::invalid_argument("ccp_iteration: state is not strictly feasible for the linear constraints");

  const SolveResult res = solver.minimize(prog, z);
  if (res.status != SolveStatus::Optimal) {
    std::ostringstream os;
    os << "ccp_iteration: convex subproblem did not converge (status "
       << (res.status == SolveStatus::IterationLimit ? "iteration-limit" : "numerical-failure")
       << ", newton steps " << res.newton_steps << ", gap " << res.gap << ")";
    throw NumericalError(os.str());
  }

  SubproblemState next;
  next.tau = lay.tau_fixed ? p.tau_min : res.z[lay.tau()];
  next.rho_bar.resize(lay.streams);
  for (Eigen::Index k = 0; k < lay.streams; ++k) next.rho_bar[k] = res.z[lay.rho(k)];
  next.x = p.x_coefficients() * next.rho_bar[0];
  next.y.resize(lay.terms);
  next.slack.resize(lay.terms);
  for (Eigen::Index i = 0; i < lay.terms; ++i) {
    next.y[i] = res.z[lay.y(i)];
    next.slack[i] = res.z[lay.s(i)];
  }
  next.x_lin = state.x;
  next.y_lin = state.y;
  next.iteration = state.iteration + 1;
  next.penalty = state.penalty;
  next.surrogate = p.weights.precision * next.y.sum() - p.weights.timeliness * next.tau;
  next.newton_steps = res.newton_steps;
  return next;
}

InitStrategy parse_init_strategy(const std::string& name) {
  if (name == "tau_max") return InitStrategy::TauMax;
  if (name == "tau_min") return InitStrategy::TauMin;
  if (name == "multi_start") return InitStrategy::MultiStart;
  throw std::invalid_argument("unknown init strategy: " + name);
}

double constraint_violation(const OptimizationProblem& p, const RVec& rho, double tau) {
  double worst = std::max((p.tau_min - tau) / p.tau_min, (tau - p.tau_max) / p.tau_max);
  for (std::size_t k = 1; k <= p.K(); ++k)
    worst = std::max(worst, (p.sinr_threshold - p.sinr(rho, k)) / p.sinr_threshold);
  for (std::size_t l = 0; l < p.L(); ++l) worst = std::max(worst, (p.ap_power(rho, l) - p.rho_max) / p.rho_max);
  for (Eigen::Index k = 0; k < rho.size(); ++k) worst = std::max(worst, -rho[k] / p.rho_max);
  return worst;
}

SubproblemState initial_state(const OptimizationProblem& p, double tau) {
  SubproblemState st;
  if (p.tau_fixed()) {
    st.tau = p.tau_min;
  } else {
    const double margin = 1e-3 * (p.tau_max - p.tau_min);
    st.tau = std::clamp(tau, p.tau_min + margin, p.tau_max - margin);
  }
  double worst_ap = 0.0;
  for (Eigen::Index l = 0; l < p.ap_norms.rows(); ++l) worst_ap = std::max(worst_ap, p.ap_norms.row(l).sum());
  const double per_stream = worst_ap > 0 ? 0.99 * p.rho_max / worst_ap : p.rho_max;
  st.rho_bar = RVec::Constant(static_cast<Eigen::Index>(p.K() + 1), per_stream * st.tau);
  set_epigraph_tight(p, st);
  return st;
}

namespace {

PointSolution run_ccp(const OptimizationProblem& p, double tau_start, const char* name, double tol, int max_iters,
                      const CcpOptions& opt, const ConvexSolver& solver) {
  const Layout lay = layout_of(p);
  PointSolution sol;
  sol.start = name;

  SubproblemState state = initial_state(p, tau_start);

  // Feasible start for the linear part (phase I when the equal split
  // violates an SINR constraint).
  ConvexProgram lin;
  lin.objective = RVec::Zero(lay.linear_dim());
  linear_rows(p, lay, lay.linear_dim(), lin.A, lin.b);
  const RVec z0 = pack_linear(lay, state);
  if (!(lin.max_violation(z0) < 0.0)) {
    const auto phase1 = solver.find_interior_point(lin, z0);
    if (!phase1.feasible) {
      sol.feasible = false;
      sol.tau = static_cast<int>(std::ceil(p.tau_min));
      sol.tau_continuous = p.tau_min;
      sol.rho = RVec::Zero(lay.streams);
      sol.max_violation = std::max(phase1.max_violation, 0.0);
      sol.objective = p.objective(0.0, sol.tau);
      return sol;
    }
    if (!lay.tau_fixed) state.tau = phase1.z[lay.tau()];
    for (Eigen::Index k = 0; k < lay.streams; ++k) state.rho_bar[k] = phase1.z[lay.rho(k)];
    set_epigraph_tight(p, state);
  }

  const double weight_sum = p.weights.precision + p.weights.timeliness;
  state.penalty = opt.fpp_penalty * weight_sum;
  sol.surrogate_trace.push_back(state.surrogate);

  for (int it = 1; it <= max_iters; ++it) {
    SubproblemState next = ccp_iteration(p, state, solver);
    sol.newton_steps += next.newton_steps;
    sol.surrogate_trace.push_back(next.surrogate);
    const double change = std::abs(next.surrogate - state.surrogate) / std::max(1.0, std::abs(state.surrogate));
    const bool slack_ok = next.max_slack() <= opt.slack_tol;
    if (!slack_ok) next.penalty *= 2.0;
    state = std::move(next);
    sol.ccp_iterations = it;
    if (slack_ok && change < tol) {
      sol.converged = true;
      break;
    }
  }

  sol.final_state = state;
  sol.surrogate = state.surrogate;
  sol.max_slack = state.max_slack();
  sol.tau_continuous = state.tau;
  sol.rho = state.rho_bar / state.tau;
  // Constraints are homogeneous in (rho_bar, tau): keeping the per-symbol
  // powers while rounding tau up preserves SINR and per-AP feasibility.
  double tau = std::ceil(state.tau - 1e-6);
  tau = std::clamp(tau, p.tau_min, p.tau_max);
  sol.tau = static_cast<int>(std::lround(tau));
  sol.objective = p.objective(sol.rho[0], tau);
  sol.max_violation = constraint_violation(p, sol.rho, tau);
  sol.feasible = sol.max_violation <= 1e-6;
  return sol;
}

bool better(const PointSolution& a, const PointSolution& b) {
  if (a.feasible != b.feasible) return a.feasible;
  return a.objective > b.objective;
}

} // namespace

PointSolution solve_point(const OptimizationProblem& p, InitStrategy init, double tol, int max_iters,
                          const CcpOptions& options, const ConvexSolver* solver) {
  if (!(tol > 0) || max_iters < 1) throw std::invalid_argument("solve_point: need tol > 0 and max_iters >= 1");
  static const BarrierSolver default_solver;
  const ConvexSolver& s = solver ? *solver : default_solver;
  switch (init) {
    case InitStrategy::TauMax:
      return run_ccp(p, p.tau_max, "tau_max", tol, max_iters, options, s);
    case InitStrategy::TauMin:
      return run_ccp(p, p.tau_min, "tau_min", tol, max_iters, options, s);
    case InitStrategy::MultiStart: {
      PointSolution a = run_ccp(p, p.tau_max, "tau_max", tol, max_iters, options, s);
      if (p.tau_fixed()) return a;
      PointSolution b = run_ccp(p, p.tau_min, "tau_min", tol, max_iters, options, s);
      const int steps = a.newton_steps + b.newton_steps;
      PointSolution& best = better(b, a) ? b : a;
      best.newton_steps = steps;
      return std::move(best);
    }
  }
  throw std::logic_error("solve_point: unreachable");
}

} // namespace cfisac
