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

#include "cfisac/convex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfisac {

double ConvexProgram::max_violation(const RVec& z) const {
  double worst = -std::numeric_limits<double>::infinity();
  if (A.rows() > 0) worst = (A * z - b).maxCoeff();
  for (const auto& q : quadratic) worst = std::max(worst, q.value(z));
  return worst;
}

namespace {

// Barrier-augmented objective t c^T z - sum log(-f_i(z)); +inf outside.
double barrier_value(const ConvexProgram& p, const RVec& z, double t) {
  double val = t * p.objective.dot(z);
  if (p.A.rows() > 0) {
    const RVec f = p.A * z - p.b;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      if (!(f[i] < 0.0)) return std::numeric_limits<double>::infinity();
      val -= std::log(-f[i]);
    }
  }
  for (const auto& q : p.quadratic) {
    const double f = q.value(z);
    if (!(f < 0.0)) return std::numeric_limits<double>::infinity();
    val -= std::log(-f);
  }
  return val;
}

// Solves H dz = -g with Jacobi equilibration and Cholesky, damping the
// diagonal until the factor exists and dz is a descent direction.
bool newton_direction(const RMat& H, const RVec& g, RVec& dz) {
  const RVec d = H.diagonal().cwiseMax(std::numeric_limits<double>::min());
  const RVec scale = d.cwiseSqrt().cwiseInverse();
  const RMat Hs = scale.asDiagonal() * H * scale.asDiagonal();
  const RVec gs = scale.cwiseProduct(g);
  double damping = 0.0;
  for (int attempt = 0; attempt < 12; ++attempt) {
    RMat Hd = Hs;
    Hd.diagonal().array() += damping;
    Eigen::LLT<RMat> llt(Hd);
    if (llt.info() == Eigen::Success) {
      const RVec u = llt.solve(-gs);
      if (u.allFinite() && -gs.dot(u) >= 0.0) {
        dz = scale.cwiseProduct(u);
        return true;
      }
    }
    damping = damping == 0.0 ? 1e-12 : damping * 10;
  }
  return false;
}

} // namespace

SolveResult BarrierSolver::minimize(const ConvexProgram& p, const RVec& start) const {
  const Eigen::Index n = p.dim();
  if (start.size() != n) throw std::invalid_argument("BarrierSolver: start has wrong dimension");
  if (!(p.max_violation(start) < 0.0)) throw std::invalid_argument("BarrierSolver: start is not strictly feasible");

  const double m = static_cast<double>(p.num_constraints());
  SolveResult res;
  res.z = start;
  if (m == 0) {
    if (p.objective.norm() > 0) throw NumericalError("BarrierSolver: unconstrained linear objective is unbounded");
    res.status = SolveStatus::Optimal;
    return res;
  }

  RVec& z = res.z;
  double t = m / std::max(1.0, std::abs(p.objective.dot(z)));
  RMat H(n, n);
  RVec g(n);

  while (true) {
    // Newton centering for the current t.
    bool centered = false;
    for (int centering = 0; centering < options_.max_centering_steps; ++centering) {
      if (res.newton_steps >= options_.max_newton_steps) {
        res.status = SolveStatus::IterationLimit;
        res.objective = p.objective.dot(z);
        res.gap = m / t;
        return res;
      }
      g = t * p.objective;
      H.setZero();
      if (p.A.rows() > 0) {
        const RVec f = p.A * z - p.b;
        const RVec inv = (-f).cwiseInverse();
        g.noalias() += p.A.transpose() * inv;
        const RMat scaled = inv.asDiagonal() * p.A;
        H.noalias() += scaled.transpose() * scaled;
      }
      for (const auto& q : p.quadratic) {
        const RVec Fz = q.factor.transpose() * z;
        const double f = Fz.squaredNorm() + q.linear.dot(z) + q.constant;
        const RVec grad = 2.0 * q.factor * Fz + q.linear;
        const double inv = -1.0 / f;
        g.noalias() += inv * grad;
        H.noalias() += (inv * inv) * grad * grad.transpose();
        H.noalias() += (2.0 * inv) * q.factor * q.factor.transpose();
      }

      RVec dz;
      if (!newton_direction(H, g, dz)) {
        res.status = SolveStatus::NumericalFailure;
        res.objective = p.objective.dot(z);
        res.gap = m / t;
        return res;
      }
      const double decrement = -g.dot(dz);
      const double f0 = barrier_value(p, z, t);
      // Roundoff floor relative to the magnitude of the summed terms.
      const double magnitude = t * p.objective.cwiseAbs().dot(z.cwiseAbs()) + std::abs(f0);
      if (decrement * 0.5 <= options_.newton_tolerance || decrement * 0.5 <= 1e-14 * magnitude) {
        centered = true;
        break;
      }

      double step = 1.0;
      // Backtracking: the infinite value outside the domain doubles as the
      // feasibility check.
      int halvings = 0;
      while (barrier_value(p, z + step * dz, t) > f0 - 0.25 * step * decrement) {
        step *= 0.5;
        if (++halvings > 60) break;
      }
      ++res.newton_steps;
      if (halvings > 60) break; // no progress possible at this precision
      z += step * dz;
      if (!z.allFinite() || z.norm() > 1e30) {
        res.status = SolveStatus::NumericalFailure;
        res.objective = p.objective.dot(z);
        res.gap = m / t;
        return res;
      }
    }
    const double obj = p.objective.dot(z);
    if (!centered) {
      // No gap certificate off the central path.
      res.status = SolveStatus::NumericalFailure;
      res.objective = obj;
      res.gap = m / t;
      return res;
    }
    if (m / t <= options_.tolerance * std::max(1.0, std::abs(obj))) {
      res.status = SolveStatus::Optimal;
      res.objective = obj;
      res.gap = m / t;
      return res;
    }
    t *= options_.growth;
  }
}

PhaseOneResult BarrierSolver::find_interior_point(const ConvexProgram& p, const RVec& z0) const {
  const Eigen::Index n = p.dim();
  PhaseOneResult out;
  const double initial = p.max_violation(z0);
  if (initial < 0.0) {
    out.z = z0;
    out.max_violation = initial;
    out.feasible = true;
    return out;
  }

  // minimize s  s.t.  f_i(z) <= s,  s >= -1, with linear rows normalized so
  // that s measures a distance for every linear constraint.
  ConvexProgram aug;
  aug.objective = RVec::Zero(n + 1);
  aug.objective[n] = 1.0;
  const Eigen::Index rows = p.A.rows();
  aug.A = RMat::Zero(rows + 1, n + 1);
  aug.b = RVec::Zero(rows + 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double norm = std::max(p.A.row(i).norm(), 1e-300);
    aug.A.row(i).head(n) = p.A.row(i) / norm;
    aug.A(i, n) = -1.0;
    aug.b[i] = p.b[i] / norm;
  }
  aug.A(rows, n) = -1.0;
  aug.b[rows] = 1.0;
  for (const auto& q : p.quadratic) {
    QuadraticConstraint qa;
    qa.factor = RMat::Zero(n + 1, q.factor.cols());
    qa.factor.topRows(n) = q.factor;
    qa.linear = RVec::Zero(n + 1);
    qa.linear.head(n) = q.linear;
    qa.linear[n] = -1.0;
    qa.constant = q.constant;
    aug.quadratic.push_back(std::move(qa));
  }

  RVec start(n + 1);
  start.head(n) = z0;
  double worst = -1.0;
  if (rows > 0) worst = std::max(worst, (aug.A.topRows(rows).leftCols(n) * z0 - aug.b.head(rows)).maxCoeff());
  for (const auto& q : p.quadratic) worst = std::max(worst, q.value(z0));
  start[n] = worst + 1.0;

  BarrierOptions opts = options_;
  opts.tolerance = 1e-8;
  const auto res = BarrierSolver(opts).minimize(aug, start);
  out.z = res.z.head(n);
  out.max_violation = p.max_violation(out.z);
  out.feasible = out.max_violation < 0.0;
  return out;
}

} // namespace cfisac
