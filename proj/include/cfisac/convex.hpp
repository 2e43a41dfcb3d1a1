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

#include <vector>

#include "cfisac/types.hpp"

namespace cfisac {

// ||F^T z||^2 + q^T z + r <= 0. Second-order-cone representable.
struct QuadraticConstraint {
  RMat factor; // n x k
  RVec linear; // n
  double constant = 0.0;

  double value(const RVec& z) const { return (factor.transpose() * z).squaredNorm() + linear.dot(z) + constant; }
};

// minimize objective^T z subject to A z <= b and the quadratic constraints.
struct ConvexProgram {
  RVec objective;
  RMat A;
  RVec b;
  std::vector<QuadraticConstraint> quadratic;

  Eigen::Index dim() const { return objective.size(); }
  Eigen::Index num_constraints() const { return A.rows() + static_cast<Eigen::Index>(quadratic.size()); }

  // max_i f_i(z); negative iff z is strictly feasible.
  double max_violation(const RVec& z) const;
};

enum class SolveStatus { Optimal, IterationLimit, NumericalFailure };

struct SolveResult {
  RVec z;
  double objective = 0.0;
  double gap = 0.0; // m / t at exit
  int newton_steps = 0;
  SolveStatus status = SolveStatus::NumericalFailure;
};

struct PhaseOneResult {
  RVec z;
  double max_violation = 0.0; // certificate: > 0 means no strictly feasible point was found
  bool feasible = false;
};

// Solver contract for the convex subproblems: linear objective, linear
// inequalities and convex quadratic inequalities.
class ConvexSolver {
public:
  virtual ~ConvexSolver() = default;

  // start must be strictly feasible.
  virtual SolveResult minimize(const ConvexProgram& program, const RVec& start) const = 0;

  // Searches for a strictly feasible point starting from any z0.
  virtual PhaseOneResult find_interior_point(const ConvexProgram& program, const RVec& z0) const = 0;
};

struct BarrierOptions {
  double tolerance = 1e-10;     // relative duality-gap target
  double growth = 20.0;         // barrier parameter multiplier per outer step
  double newton_tolerance = 1e-10;
  int max_newton_steps = 2000;
  int max_centering_steps = 60; // per barrier parameter
};

// Log-barrier interior-point method with damped Newton centering.
class BarrierSolver final : public ConvexSolver {
public:
  explicit BarrierSolver(BarrierOptions options = {}) : options_(options) {}

  SolveResult minimize(const ConvexProgram& program, const RVec& start) const override;
  PhaseOneResult find_interior_point(const ConvexProgram& program, const RVec& z0) const override;

  const BarrierOptions& options() const { return options_; }

private:
  BarrierOptions options_;
};

} // namespace cfisac
