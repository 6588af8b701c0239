// Copyright 2026 The kbilqr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Finite-horizon optimal control by single shooting. The gradient comes from
// the discrete adjoint pass lambda_k = l_x + F_x' lambda_{k+1}, lambda_T = 0.

#ifndef KBILQR_OPTCTRL_H_
#define KBILQR_OPTCTRL_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kbilqr/bilqr.h"
#include "kbilqr/common.h"
#include "kbilqr/cost.h"
#include "kbilqr/dynamics.h"
#include "kbilqr/systems.h"
#include "kbilqr/trajectory.h"

namespace kbilqr {

struct OcProblem {
  std::shared_ptr<const Dynamics> dynamics;
  QuadraticCost cost;
  VectorXd x0;
  int horizon = 0;
  double dt = 0.01;

  // throws on bad shapes or horizon < 3; returns warnings
  std::vector<std::string> Validate() const;
};

struct SolverOptions {
  int max_iter = 2000;
  double grad_tol = 1e-8;
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  int max_backtracks = 60;
  bool gauss_newton = false;
};

struct OcSolution {
  MatrixXd states;    // n x (T+1)
  MatrixXd controls;  // m x T
  double objective = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;

  Trajectory ToTrajectory() const { return {states, controls}; }
};

// x_{k+1} = F(x_k, u_k); throws kDivergence naming the first non-finite step
MatrixXd Rollout(const Dynamics& dynamics, const Eigen::Ref<const VectorXd>& x0,
                 const Eigen::Ref<const MatrixXd>& controls);

struct ObjectiveGradient {
  double objective = 0.0;
  MatrixXd gradient;  // m x T
  MatrixXd states;
};

ObjectiveGradient ObjectiveAndGradient(const OcProblem& problem,
                                       const Eigen::Ref<const MatrixXd>& controls);

// objective only (one rollout)
double Objective(const OcProblem& problem,
                 const Eigen::Ref<const MatrixXd>& controls);

// empty init_controls means zeros; throws kStalled when the line search
// cannot make progress
OcSolution Solve(const OcProblem& problem, const MatrixXd& init_controls = {},
                 const SolverOptions& options = {});

// forward problem on the decoded model x+ = C (A + sum_i u_i B_i) theta(x)
// with the lifted cost (Q, R) of the estimate
OcSolution Predict(const BilinearModel& model, const CostEstimate& cost,
                   const Eigen::Ref<const VectorXd>& x0, int horizon,
                   const SolverOptions& options = {});

// same for a linear lifted model x+ = C (A theta(x) + B u)
OcSolution Predict(const LinearModel& model, const CostEstimate& cost,
                   const Eigen::Ref<const VectorXd>& x0, int horizon,
                   const SolverOptions& options = {});

// uniform sampling box for initial states
struct StateBox {
  VectorXd lo;
  VectorXd hi;
};

StateBox UniformBox(int dim, double lo, double hi);

// M optimal trajectories of the system under the weighted basis cost, from
// initial states drawn with the stream seeded by (seed, index); draws that
// fail to converge are redrawn up to 5 times, then kGeneration is thrown
TrajectoryBatch GenerateBatch(const AnalyticSystem& system,
                              const std::vector<double>& weights, int count,
                              int horizon, const StateBox& box,
                              std::uint64_t seed,
                              const SolverOptions& options = {});

inline constexpr int kGenerationRetries = 5;

}  // namespace kbilqr

#endif  // KBILQR_OPTCTRL_H_
