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

#include "kbilqr/optctrl.h"

#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace kbilqr {

std::vector<std::string> OcProblem::Validate() const {
  if (!dynamics) Fail(ErrorKind::kInvalidInput, "problem has no dynamics");
  if (horizon < 3) {
    Fail(ErrorKind::kInvalidInput,
         "horizon must be at least 3, got " + std::to_string(horizon));
  }
  CheckDims(x0.size() == dynamics->StateDim(),
            "x0 has " + std::to_string(x0.size()) + " entries, state has " +
                std::to_string(dynamics->StateDim()));
  if (!x0.allFinite()) Fail(ErrorKind::kInvalidInput, "x0 is not finite");
  cost.Validate(dynamics->StateDim(), dynamics->ControlDim());
  std::vector<std::string> warnings;
  if (auto w = CheckSamplingTime(dt)) warnings.push_back(*w);
  return warnings;
}

MatrixXd Rollout(const Dynamics& dynamics, const Eigen::Ref<const VectorXd>& x0,
                 const Eigen::Ref<const MatrixXd>& controls) {
  CheckDims(x0.size() == dynamics.StateDim() &&
                controls.rows() == dynamics.ControlDim(),
            "rollout: x0 or controls do not match the dynamics");
  if (!x0.allFinite() || !controls.allFinite()) {
    Fail(ErrorKind::kInvalidInput, "rollout: non-finite input");
  }
  MatrixXd states(x0.size(), controls.cols() + 1);
  states.col(0) = x0;
  for (int k = 0; k < controls.cols(); k++) {
    states.col(k + 1) = dynamics.Step(states.col(k), controls.col(k));
    if (!states.col(k + 1).allFinite()) {
      Fail(ErrorKind::kDivergence,
           "rollout diverged at step " + std::to_string(k + 1));
    }
  }
  return states;
}

double Objective(const OcProblem& problem,
                 const Eigen::Ref<const MatrixXd>& controls) {
  const MatrixXd states = Rollout(*problem.dynamics, problem.x0, controls);
  double total = 0.0;
  for (int k = 0; k < controls.cols(); k++) {
    total += problem.cost.Stage(states.col(k), controls.col(k));
  }
  return 0.5 * total;
}

namespace {

struct Linearization {
  MatrixXd states;
  std::vector<MatrixXd> fx;
  std::vector<MatrixXd> fu;
};

Linearization Linearize(const OcProblem& problem,
                        const Eigen::Ref<const MatrixXd>& controls) {
  const int horizon = static_cast<int>(controls.cols());
  Linearization lin;
  lin.states.resize(problem.x0.size(), horizon + 1);
  lin.states.col(0) = problem.x0;
  lin.fx.resize(horizon);
  lin.fu.resize(horizon);
  for (int k = 0; k < horizon; k++) {
    lin.states.col(k + 1) = problem.dynamics->Step(
        lin.states.col(k), controls.col(k), &lin.fx[k], &lin.fu[k]);
    if (!lin.states.col(k + 1).allFinite()) {
      Fail(ErrorKind::kDivergence,
           "rollout diverged at step " + std::to_string(k + 1));
    }
  }
  return lin;
}

ObjectiveGradient Adjoint(const OcProblem& problem,
                          const Eigen::Ref<const MatrixXd>& controls,
                          Linearization* lin_out) {
  Linearization lin = Linearize(problem, controls);
  const int horizon = static_cast<int>(controls.cols());
  ObjectiveGradient out;
  out.gradient.resize(controls.rows(), horizon);
  double total = 0.0;
  VectorXd lambda = VectorXd::Zero(problem.x0.size());
  VectorXd lx, lu;
  for (int k = horizon - 1; k >= 0; k--) {
    const auto x = lin.states.col(k);
    const auto u = controls.col(k);
    total += problem.cost.Stage(x, u);
    problem.cost.HalfStageGradients(x, u, &lx, &lu);
    out.gradient.col(k) = lu + lin.fu[k].transpose() * lambda;
    lambda = lx + lin.fx[k].transpose() * lambda;
  }
  out.objective = 0.5 * total;
  out.states = lin.states;
  if (lin_out) *lin_out = std::move(lin);
  return out;
}

// Gauss-Newton matrix sum_k S_k' Jt_k' Q+ Jt_k S_k + blockdiag(R), with
// S_k = dx_k / du the shooting sensitivities and Q+ the PSD part of Q
MatrixXd GaussNewtonMatrix(const OcProblem& problem, const Linearization& lin,
                           const Eigen::Ref<const MatrixXd>& controls) {
  const int n = static_cast<int>(problem.x0.size());
  const int m = static_cast<int>(controls.rows());
  const int horizon = static_cast<int>(controls.cols());
  const int dim = m * horizon;

  const MatrixXd q_sym = 0.5 * (problem.cost.q + problem.cost.q.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(q_sym);
  const MatrixXd q_plus = eig.eigenvectors() *
                          eig.eigenvalues().cwiseMax(0.0).asDiagonal() *
                          eig.eigenvectors().transpose();
  const MatrixXd r_sym = 0.5 * (problem.cost.r + problem.cost.r.transpose());

  MatrixXd h = MatrixXd::Zero(dim, dim);
  for (int k = 0; k < horizon; k++) h.block(k * m, k * m, m, m) = r_sym;
  MatrixXd sens = MatrixXd::Zero(n, dim);
  for (int k = 1; k < horizon; k++) {
    sens = (lin.fx[k - 1] * sens).eval();
    sens.middleCols((k - 1) * m, m) += lin.fu[k - 1];
    const MatrixXd jt = LiftJacobian(problem.cost.dict, lin.states.col(k));
    const MatrixXd w = jt.transpose() * q_plus * jt;
    const int active = k * m;
    h.topLeftCorner(active, active) +=
        sens.leftCols(active).transpose() * w * sens.leftCols(active);
  }
  return h;
}

}  // namespace

ObjectiveGradient ObjectiveAndGradient(
    const OcProblem& problem, const Eigen::Ref<const MatrixXd>& controls) {
  CheckDims(controls.rows() == problem.dynamics->ControlDim(),
            "controls must be m x T");
  return Adjoint(problem, controls, nullptr);
}

OcSolution Solve(const OcProblem& problem, const MatrixXd& init_controls,
                 const SolverOptions& options) {
  problem.Validate();
  const int m = problem.dynamics->ControlDim();
  MatrixXd u = init_controls.size() == 0
                   ? MatrixXd::Zero(m, problem.horizon)
                   : init_controls;
  CheckDims(u.rows() == m && u.cols() == problem.horizon,
            "initial controls must be m x T");

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  Linearization lin;
  ObjectiveGradient cur = Adjoint(problem, u, &lin);
  OcSolution sol;
  sol.objective_history.push_back(cur.objective);

  int iter = 0;
  for (; iter < options.max_iter; iter++) {
    const double grad_norm = cur.gradient.norm();
    if (grad_norm <= options.grad_tol) break;

    MatrixXd dir = -cur.gradient;
    if (options.gauss_newton) {
      const MatrixXd h = GaussNewtonMatrix(problem, lin, u);
      Eigen::LDLT<MatrixXd> ldlt(h);
      const VectorXd g = Eigen::Map<const VectorXd>(cur.gradient.data(),
                                                    cur.gradient.size());
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        const VectorXd step = -ldlt.solve(g);
        if (step.allFinite() && step.dot(g) < 0.0) {
          dir = Eigen::Map<const MatrixXd>(step.data(), m, problem.horizon);
        }
      }
    }
    const double slope = (cur.gradient.array() * dir.array()).sum();

    // near the optimum the predicted decrease drops below the rounding
    // error of J; there a step is taken when the directional derivative at
    // the trial point satisfies phi'(t) <= (1 - 2c) |phi'(0)|, which for a
    // quadratic line model is equivalent to the Armijo condition
    const double noise = 128.0 * kEps * (1.0 + std::abs(cur.objective));
    double step = options.initial_step;
    bool accepted = false;
    MatrixXd trial;
    Linearization trial_lin;
    ObjectiveGradient trial_og;
    bool have_gradient = false;
    for (int bt = 0; bt < options.max_backtracks; bt++, step *= options.shrink) {
      trial = u + step * dir;
      double value;
      try {
        value = Objective(problem, trial);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kDivergence) throw;
        continue;
      }
      if (value <= cur.objective + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      if (-step * slope <= noise && value <= cur.objective + noise) {
        trial_og = Adjoint(problem, trial, &trial_lin);
        const double end_slope =
            (trial_og.gradient.array() * dir.array()).sum();
        if (end_slope <= (1.0 - 2.0 * options.armijo) * std::abs(slope)) {
          accepted = have_gradient = true;
          break;
        }
      }
    }
    if (!accepted) {
      Fail(ErrorKind::kStalled,
           "line search failed at iteration " + std::to_string(iter) +
               " (gradient norm " + std::to_string(grad_norm) + ")");
    }
    u = std::move(trial);
    if (have_gradient) {
      cur = std::move(trial_og);
      lin = std::move(trial_lin);
    } else {
      cur = Adjoint(problem, u, &lin);
    }
    sol.objective_history.push_back(cur.objective);
  }

  sol.controls = u;
  sol.states = cur.states;
  sol.objective = cur.objective;
  sol.grad_norm = cur.gradient.norm();
  sol.iterations = iter;
  sol.converged = sol.grad_norm <= options.grad_tol;
  return sol;
}

namespace {

OcSolution PredictWith(std::shared_ptr<const Dynamics> dynamics,
                       const Dictionary& dict, double dt,
                       const CostEstimate& cost,
                       const Eigen::Ref<const VectorXd>& x0, int horizon,
                       const SolverOptions& options) {
  const int m = dynamics->ControlDim();
  OcProblem problem;
  problem.dynamics = std::move(dynamics);
  problem.cost.dict = dict;
  problem.cost.q = cost.q;
  problem.cost.r = cost.r.size() == 0 ? MatrixXd::Identity(m, m) : cost.r;
  problem.x0 = x0;
  problem.horizon = horizon;
  problem.dt = dt;
  return Solve(problem, {}, options);
}

}  // namespace

OcSolution Predict(const BilinearModel& model, const CostEstimate& cost,
                   const Eigen::Ref<const VectorXd>& x0, int horizon,
                   const SolverOptions& options) {
  return PredictWith(std::make_shared<DecodedBilinearDynamics>(model),
                     model.dict, model.dt, cost, x0, horizon, options);
}

OcSolution Predict(const LinearModel& model, const CostEstimate& cost,
                   const Eigen::Ref<const VectorXd>& x0, int horizon,
                   const SolverOptions& options) {
  return PredictWith(std::make_shared<DecodedLinearDynamics>(model),
                     model.dict, model.dt, cost, x0, horizon, options);
}

StateBox UniformBox(int dim, double lo, double hi) {
  return {VectorXd::Constant(dim, lo), VectorXd::Constant(dim, hi)};
}

TrajectoryBatch GenerateBatch(const AnalyticSystem& system,
                              const std::vector<double>& weights, int count,
                              int horizon, const StateBox& box,
                              std::uint64_t seed,
                              const SolverOptions& options) {
  if (count < 1) Fail(ErrorKind::kInvalidInput, "need at least one trajectory");
  CheckDims(box.lo.size() == system.n && box.hi.size() == system.n,
            "initial-state box must have one interval per state");
  if (!((box.hi - box.lo).array() >= 0.0).all()) {
    Fail(ErrorKind::kInvalidInput, "initial-state box has lo > hi");
  }
  OcProblem problem;
  problem.dynamics = std::make_shared<AnalyticSystem>(system);
  problem.cost = system.Cost(weights);
  problem.horizon = horizon;
  problem.dt = system.dt;

  TrajectoryBatch batch;
  batch.dt = system.dt;
  for (int i = 0; i < count; i++) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::string last_error = "did not converge";
    bool done = false;
    for (int attempt = 0; attempt <= kGenerationRetries && !done; attempt++) {
      problem.x0.resize(system.n);
      for (int j = 0; j < system.n; j++) {
        problem.x0[j] = box.lo[j] + (box.hi[j] - box.lo[j]) * unit(rng);
      }
      try {
        OcSolution sol = Solve(problem, {}, options);
        if (sol.converged) {
          batch.trajectories.push_back(sol.ToTrajectory());
          done = true;
        } else {
          last_error = "not converged after " +
                       std::to_string(sol.iterations) +
                       " iterations (gradient norm " +
                       std::to_string(sol.grad_norm) + ")";
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kStalled &&
            e.kind() != ErrorKind::kDivergence) {
          throw;
        }
        last_error = e.what();
      }
    }
    if (!done) {
      Fail(ErrorKind::kGeneration, "trajectory " + std::to_string(i) +
                                       " failed after " +
                                       std::to_string(kGenerationRetries) +
                                       " retries: " + last_error);
    }
  }
  return batch;
}

}  // namespace kbilqr
