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
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "kbilqr/systems.h"
#include "oracles.h"
#include "test_util.h"

namespace kbilqr {
namespace {

OcProblem LinearProblem(const MatrixXd& a, const MatrixXd& b,
                        const MatrixXd& q, const MatrixXd& r,
                        const VectorXd& x0, int horizon) {
  OcProblem p;
  p.dynamics = std::make_shared<LinearDynamics>(a, b);
  p.cost.dict = Dictionary::Identity(static_cast<int>(a.rows()));
  p.cost.q = q;
  p.cost.r = r;
  p.x0 = x0;
  p.horizon = horizon;
  return p;
}

OcProblem Example2Problem(const VectorXd& x0, int horizon) {
  static const AnalyticSystem sys = MakeSystem("example2");
  OcProblem p;
  p.dynamics = std::make_shared<AnalyticSystem>(sys);
  p.cost = sys.DefaultCost();
  p.x0 = x0;
  p.horizon = horizon;
  p.dt = sys.dt;
  return p;
}

TEST(RolloutTest, MatchesManualStepping) {
  const AnalyticSystem sys = MakeSystem("example2");
  std::mt19937_64 rng(1);
  const MatrixXd u = oracle::RandomMatrix(2, 10, rng);
  const VectorXd x0 = Eigen::Vector2d(0.4, -0.3);
  const MatrixXd states = Rollout(sys, x0, u);
  VectorXd x = x0;
  for (int k = 0; k < 10; k++) {
    x = sys.Step(x, u.col(k));
    EXPECT_LT((states.col(k + 1) - x).norm(), 1e-15);
  }
}

TEST(RolloutTest, ReportsDivergence) {
  LinearDynamics dyn(MatrixXd::Constant(1, 1, 1e200), MatrixXd::Ones(1, 1));
  try {
    Rollout(dyn, VectorXd::Ones(1), MatrixXd::Zero(1, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDivergence);
  }
}

TEST(ProblemTest, ValidatesInputs) {
  OcProblem p = Example2Problem(Eigen::Vector2d(0.1, 0.1), 2);
  EXPECT_THROW(p.Validate(), Error);
  p.horizon = 10;
  EXPECT_TRUE(p.Validate().empty());
  p.x0 = VectorXd::Zero(3);
  EXPECT_THROW(p.Validate(), Error);
  p.x0 = Eigen::Vector2d(NAN, 0.0);
  EXPECT_THROW(p.Validate(), Error);
  p = Example2Problem(Eigen::Vector2d(0.1, 0.1), 10);
  p.dt = 0.2;
  EXPECT_EQ(p.Validate().size(), 1u);
}

TEST(GradientTest, AdjointMatchesFiniteDifferencesOnExampleTwo) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; trial++) {
    const OcProblem p =
        Example2Problem(oracle::RandomMatrix(2, 1, rng), 12);
    const MatrixXd u = oracle::RandomMatrix(2, 12, rng);
    const ObjectiveGradient og = ObjectiveAndGradient(p, u);
    const MatrixXd fd = oracle::FiniteDifferenceGradient(
        [&](const MatrixXd& v) { return Objective(p, v); }, u, 1e-6);
    EXPECT_LT((og.gradient - fd).norm(), 1e-6 * (1.0 + fd.norm()));
    EXPECT_NEAR(og.objective, Objective(p, u), 1e-14);
  }
}

TEST(SolveTest, LinearProblemMatchesRiccati) {
  const MatrixXd a{{1.0, 0.1}, {-0.1, 1.0}};
  const MatrixXd b{{0.0}, {0.1}};
  const MatrixXd q{{1.0, 0.2}, {0.2, 2.0}};
  const MatrixXd r = MatrixXd::Constant(1, 1, 0.5);
  const VectorXd x0 = Eigen::Vector2d(1.0, -0.5);
  const OcProblem p = LinearProblem(a, b, q, r, x0, 30);
  const OcSolution sol = Solve(p);
  ASSERT_TRUE(sol.converged);
  const Trajectory ref = oracle::RiccatiRollout(a, b, q, r, x0, 30);
  EXPECT_LT((sol.controls - ref.controls).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((sol.states - ref.states).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SolveTest, GaussNewtonReachesSameOptimumFaster) {
  const OcProblem p = Example2Problem(Eigen::Vector2d(0.8, -0.6), 40);
  const OcSolution plain = Solve(p);
  SolverOptions gn;
  gn.gauss_newton = true;
  const OcSolution fast = Solve(p, {}, gn);
  ASSERT_TRUE(plain.converged);
  ASSERT_TRUE(fast.converged);
  EXPECT_LE(fast.iterations, plain.iterations);
  EXPECT_LT((plain.controls - fast.controls).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SolveTest, ObjectiveHistoryDoesNotIncrease) {
  const OcProblem p = Example2Problem(Eigen::Vector2d(-0.9, 0.7), 50);
  const OcSolution sol = Solve(p);
  ASSERT_TRUE(sol.converged);
  const double eps = std::numeric_limits<double>::epsilon();
  for (size_t k = 1; k < sol.objective_history.size(); k++) {
    const double prev = sol.objective_history[k - 1];
    EXPECT_LE(sol.objective_history[k], prev + 128.0 * eps * (1.0 + prev));
  }
}

TEST(SolveTest, ExampleTwoDrivesStateTowardOrigin) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  for (int trial = 0; trial < 5; trial++) {
    const VectorXd x0 = Eigen::Vector2d(box(rng), box(rng));
    const OcSolution sol = Solve(Example2Problem(x0, 100));
    ASSERT_TRUE(sol.converged);
    EXPECT_LT(sol.states.col(100).norm(), x0.norm());
  }
}

TEST(SolveTest, StoredStatesEqualRollout) {
  const OcProblem p = Example2Problem(Eigen::Vector2d(0.5, 0.5), 30);
  const OcSolution sol = Solve(p);
  EXPECT_LT((Rollout(*p.dynamics, p.x0, sol.controls) - sol.states)
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(SolveTest, ZeroIterationsAtOptimum) {
  const OcProblem p = Example2Problem(Eigen::Vector2d::Zero(), 10);
  const OcSolution sol = Solve(p);
  EXPECT_TRUE(sol.converged);
  EXPECT_EQ(sol.iterations, 0);
}

TEST(SolveTest, NotConvergedIsFlagged) {
  const OcProblem p = Example2Problem(Eigen::Vector2d(0.9, 0.9), 40);
  SolverOptions few;
  few.max_iter = 2;
  const OcSolution sol = Solve(p, {}, few);
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.iterations, 2);
}

TEST(PredictTest, AnalyticModelAndTrueCostReproduceSystemSolve) {
  const AnalyticSystem sys = MakeSystem("example1");
  const QuadraticCost truth = TrueLiftedCost(sys, sys.default_weights);
  CostEstimate est;
  est.q = truth.q;
  est.r = truth.r;
  BilinearModel model = *sys.analytic_bilinear;
  const VectorXd x0 = Eigen::Vector2d(0.7, -0.4);
  const OcSolution pred = Predict(model, est, x0, 30);
  OcProblem p;
  p.dynamics = std::make_shared<AnalyticSystem>(sys);
  p.cost = sys.DefaultCost();
  p.x0 = x0;
  p.horizon = 30;
  const OcSolution ref = Solve(p);
  ASSERT_TRUE(pred.converged && ref.converged);
  EXPECT_LT((pred.states - ref.states).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(GenerateTest, ShapesAndDeterminism) {
  const AnalyticSystem sys = MakeSystem("example2");
  const StateBox box = UniformBox(2, -1.0, 1.0);
  const TrajectoryBatch one =
      GenerateBatch(sys, sys.default_weights, 1, 20, box, 42);
  ASSERT_EQ(one.Size(), 1);
  EXPECT_EQ(one.trajectories[0].states.cols(), 21);
  EXPECT_EQ(one.trajectories[0].controls.cols(), 20);
  const TrajectoryBatch a =
      GenerateBatch(sys, sys.default_weights, 3, 20, box, 42);
  const TrajectoryBatch b =
      GenerateBatch(sys, sys.default_weights, 3, 20, box, 42);
  for (int i = 0; i < 3; i++) {
    EXPECT_EQ(a.trajectories[i].states, b.trajectories[i].states);
    EXPECT_EQ(a.trajectories[i].controls, b.trajectories[i].controls);
    const auto& x0 = a.trajectories[i].states.col(0);
    EXPECT_TRUE((x0.array() >= -1.0).all() && (x0.array() <= 1.0).all());
  }
  // each trajectory draws from its own stream
  EXPECT_EQ(a.trajectories[0].states, one.trajectories[0].states);
  EXPECT_THROW(GenerateBatch(sys, sys.default_weights, 0, 20, box, 1), Error);
}

}  // namespace
}  // namespace kbilqr
