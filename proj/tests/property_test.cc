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

// Randomized invariants across modules.

#include <cmath>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "kbilqr/bilqr.h"
#include "kbilqr/dynamics.h"
#include "kbilqr/edmdc.h"
#include "kbilqr/optctrl.h"
#include "kbilqr/systems.h"
#include "oracles.h"
#include "test_util.h"

namespace kbilqr {
namespace {

MatrixXd RandomPsd(int n, std::mt19937_64& rng) {
  const MatrixXd f = oracle::RandomMatrix(n, n, rng);
  return f * f.transpose() / n;
}

OcProblem RandomBilinearProblem(int lifted, int m, int horizon,
                                std::mt19937_64& rng) {
  BilinearModel model = testing_util::RandomBilinear(lifted, m, rng);
  model.a = 0.95 * model.a;
  OcProblem p;
  p.dynamics = std::make_shared<DecodedBilinearDynamics>(model);
  p.cost.dict = model.dict;
  p.cost.q = RandomPsd(lifted, rng);
  p.cost.r = RandomPsd(m, rng) + MatrixXd::Identity(m, m);
  p.x0 = oracle::RandomMatrix(lifted, 1, rng);
  p.horizon = horizon;
  return p;
}

TEST(PropertyTest, AdjointGradientAgainstFiniteDifferences) {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(2, 6), ctrl(1, 2), len(3, 20);
  for (int trial = 0; trial < 50; trial++) {
    const OcProblem p = RandomBilinearProblem(dim(rng), ctrl(rng), len(rng), rng);
    const MatrixXd u =
        oracle::RandomMatrix(p.dynamics->ControlDim(), p.horizon, rng, 0.5);
    const MatrixXd g = ObjectiveAndGradient(p, u).gradient;
    const MatrixXd fd = oracle::FiniteDifferenceGradient(
        [&](const MatrixXd& v) { return Objective(p, v); }, u, 1e-5);
    EXPECT_LE((g - fd).norm() / std::max(1.0, fd.norm()), 1e-5)
        << "trial " << trial;
  }
}

TEST(PropertyTest, DuplicationIdentity) {
  std::mt19937_64 rng(102);
  std::uniform_int_distribution<int> dim(1, 8);
  for (int trial = 0; trial < 100; trial++) {
    const int n = dim(rng);
    const MatrixXd s = oracle::RandomSymmetric(n, rng);
    EXPECT_LT((DuplicationMatrix(n) * Vech(s) - oracle::Vec(s)).norm(),
              1e-14 * (1.0 + s.norm()));
  }
}

TEST(PropertyTest, PenroseIdentities) {
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<int> dim(1, 8);
  for (int trial = 0; trial < 100; trial++) {
    const int r = dim(rng), c = dim(rng), k = dim(rng);
    const MatrixXd a =
        oracle::RandomMatrix(r, k, rng) * oracle::RandomMatrix(k, c, rng);
    const MatrixXd p = Pinv(a);
    const double scale = 1.0 + a.norm() * p.norm();
    EXPECT_LT((a * p * a - a).norm(), 1e-10 * scale * a.norm());
    EXPECT_LT((p * a * p - p).norm(), 1e-10 * scale * p.norm());
    EXPECT_LT(((a * p).transpose() - a * p).norm(), 1e-10 * scale);
    EXPECT_LT(((p * a).transpose() - p * a).norm(), 1e-10 * scale);
  }
}

TEST(PropertyTest, StackedSystemHoldsForPmpData) {
  std::mt19937_64 rng(104);
  std::uniform_int_distribution<int> dim(1, 5), ctrl(1, 2);
  for (int trial = 0; trial < 20; trial++) {
    const int n = dim(rng), m = ctrl(rng);
    const BilinearModel model = testing_util::RandomBilinear(n, m, rng);
    const MatrixXd q = oracle::RandomSymmetric(n, rng);
    const MatrixXd r = RandomPsd(m, rng) + MatrixXd::Identity(m, m);
    const LiftedBatch batch =
        testing_util::PmpConsistentBatch(model, q, r, 2, 15, rng);
    const VectorXd u = StackControls(batch, r);
    const MatrixXd ad = FoldDuplication(BuildScriptA(model, batch));
    EXPECT_LE((-u - ad * Vech(q)).norm(), 1e-9 * (1.0 + u.norm()));
  }
}

TEST(PropertyTest, JointScalingKeepsArgmin) {
  std::mt19937_64 rng(105);
  const AnalyticSystem sys = MakeSystem("example2");
  SolverOptions options;
  for (int trial = 0; trial < 5; trial++) {
    OcProblem p;
    p.dynamics = std::make_shared<AnalyticSystem>(sys);
    p.cost = sys.DefaultCost();
    p.x0 = oracle::RandomMatrix(2, 1, rng, 0.5);
    p.horizon = 30;
    const OcSolution base = Solve(p, {}, options);
    for (double alpha : {0.5, 2.0}) {
      OcProblem scaled = p;
      scaled.cost.q *= alpha;
      scaled.cost.r *= alpha;
      const OcSolution sol = Solve(scaled, {}, options);
      ASSERT_TRUE(sol.converged);
      EXPECT_LE((sol.states - base.states).cwiseAbs().maxCoeff(),
                10.0 * options.grad_tol);
    }
  }
}

TEST(PropertyTest, SolutionsAreReSimulable) {
  std::mt19937_64 rng(106);
  for (int trial = 0; trial < 10; trial++) {
    const OcProblem p = RandomBilinearProblem(3, 2, 15, rng);
    const OcSolution sol = Solve(p);
    EXPECT_LE((Rollout(*p.dynamics, p.x0, sol.controls) - sol.states)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
  }
}

TEST(PropertyTest, CanonicalCostAgreesOnObservedStates) {
  // example2 lifted states satisfy z1^2 = z3 z4, so Q is only defined up
  // to that form; the reported Q must give the same stage cost on the data
  std::mt19937_64 rng(107);
  const AnalyticSystem sys = MakeSystem("example2");
  const BilinearModel& model = *sys.analytic_bilinear;
  const TrajectoryBatch data = GenerateBatch(
      sys, sys.default_weights, 6, 30, UniformBox(2, -1.0, 1.0), 3);
  const LiftedBatch batch = LiftBatch(sys.lifting, data);
  IocOptions raw;
  raw.canonicalize = false;
  const CostEstimate plain = InverseBiLqr(model, batch, raw);
  const CostEstimate canon = InverseBiLqr(model, batch);
  EXPECT_EQ(canon.diagnostics.data_null_dim, 1);
  const MatrixXd forms = VanishingQuadraticForms(batch.z, 1e-8);
  EXPECT_LT((forms.transpose() * Vech(canon.q)).norm(), 1e-10);
  for (int k = 0; k < batch.z.cols(); k++) {
    const VectorXd z = batch.z.col(k);
    EXPECT_NEAR(z.dot(canon.q * z), z.dot(plain.q * z),
                1e-6 * (1.0 + std::abs(z.dot(plain.q * z))));
  }
}

TEST(PropertyTest, DiagnosticsAreHonest) {
  std::mt19937_64 rng(108);
  std::uniform_int_distribution<int> len(3, 12), count(1, 4);
  for (int trial = 0; trial < 20; trial++) {
    const BilinearModel model = testing_util::RandomBilinear(3, 1, rng);
    const LiftedBatch batch = testing_util::PmpConsistentBatch(
        model, oracle::RandomSymmetric(3, rng), MatrixXd::Identity(1, 1),
        count(rng), len(rng), rng);
    const CostEstimate est = InverseBiLqr(model, batch);
    const IocDiagnostics& d = est.diagnostics;
    if (d.lemma5_satisfied) {
      EXPECT_EQ(d.NullspaceDim(), 0);
      EXPECT_TRUE(std::isfinite(d.condition_number));
    }
    EXPECT_EQ(d.NullspaceDim(), d.cols - d.numerical_rank);
    EXPECT_EQ(d.rows, batch.num_trajectories * (batch.horizon - 2));
  }
}

}  // namespace
}  // namespace kbilqr
