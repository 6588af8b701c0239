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

#include "kbilqr/systems.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"

namespace kbilqr {
namespace {

MatrixXd Samples(int rows, int cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  MatrixXd out(rows, cols);
  for (int j = 0; j < cols; j++) {
    for (int i = 0; i < rows; i++) out(i, j) = box(rng);
  }
  return out;
}

class SystemJacobianTest : public ::testing::TestWithParam<std::string> {};

TEST_P(SystemJacobianTest, MatchesFiniteDifferences) {
  const AnalyticSystem sys = MakeSystem(GetParam());
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; trial++) {
    const VectorXd x = Samples(sys.n, 1, rng);
    const VectorXd u = Samples(sys.m, 1, rng);
    MatrixXd fx, fu;
    sys.Step(x, u, &fx, &fu);
    const MatrixXd fd_x = oracle::FiniteDifferenceJacobian(
        [&](const VectorXd& p) { return sys.Step(p, u); }, x, 1e-6);
    const MatrixXd fd_u = oracle::FiniteDifferenceJacobian(
        [&](const VectorXd& p) { return sys.Step(x, p); }, u, 1e-6);
    EXPECT_LT((fx - fd_x).norm(), 1e-8);
    EXPECT_LT((fu - fd_u).norm(), 1e-8);
  }
}

TEST_P(SystemJacobianTest, DecoderRecoversState) {
  const AnalyticSystem sys = MakeSystem(GetParam());
  std::mt19937_64 rng(2);
  const MatrixXd x = Samples(sys.n, 20, rng);
  const MatrixXd& c = sys.analytic_bilinear->c;
  EXPECT_LT((c * LiftColumns(sys.lifting, x) - x).norm(), 1e-14);
}

TEST_P(SystemJacobianTest, DefaultCostHasExpectedShape) {
  const AnalyticSystem sys = MakeSystem(GetParam());
  const QuadraticCost cost = sys.DefaultCost();
  EXPECT_EQ(cost.q.rows(), sys.cost_roots.LiftedDim());
  EXPECT_EQ(cost.r.rows(), sys.m);
  EXPECT_NO_THROW(cost.Validate(sys.n, sys.m));
}

INSTANTIATE_TEST_SUITE_P(AllSystems, SystemJacobianTest,
                         ::testing::Values("example1", "example2", "unicycle",
                                           "linear-lqr"));

TEST(AnalyticLiftTest, ExactForExampleOneAndLinear) {
  std::mt19937_64 rng(3);
  for (const char* name : {"example1", "linear-lqr"}) {
    const AnalyticSystem sys = MakeSystem(name);
    EXPECT_LT(AnalyticLiftCheck(sys, Samples(sys.n, 50, rng),
                                Samples(sys.m, 50, rng)),
              1e-14)
        << name;
  }
}

TEST(AnalyticLiftTest, ExampleTwoDefectIsSecondOrderInDt) {
  std::mt19937_64 rng(4);
  const MatrixXd x = Samples(2, 50, rng);
  const MatrixXd u = Samples(2, 50, rng);
  const double coarse = AnalyticLiftCheck(MakeSystem("example2", {}, 0.02), x, u);
  const double fine = AnalyticLiftCheck(MakeSystem("example2", {}, 0.01), x, u);
  EXPECT_LT(fine, 1e-3);
  EXPECT_NEAR(coarse / fine, 4.0, 0.5);
}

TEST(AnalyticLiftTest, UnicycleDefectIsSecondOrderInDt) {
  std::mt19937_64 rng(5);
  MatrixXd x = Samples(3, 50, rng);
  const MatrixXd u = Samples(2, 50, rng);
  const double coarse = AnalyticLiftCheck(MakeSystem("unicycle", {}, 0.02), x, u);
  const double fine = AnalyticLiftCheck(MakeSystem("unicycle", {}, 0.01), x, u);
  EXPECT_LT(fine, 1e-3);
  EXPECT_NEAR(coarse / fine, 4.0, 0.5);
}

TEST(AnalyticLiftTest, ExactWhenTheDefectTermVanishes) {
  std::mt19937_64 rng(9);
  const MatrixXd x2 = Samples(2, 50, rng);
  EXPECT_LT(AnalyticLiftCheck(MakeSystem("example2"), x2, MatrixXd::Zero(2, 50)),
            1e-12);
  MatrixXd u = Samples(2, 50, rng);
  u.row(1).setZero();
  EXPECT_LT(AnalyticLiftCheck(MakeSystem("unicycle"), Samples(3, 50, rng), u),
            1e-12);
}

TEST(AnalyticModelTest, ExampleTwoMatrices) {
  const AnalyticSystem sys = MakeSystem("example2");
  const BilinearModel& m = *sys.analytic_bilinear;
  EXPECT_NEAR(m.a(0, 0), 1.003, 1e-15);
  EXPECT_NEAR(m.a(1, 1), 1.002, 1e-15);
  EXPECT_NEAR(m.a(1, 2), 9e-6, 1e-18);
  EXPECT_NEAR(m.a(2, 2), 1.006009, 1e-15);
  EXPECT_NEAR(m.b[0](0, 3), 0.01, 1e-18);
  EXPECT_NEAR(m.b[0](1, 0), 0.02003, 1e-15);
  EXPECT_NEAR(m.b[0](2, 0), 0.02003, 1e-15);
  EXPECT_NEAR(m.b[1](1, 3), 0.01, 1e-18);
}

TEST(RegistryTest, ParametersAreCheckedAndApplied) {
  EXPECT_EQ(SystemNames().size(), 4u);
  EXPECT_THROW(MakeSystem("pendulum"), Error);
  EXPECT_THROW(MakeSystem("example2", {{"e", 0.1}}), Error);
  EXPECT_THROW(MakeSystem("example2", {{"c", 1.5}}), Error);
  const AnalyticSystem sys = MakeSystem("example2", {{"c", 0.5}});
  EXPECT_DOUBLE_EQ(sys.params.at("c"), 0.5);
  EXPECT_DOUBLE_EQ(sys.params.at("d"), 0.2);
  EXPECT_NEAR(sys.analytic_bilinear->a(0, 0), 1.005, 1e-15);
}

TEST(RegistryTest, ParseParams) {
  const ParamMap p = ParseParams("a=0.5,b=0.25");
  EXPECT_DOUBLE_EQ(p.at("a"), 0.5);
  EXPECT_DOUBLE_EQ(p.at("b"), 0.25);
  EXPECT_TRUE(ParseParams("").empty());
  EXPECT_THROW(ParseParams("a"), Error);
  EXPECT_THROW(ParseParams("a=x"), Error);
  EXPECT_THROW(ParseParams("=1"), Error);
}

TEST(SamplingTimeTest, RangeAndWarning) {
  EXPECT_FALSE(CheckSamplingTime(0.01).has_value());
  EXPECT_TRUE(CheckSamplingTime(0.5).has_value());
  EXPECT_THROW(CheckSamplingTime(1.0), Error);
  EXPECT_THROW(CheckSamplingTime(0.0), Error);
}

TEST(CostTest, WeightedBasisValidation) {
  const Dictionary roots = Dictionary::Identity(2);
  EXPECT_THROW(WeightedBasisCost(roots, {1.0, 1.0}, 1), Error);
  EXPECT_THROW(WeightedBasisCost(roots, {1.0, -1.0, 1.0}, 1), Error);
  const QuadraticCost c = WeightedBasisCost(roots, {1.0, 2.0, 3.0}, 1);
  EXPECT_DOUBLE_EQ(c.Stage(Eigen::Vector2d(1.0, 1.0), VectorXd::Ones(1)), 6.0);
}

TEST(CostTest, TrueLiftedCostReproducesStageCost) {
  std::mt19937_64 rng(6);
  for (const std::string& name : SystemNames()) {
    const AnalyticSystem sys = MakeSystem(name);
    const QuadraticCost lifted = TrueLiftedCost(sys, sys.default_weights);
    const QuadraticCost direct = sys.DefaultCost();
    for (int s = 0; s < 20; s++) {
      const VectorXd x = Samples(sys.n, 1, rng);
      const VectorXd u = Samples(sys.m, 1, rng);
      EXPECT_NEAR(lifted.Stage(x, u), direct.Stage(x, u), 1e-10) << name;
    }
  }
}

TEST(CostTest, ExampleTwoLiftedQ) {
  const AnalyticSystem sys = MakeSystem("example2");
  const QuadraticCost lifted = TrueLiftedCost(sys, sys.default_weights);
  // x2 = z2 - z3, so 2 x2^2 = 2 (z2^2 - 2 z2 z3 + z3^2)
  MatrixXd want = MatrixXd::Zero(4, 4);
  want(0, 0) = 1.0;
  want(1, 1) = 2.0;
  want(1, 2) = want(2, 1) = -2.0;
  want(2, 2) = 5.0;
  want(3, 3) = 1.0;
  EXPECT_LT((lifted.q - want).norm(), 1e-10);
}

TEST(CostTest, ExpressInLiftingRejectsUnrepresentableTerms) {
  const QuadraticCost cost =
      WeightedBasisCost(Dictionary(1, {MonomialTerm{{3}}}), {1.0, 1.0}, 1);
  std::mt19937_64 rng(7);
  EXPECT_THROW(ExpressInLifting(cost, Dictionary::Identity(1),
                                Samples(1, 20, rng)),
               Error);
}

TEST(CostTest, HalfGradientsMatchFiniteDifferences) {
  const AnalyticSystem sys = MakeSystem("unicycle");
  const QuadraticCost cost = sys.DefaultCost();
  std::mt19937_64 rng(8);
  const VectorXd x = Samples(3, 1, rng);
  const VectorXd u = Samples(2, 1, rng);
  VectorXd lx, lu;
  cost.HalfStageGradients(x, u, &lx, &lu);
  const MatrixXd fd = oracle::FiniteDifferenceJacobian(
      [&](const VectorXd& p) {
        return VectorXd::Constant(1, 0.5 * cost.Stage(p, u));
      },
      x, 1e-6);
  EXPECT_LT((lx.transpose() - fd).norm(), 1e-8);
  EXPECT_LT((lu - u).norm(), 1e-15);
}

}  // namespace
}  // namespace kbilqr
