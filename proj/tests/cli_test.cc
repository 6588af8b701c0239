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

#include "kbilqr/cli.h"

#include <filesystem>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace kbilqr {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("kbilqr_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int Guarded(const std::function<int(std::ostream&)>& fn) {
  std::ostringstream log;
  return RunGuarded([&] { return fn(log); }, log);
}

TEST(ExitCodeTest, MapsErrorKinds) {
  EXPECT_EQ(ExitCodeFor(ErrorKind::kUsage), kExitUsage);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kInvalidInput), kExitUsage);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kDimensionMismatch), kExitData);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kDegenerateData), kExitData);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kIo), kExitData);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kDivergence), kExitNumerical);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kStalled), kExitNumerical);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kGeneration), kExitNumerical);
}

TEST(ParseTest, ListsBoxesAndStates) {
  EXPECT_EQ(ParseList("1, 2.5,-3"), (std::vector<double>{1.0, 2.5, -3.0}));
  EXPECT_THROW(ParseList("1,x"), Error);
  const StateBox one = ParseBox("-1,1", 3);
  EXPECT_EQ(one.lo, VectorXd::Constant(3, -1.0));
  const StateBox per = ParseBox("-1,1;0,2", 2);
  EXPECT_EQ(per.hi, Eigen::Vector2d(1.0, 2.0));
  EXPECT_THROW(ParseBox("1,-1", 2), Error);
  EXPECT_THROW(ParseBox("-1,1;0,2", 3), Error);
  EXPECT_EQ(ParseInitialState("0.5,-0.25"), Eigen::Vector2d(0.5, -0.25));
}

TEST(ConfigTest, ReadsKnownKeysAndRejectsOthers) {
  const RunConfig config = ConfigFromJson(Json::parse(R"({
    "dictionary": {"named": "example2"},
    "solver": {"grad_tol": 1e-9, "max_iter": 50, "gauss_newton": true},
    "ioc": {"rank_rel_tol": 1e-7, "psd_project": true, "R": [[2.0]]},
    "dt": 0.02, "seed": 9})"));
  ASSERT_TRUE(config.dictionary.has_value());
  EXPECT_EQ(config.dictionary->LiftedDim(), 4);
  EXPECT_EQ(config.solver.grad_tol, 1e-9);
  EXPECT_EQ(config.solver.max_iter, 50);
  EXPECT_TRUE(config.solver.gauss_newton);
  EXPECT_EQ(config.ioc.rank_rel_tol, 1e-7);
  EXPECT_TRUE(config.ioc.psd_project);
  EXPECT_EQ(config.ioc.r(0, 0), 2.0);
  EXPECT_EQ(config.dt, 0.02);
  EXPECT_EQ(config.seed, 9u);
  EXPECT_THROW(ConfigFromJson(Json::parse(R"({"solver": {"tol": 1}})")),
               Error);
  EXPECT_THROW(ConfigFromJson(Json::parse(R"({"colour": 1})")), Error);
}

TEST(CommandTest, FullPipelineOnExampleTwo) {
  const fs::path dir = TempDir("pipeline");
  GenerateArgs gen;
  gen.system = "example2";
  gen.n_traj = 6;
  gen.horizon = 40;
  gen.out = (dir / "data").string();
  ASSERT_EQ(Guarded([&](std::ostream& log) { return CmdGenerate(gen, log); }),
            kExitOk);
  EXPECT_TRUE(fs::exists(dir / "data" / "meta.json"));

  FitArgs fit;
  fit.data = gen.out;
  fit.dict = "example2";
  fit.out = (dir / "model.json").string();
  ASSERT_EQ(Guarded([&](std::ostream& log) { return CmdFit(fit, log); }),
            kExitOk);

  IocArgs ioc;
  ioc.data = gen.out;
  ioc.model = fit.out;
  ioc.out = (dir / "cost.json").string();
  ASSERT_EQ(Guarded([&](std::ostream& log) { return CmdIoc(ioc, log); }),
            kExitOk);
  const Json cost = ReadJson(ioc.out);
  EXPECT_EQ(cost["diagnostics"]["rows"], 6 * 38 * 2);
  EXPECT_EQ(cost["diagnostics"]["cols"], 10);

  PredictArgs pred;
  pred.model = fit.out;
  pred.cost = ioc.out;
  pred.x0 = "0.5,-0.5";
  pred.horizon = 40;
  pred.out = (dir / "pred.csv").string();
  pred.svg = (dir / "pred.svg").string();
  ASSERT_EQ(Guarded([&](std::ostream& log) { return CmdPredict(pred, log); }),
            kExitOk);
  EXPECT_TRUE(fs::exists(pred.svg));
  EXPECT_TRUE(fs::exists(pred.out + ".meta.json"));

  EvalArgs eval;
  eval.data = gen.out;
  eval.model = fit.out;
  eval.cost = ioc.out;
  eval.report = (dir / "report.json").string();
  ASSERT_EQ(Guarded([&](std::ostream& log) { return CmdEval(eval, log); }),
            kExitOk);
  EXPECT_TRUE(fs::exists(eval.report));
}

TEST(CommandTest, ErrorsMapToExitCodes) {
  const fs::path dir = TempDir("errors");
  GenerateArgs gen;
  gen.system = "pendulum";
  gen.out = (dir / "data").string();
  EXPECT_EQ(Guarded([&](std::ostream& log) { return CmdGenerate(gen, log); }),
            kExitUsage);
  gen.system = "example2";
  gen.weights = "1,2";
  EXPECT_EQ(Guarded([&](std::ostream& log) { return CmdGenerate(gen, log); }),
            kExitUsage);

  FitArgs fit;
  fit.data = (dir / "missing").string();
  fit.dict = "example2";
  fit.out = (dir / "model.json").string();
  EXPECT_EQ(Guarded([&](std::ostream& log) { return CmdFit(fit, log); }),
            kExitData);

  ReproArgs repro;
  repro.target = "example9";
  EXPECT_EQ(Guarded([&](std::ostream& log) { return CmdRepro(repro, log); }),
            kExitUsage);
}

TEST(CommandTest, DimensionMismatchIsDataError) {
  const fs::path dir = TempDir("mismatch");
  GenerateArgs gen;
  gen.system = "unicycle";
  gen.n_traj = 2;
  gen.horizon = 10;
  gen.out = (dir / "data").string();
  ASSERT_EQ(Guarded([&](std::ostream& log) { return CmdGenerate(gen, log); }),
            kExitOk);
  FitArgs fit;
  fit.data = gen.out;
  fit.dict = "example2";
  fit.out = (dir / "model.json").string();
  EXPECT_EQ(Guarded([&](std::ostream& log) { return CmdFit(fit, log); }),
            kExitData);
}

}  // namespace
}  // namespace kbilqr
