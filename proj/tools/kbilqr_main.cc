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

// kbilqr: cost and dynamics recovery from optimal trajectories.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "kbilqr/cli.h"

int main(int argc, char** argv) {
  CLI::App app{"Koopman bilinear inverse optimal control toolkit"};
  app.require_subcommand(1);

  kbilqr::GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "synthesize optimal data");
  cmd_gen->add_option("--system", gen.system, "example1 | example2 | "
                      "unicycle | linear-lqr")->required();
  cmd_gen->add_option("--params", gen.params, "key=value,...");
  cmd_gen->add_option("--weights", gen.weights, "basis weights w1,w2,...");
  cmd_gen->add_option("--n-traj", gen.n_traj, "number of trajectories");
  cmd_gen->add_option("--horizon", gen.horizon, "steps per trajectory");
  cmd_gen->add_option("--dt", gen.dt, "sampling time");
  cmd_gen->add_option("--x0-box", gen.x0_box,
                      "lo,hi or lo1,hi1;lo2,hi2;... initial-state box");
  cmd_gen->add_option("--seed", gen.seed, "random seed");
  cmd_gen->add_option("--out", gen.out, "output directory")->required();
  cmd_gen->add_option("--config", gen.config, "JSON config file");

  kbilqr::FitArgs fit;
  auto* cmd_fit = app.add_subcommand("fit", "bilinear EDMDc fit");
  cmd_fit->add_option("--data", fit.data, "trajectory directory")->required();
  cmd_fit->add_option("--dict", fit.dict,
                      "config file with a dictionary, or a system name")
      ->required();
  cmd_fit->add_option("--out", fit.out, "model file")->required();
  cmd_fit->add_flag("--linear", fit.linear, "fit a linear lifted model");
  cmd_fit->add_flag("--truncate-to-shortest", fit.truncate,
                    "cut every trajectory to the shortest horizon");
  cmd_fit->add_option("--config", fit.config, "JSON config file");

  kbilqr::IocArgs ioc;
  auto* cmd_ioc = app.add_subcommand("ioc", "recover the lifted cost Q");
  cmd_ioc->add_option("--data", ioc.data, "trajectory directory")->required();
  cmd_ioc->add_option("--model", ioc.model, "model file")->required();
  cmd_ioc->add_option("--out", ioc.out, "cost file")->required();
  cmd_ioc->add_option("--r-matrix", ioc.r_matrix, "known R (JSON or CSV)");
  cmd_ioc->add_flag("--psd-project", ioc.psd_project,
                    "clip negative eigenvalues of Q");
  cmd_ioc->add_flag("--truncate-to-shortest", ioc.truncate,
                    "cut every trajectory to the shortest horizon");
  cmd_ioc->add_option("--config", ioc.config, "JSON config file");

  kbilqr::PredictArgs pred;
  auto* cmd_pred = app.add_subcommand("predict", "predict an optimal path");
  cmd_pred->add_option("--model", pred.model, "model file")->required();
  cmd_pred->add_option("--cost", pred.cost, "cost file")->required();
  cmd_pred->add_option("--x0", pred.x0, "x1,x2,... or a CSV file")
      ->required();
  cmd_pred->add_option("--horizon", pred.horizon, "steps")->required();
  cmd_pred->add_option("--out", pred.out, "trajectory CSV")->required();
  cmd_pred->add_option("--svg", pred.svg, "optional SVG plot");
  cmd_pred->add_option("--config", pred.config, "JSON config file");

  kbilqr::EvalArgs eval;
  auto* cmd_eval = app.add_subcommand("eval", "score predictions on data");
  cmd_eval->add_option("--data", eval.data, "test directory")->required();
  cmd_eval->add_option("--model", eval.model, "model file")->required();
  cmd_eval->add_option("--cost", eval.cost, "cost file")->required();
  cmd_eval->add_option("--report", eval.report, "report JSON")->required();
  cmd_eval->add_option("--position-dims", eval.position_dims,
                       "leading coordinates treated as position");
  cmd_eval->add_flag("--truncate-to-shortest", eval.truncate,
                     "cut every trajectory to the shortest horizon");
  cmd_eval->add_option("--config", eval.config, "JSON config file");

  kbilqr::ReproArgs repro;
  auto* cmd_repro = app.add_subcommand("repro", "run a full study");
  cmd_repro->add_option("target", repro.target, "example2 | unicycle")
      ->required();
  cmd_repro->add_option("--out", repro.out, "artifact directory");
  cmd_repro->add_flag("--svg", repro.svg, "write state plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kbilqr::kExitOk : kbilqr::kExitUsage;
  }

  auto run = [&]() -> int {
    if (*cmd_gen) return kbilqr::CmdGenerate(gen, std::cout);
    if (*cmd_fit) return kbilqr::CmdFit(fit, std::cout);
    if (*cmd_ioc) return kbilqr::CmdIoc(ioc, std::cout);
    if (*cmd_pred) return kbilqr::CmdPredict(pred, std::cout);
    if (*cmd_eval) return kbilqr::CmdEval(eval, std::cout);
    return kbilqr::CmdRepro(repro, std::cout);
  };
  return kbilqr::RunGuarded(run, std::cerr);
}
