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

#ifndef KBILQR_CLI_H_
#define KBILQR_CLI_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kbilqr/bilqr.h"
#include "kbilqr/common.h"
#include "kbilqr/edmdc.h"
#include "kbilqr/io.h"
#include "kbilqr/optctrl.h"

namespace kbilqr {

// exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

int ExitCodeFor(ErrorKind kind);

// runs fn, reporting an Error on err and mapping it to an exit code
int RunGuarded(const std::function<int()>& fn, std::ostream& err);

// JSON config with optional sections "dictionary", "solver", "ioc" and
// top-level "dt", "seed"
struct RunConfig {
  std::optional<Dictionary> dictionary;
  SolverOptions solver;
  IocOptions ioc;
  FitOptions fit;
  double dt = 0.01;
  std::uint64_t seed = 1;
};

RunConfig ConfigFromJson(const Json& json);
// empty path gives the defaults
RunConfig LoadConfig(const std::string& path);

// "1,2,3" -> {1, 2, 3}
std::vector<double> ParseList(const std::string& text);

// "lo,hi" for every coordinate, or "lo1,hi1;lo2,hi2;..." per coordinate
StateBox ParseBox(const std::string& text, int dim);

// literal "a,b,c", a file holding such a line, or a trajectory CSV whose
// first state is used
VectorXd ParseInitialState(const std::string& text);

struct GenerateArgs {
  std::string system;
  std::string params;
  std::string weights;
  int n_traj = 40;
  int horizon = 100;
  double dt = 0.01;
  std::string x0_box = "-1,1";
  std::uint64_t seed = 1;
  std::string out;
  std::string config;
};

struct FitArgs {
  std::string data;
  std::string dict;  // config file or a system name
  std::string out;
  bool linear = false;
  bool truncate = false;
  std::string config;
};

struct IocArgs {
  std::string data;
  std::string model;
  std::string out;
  std::string r_matrix;
  bool psd_project = false;
  bool truncate = false;
  std::string config;
};

struct PredictArgs {
  std::string model;
  std::string cost;
  std::string x0;
  int horizon = 100;
  std::string out;
  std::string svg;
  std::string config;
};

struct EvalArgs {
  std::string data;
  std::string model;
  std::string cost;
  std::string report;
  int position_dims = 2;
  bool truncate = false;
  std::string config;
};

struct ReproArgs {
  std::string target;
  std::string out;
  bool svg = false;
};

int CmdGenerate(const GenerateArgs& args, std::ostream& log);
int CmdFit(const FitArgs& args, std::ostream& log);
int CmdIoc(const IocArgs& args, std::ostream& log);
int CmdPredict(const PredictArgs& args, std::ostream& log);
int CmdEval(const EvalArgs& args, std::ostream& log);
int CmdRepro(const ReproArgs& args, std::ostream& log);

}  // namespace kbilqr

#endif  // KBILQR_CLI_H_
