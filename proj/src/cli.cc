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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <set>
#include <sstream>

#include "kbilqr/pipeline.h"
#include "kbilqr/systems.h"

namespace kbilqr {
namespace fs = std::filesystem;

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
    case ErrorKind::kInvalidInput:
      return kExitUsage;
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kDegenerateData:
    case ErrorKind::kIo:
      return kExitData;
    case ErrorKind::kDivergence:
    case ErrorKind::kStalled:
    case ErrorKind::kGeneration:
      return kExitNumerical;
  }
  return kExitNumerical;
}

int RunGuarded(const std::function<int()>& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

namespace {

// malformed input files are data errors, not usage errors
template <typename F>
auto LoadData(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    const ErrorKind kind =
        e.kind() == ErrorKind::kInvalidInput ? ErrorKind::kIo : e.kind();
    throw Error(kind, what + ": " + e.what());
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kIo, what + ": " + e.what());
  }
}

void CheckKeys(const Json& json, const std::set<std::string>& allowed,
               const std::string& section) {
  if (!json.is_object()) {
    Fail(ErrorKind::kInvalidInput, "config: " + section + " must be an object");
  }
  for (const auto& [key, value] : json.items()) {
    if (!allowed.count(key)) {
      Fail(ErrorKind::kInvalidInput,
           "config: unknown key '" + key + "' in " + section);
    }
  }
}

double Positive(const Json& json, const char* key, double fallback) {
  const double v = json.value(key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) {
    Fail(ErrorKind::kInvalidInput,
         std::string("config: ") + key + " must be positive");
  }
  return v;
}

void PrintWarnings(const std::vector<std::string>& warnings,
                   std::ostream& log) {
  for (const auto& w : warnings) log << "warning: " << w << "\n";
}

ModelFile ReadModelFile(const std::string& path) {
  return LoadData(path, [&] { return ModelFromJson(ReadJson(path)); });
}

CostEstimate ReadCostFile(const std::string& path) {
  return LoadData(path, [&] { return CostFromJson(ReadJson(path)); });
}

MatrixXd ReadMatrixFile(const std::string& path) {
  return LoadData(path, [&] {
    const std::string text = ReadFile(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
      return MatrixFromJson(Json::parse(text));
    }
    std::vector<std::vector<double>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      rows.push_back(ParseList(line));
    }
    Json json = rows;
    return MatrixFromJson(json);
  });
}

void CheckModelMatchesData(const ModelFile& model, const TrajectoryBatch& data) {
  const int n = model.linear ? model.linear_model.StateDim()
                             : model.bilinear.StateDim();
  const int m = model.linear ? model.linear_model.ControlDim()
                             : model.bilinear.ControlDim();
  CheckDims(n == data.StateDim() && m == data.ControlDim(),
            "model is for n=" + std::to_string(n) + ", m=" + std::to_string(m) +
                " but data has n=" + std::to_string(data.StateDim()) +
                ", m=" + std::to_string(data.ControlDim()));
}

void CheckModelMatchesCost(const ModelFile& model, const CostEstimate& cost) {
  const int lifted = model.dict().LiftedDim();
  const int m = model.linear ? model.linear_model.ControlDim()
                             : model.bilinear.ControlDim();
  CheckDims(cost.q.rows() == lifted,
            "cost Q is " + std::to_string(cost.q.rows()) +
                "-dimensional, model lifting has N=" + std::to_string(lifted));
  CheckDims(cost.r.size() == 0 || cost.r.rows() == m,
            "cost R does not match the model control dimension");
}

}  // namespace

RunConfig ConfigFromJson(const Json& json) {
  CheckKeys(json, {"dictionary", "solver", "ioc", "dt", "seed"}, "config");
  RunConfig config;
  if (json.contains("dictionary")) {
    config.dictionary = DictionaryFromJson(json["dictionary"]);
  }
  if (json.contains("solver")) {
    const Json& s = json["solver"];
    CheckKeys(s, {"grad_tol", "max_iter", "gauss_newton"}, "solver");
    config.solver.grad_tol = Positive(s, "grad_tol", config.solver.grad_tol);
    config.solver.max_iter = s.value("max_iter", config.solver.max_iter);
    if (config.solver.max_iter < 1) {
      Fail(ErrorKind::kInvalidInput, "config: max_iter must be positive");
    }
    config.solver.gauss_newton = s.value("gauss_newton", false);
  }
  if (json.contains("ioc")) {
    const Json& s = json["ioc"];
    CheckKeys(s,
              {"pinv_rel_tol", "rank_rel_tol", "unactuated_tol", "psd_project",
               "canonicalize", "R"},
              "ioc");
    config.ioc.pinv_rel_tol =
        Positive(s, "pinv_rel_tol", config.ioc.pinv_rel_tol);
    config.ioc.rank_rel_tol =
        Positive(s, "rank_rel_tol", config.ioc.rank_rel_tol);
    config.ioc.unactuated_tol =
        Positive(s, "unactuated_tol", config.ioc.unactuated_tol);
    config.ioc.psd_project = s.value("psd_project", false);
    config.ioc.canonicalize = s.value("canonicalize", true);
    if (s.contains("R")) config.ioc.r = MatrixFromJson(s["R"]);
    config.fit.pinv_rel_tol = config.ioc.pinv_rel_tol;
  }
  config.dt = Positive(json, "dt", config.dt);
  config.seed = json.value("seed", config.seed);
  return config;
}

RunConfig LoadConfig(const std::string& path) {
  if (path.empty()) return {};
  const Json json = LoadData(path, [&] { return ReadJson(path); });
  return ConfigFromJson(json);
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    try {
      size_t used = 0;
      const std::string trimmed = item.substr(first);
      out.push_back(std::stod(trimmed, &used));
      if (trimmed.find_first_not_of(" \t\r", used) != std::string::npos) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      Fail(ErrorKind::kUsage, "cannot parse number '" + item + "'");
    }
  }
  return out;
}

StateBox ParseBox(const std::string& text, int dim) {
  std::vector<std::vector<double>> pairs;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    pairs.push_back(ParseList(part));
    if (pairs.back().size() != 2) {
      Fail(ErrorKind::kUsage, "x0 box entries must be lo,hi pairs");
    }
  }
  if (pairs.size() != 1 && static_cast<int>(pairs.size()) != dim) {
    Fail(ErrorKind::kUsage, "x0 box needs one pair or one pair per state");
  }
  StateBox box{VectorXd(dim), VectorXd(dim)};
  for (int i = 0; i < dim; i++) {
    const auto& p = pairs.size() == 1 ? pairs[0] : pairs[i];
    if (p[0] > p[1]) Fail(ErrorKind::kUsage, "x0 box has lo > hi");
    box.lo[i] = p[0];
    box.hi[i] = p[1];
  }
  return box;
}

VectorXd ParseInitialState(const std::string& text) {
  std::string line = text;
  if (fs::is_regular_file(text)) {
    const std::string content = LoadData(text, [&] { return ReadFile(text); });
    if (content.rfind("k,", 0) == 0) {
      const Trajectory t =
          LoadData(text, [&] { return TrajectoryFromCsv(content); });
      return t.states.col(0);
    }
    std::stringstream ss(content);
    std::getline(ss, line);
  }
  const std::vector<double> values = ParseList(line);
  if (values.empty()) Fail(ErrorKind::kUsage, "empty initial state");
  return Eigen::Map<const VectorXd>(values.data(),
                                    static_cast<int>(values.size()));
}

int CmdGenerate(const GenerateArgs& args, std::ostream& log) {
  if (args.n_traj < 1) Fail(ErrorKind::kUsage, "--n-traj must be >= 1");
  if (args.horizon < 3) Fail(ErrorKind::kUsage, "--horizon must be >= 3");
  if (args.out.empty()) Fail(ErrorKind::kUsage, "--out is required");
  const RunConfig config = LoadConfig(args.config);
  if (auto w = CheckSamplingTime(args.dt)) log << "warning: " << *w << "\n";
  const AnalyticSystem sys =
      MakeSystem(args.system, ParseParams(args.params), args.dt);
  const std::vector<double> weights =
      args.weights.empty() ? sys.default_weights : ParseList(args.weights);
  const StateBox box = ParseBox(args.x0_box, sys.n);
  const TrajectoryBatch batch = GenerateBatch(
      sys, weights, args.n_traj, args.horizon, box, args.seed, config.solver);
  Json extra = {{"system", sys.name},
                {"params", sys.params},
                {"seed", args.seed},
                {"weights", weights},
                {"x0_box", args.x0_box}};
  WriteBatch(args.out, batch, extra);
  log << "wrote " << batch.Size() << " trajectories (T=" << args.horizon
      << ") to " << args.out << "\n";
  return kExitOk;
}

int CmdFit(const FitArgs& args, std::ostream& log) {
  if (args.out.empty()) Fail(ErrorKind::kUsage, "--out is required");
  const RunConfig config = LoadConfig(args.config);
  Dictionary dict;
  const auto names = SystemNames();
  if (std::find(names.begin(), names.end(), args.dict) != names.end()) {
    dict = NamedDictionary(args.dict);
  } else {
    const RunConfig dict_config = LoadConfig(args.dict);
    if (!dict_config.dictionary) {
      Fail(ErrorKind::kUsage, args.dict + " has no dictionary section");
    }
    dict = *dict_config.dictionary;
  }
  const TrajectoryBatch data = LoadData(
      args.data, [&] { return ReadBatch(args.data, args.truncate); });
  CheckDims(dict.StateDim() == data.StateDim(),
            "dictionary expects n=" + std::to_string(dict.StateDim()) +
                ", data has n=" + std::to_string(data.StateDim()));

  const BilinearModel bilinear = FitBilinear(data, dict, config.fit);
  log << std::setprecision(6);
  log << "bilinear residual: " << bilinear.residual << "\n";
  PrintWarnings(bilinear.warnings, log);
  const auto unactuated =
      DetectUnactuated(bilinear, config.ioc.unactuated_tol);
  if (!unactuated.empty()) {
    log << "warning: unactuated lifted coordinates:";
    for (int j : unactuated) log << " " << j;
    log << "\n";
  }
  if (args.linear) {
    const LinearModel linear = FitLinear(data, dict, config.fit);
    log << "linear residual: " << linear.residual << "\n";
    WriteJson(args.out, ModelToJson(linear));
  } else {
    WriteJson(args.out, ModelToJson(bilinear));
  }
  log << "wrote " << args.out << "\n";
  return kExitOk;
}

int CmdIoc(const IocArgs& args, std::ostream& log) {
  if (args.out.empty()) Fail(ErrorKind::kUsage, "--out is required");
  const RunConfig config = LoadConfig(args.config);
  const ModelFile model = ReadModelFile(args.model);
  const TrajectoryBatch data = LoadData(
      args.data, [&] { return ReadBatch(args.data, args.truncate); });
  CheckModelMatchesData(model, data);

  IocOptions options = config.ioc;
  if (!args.r_matrix.empty()) options.r = ReadMatrixFile(args.r_matrix);
  if (args.psd_project) options.psd_project = true;

  const LiftedBatch lifted = LiftBatch(model.dict(), data);
  const CostEstimate cost =
      model.linear ? InverseLqr(model.linear_model, lifted, options)
                   : InverseBiLqr(model.bilinear, lifted, options);
  WriteJson(args.out, CostToJson(cost));

  const IocDiagnostics& d = cost.diagnostics;
  log << std::setprecision(6);
  log << "rows=" << d.rows << " cols=" << d.cols
      << " rank=" << d.numerical_rank << " cond=" << d.condition_number
      << " nullspace_dim=" << d.NullspaceDim()
      << " data_null_dim=" << d.data_null_dim << "\n";
  log << "lemma5=" << (d.lemma5_satisfied ? "true" : "false")
      << " lemma6=" << (d.lemma6_satisfied ? "true" : "false")
      << " ls_residual=" << cost.ls_residual << "\n";
  PrintWarnings(cost.warnings, log);
  log << "wrote " << args.out << "\n";
  return kExitOk;
}

int CmdPredict(const PredictArgs& args, std::ostream& log) {
  if (args.out.empty()) Fail(ErrorKind::kUsage, "--out is required");
  if (args.horizon < 3) Fail(ErrorKind::kUsage, "--horizon must be >= 3");
  const RunConfig config = LoadConfig(args.config);
  const ModelFile model = ReadModelFile(args.model);
  const CostEstimate cost = ReadCostFile(args.cost);
  CheckModelMatchesCost(model, cost);
  const VectorXd x0 = ParseInitialState(args.x0);
  CheckDims(x0.size() == model.dict().StateDim(),
            "x0 has " + std::to_string(x0.size()) + " entries, model has n=" +
                std::to_string(model.dict().StateDim()));

  const OcSolution sol =
      model.linear
          ? Predict(model.linear_model, cost, x0, args.horizon, config.solver)
          : Predict(model.bilinear, cost, x0, args.horizon, config.solver);
  AtomicWrite(args.out, TrajectoryToCsv(sol.ToTrajectory()));
  WriteJson(args.out + ".meta.json",
            {{"converged", sol.converged},
             {"iterations", sol.iterations},
             {"grad_norm", sol.grad_norm},
             {"objective", sol.objective},
             {"horizon", args.horizon}});
  if (!args.svg.empty()) {
    AtomicWrite(args.svg, StatePlotSvg({sol.ToTrajectory()}, {}, "prediction"));
  }
  log << std::setprecision(6) << "objective " << sol.objective
      << ", gradient norm " << sol.grad_norm << ", " << sol.iterations
      << " iterations\n";
  if (!sol.converged) {
    log << "warning: solver did not converge\n";
    return kExitNumerical;
  }
  log << "wrote " << args.out << "\n";
  return kExitOk;
}

int CmdEval(const EvalArgs& args, std::ostream& log) {
  if (args.report.empty()) Fail(ErrorKind::kUsage, "--report is required");
  const RunConfig config = LoadConfig(args.config);
  if (fs::is_directory(args.data) && fs::is_empty(args.data)) {
    Fail(ErrorKind::kUsage, args.data + " is empty");
  }
  const ModelFile model = ReadModelFile(args.model);
  const CostEstimate cost = ReadCostFile(args.cost);
  CheckModelMatchesCost(model, cost);
  const TrajectoryBatch data = LoadData(
      args.data, [&] { return ReadBatch(args.data, args.truncate); });
  CheckModelMatchesData(model, data);

  const EvalReport report =
      Evaluate(model, cost, data, args.position_dims, config.solver);
  WriteJson(args.report, report.ToJson());
  log << std::setprecision(6);
  for (size_t i = 0; i < report.entries.size(); i++) {
    const auto& e = report.entries[i];
    log << "trajectory " << i << ": state_rmse=" << e.state_rmse
        << " position_rmse=" << e.position_rmse
        << " control_rmse=" << e.control_rmse << "\n";
  }
  log << "max state rmse / amplitude: " << report.MaxStateRatio() << "\n";
  log << "max position rmse / path length: " << report.MaxPositionRatio()
      << "\n";
  log << "wrote " << args.report << "\n";
  if (!report.AllConverged()) {
    log << "warning: some predictions did not converge\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int CmdRepro(const ReproArgs& args, std::ostream& log) {
  const std::string out =
      args.out.empty() ? "repro_" + args.target : args.out;
  const ReproResult result = RunRepro(args.target, out, args.svg);
  result.PrintSummary(log);
  log << "artifacts in " << out << "\n";
  return result.Pass() ? kExitOk : kExitCheckFailed;
}

}  // namespace kbilqr
