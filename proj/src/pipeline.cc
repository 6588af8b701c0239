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

#include "kbilqr/pipeline.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace kbilqr {
namespace fs = std::filesystem;

TrajectoryMetrics CompareTrajectories(const Trajectory& recorded,
                                      const Trajectory& predicted,
                                      int position_dims) {
  CheckDims(recorded.states.rows() == predicted.states.rows() &&
                recorded.states.cols() == predicted.states.cols() &&
                recorded.controls.rows() == predicted.controls.rows(),
            "predicted and recorded trajectories differ in shape");
  const int p = std::clamp(position_dims, 1, recorded.StateDim());
  const int steps = static_cast<int>(recorded.states.cols());
  TrajectoryMetrics out;
  const MatrixXd dx = recorded.states - predicted.states;
  out.state_rmse = std::sqrt(dx.squaredNorm() / steps);
  out.position_rmse = std::sqrt(dx.topRows(p).squaredNorm() / steps);
  if (recorded.Horizon() > 0) {
    out.control_rmse =
        std::sqrt((recorded.controls - predicted.controls).squaredNorm() /
                  recorded.Horizon());
  }
  for (int k = 0; k < steps; k++) {
    out.amplitude = std::max(out.amplitude, recorded.states.col(k).norm());
    if (k + 1 < steps) {
      out.path_length += (recorded.states.col(k + 1).head(p) -
                          recorded.states.col(k).head(p))
                             .norm();
    }
  }
  return out;
}

double EvalReport::MaxStateRatio() const {
  double worst = 0.0;
  for (const auto& e : entries) {
    worst = std::max(worst, e.state_rmse / std::max(e.amplitude, 1e-300));
  }
  return worst;
}

double EvalReport::MaxPositionRatio() const {
  double worst = 0.0;
  for (const auto& e : entries) {
    worst = std::max(worst, e.position_rmse / std::max(e.path_length, 1e-300));
  }
  return worst;
}

bool EvalReport::AllConverged() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const auto& e) { return e.converged; });
}

Json EvalReport::ToJson() const {
  Json list = Json::array();
  double sum_state = 0.0, sum_pos = 0.0, sum_ctrl = 0.0;
  double max_state = 0.0, max_pos = 0.0;
  for (size_t i = 0; i < entries.size(); i++) {
    const auto& e = entries[i];
    list.push_back({{"index", i},
                    {"state_rmse", e.state_rmse},
                    {"position_rmse", e.position_rmse},
                    {"control_rmse", e.control_rmse},
                    {"amplitude", e.amplitude},
                    {"path_length", e.path_length},
                    {"state_rmse_over_amplitude",
                     e.state_rmse / std::max(e.amplitude, 1e-300)},
                    {"position_rmse_over_path",
                     e.position_rmse / std::max(e.path_length, 1e-300)},
                    {"converged", e.converged},
                    {"iterations", e.iterations}});
    sum_state += e.state_rmse;
    sum_pos += e.position_rmse;
    sum_ctrl += e.control_rmse;
    max_state = std::max(max_state, e.state_rmse);
    max_pos = std::max(max_pos, e.position_rmse);
  }
  const double count = std::max<double>(1.0, entries.size());
  return {{"entries", list},
          {"aggregate",
           {{"count", entries.size()},
            {"mean_state_rmse", sum_state / count},
            {"max_state_rmse", max_state},
            {"mean_position_rmse", sum_pos / count},
            {"max_position_rmse", max_pos},
            {"mean_control_rmse", sum_ctrl / count},
            {"max_state_rmse_over_amplitude", MaxStateRatio()},
            {"max_position_rmse_over_path", MaxPositionRatio()},
            {"all_converged", AllConverged()}}}};
}

EvalReport Evaluate(const ModelFile& model, const CostEstimate& cost,
                    const TrajectoryBatch& data, int position_dims,
                    const SolverOptions& options) {
  if (data.Size() == 0) Fail(ErrorKind::kUsage, "no trajectories to evaluate");
  const int horizon = data.Horizon();
  EvalReport report;
  for (const Trajectory& t : data.trajectories) {
    const VectorXd x0 = t.states.col(0);
    OcSolution sol =
        model.linear ? Predict(model.linear_model, cost, x0, horizon, options)
                     : Predict(model.bilinear, cost, x0, horizon, options);
    TrajectoryMetrics metrics =
        CompareTrajectories(t, sol.ToTrajectory(), position_dims);
    metrics.converged = sol.converged;
    metrics.iterations = sol.iterations;
    report.entries.push_back(metrics);
    report.predictions.push_back(sol.ToTrajectory());
  }
  return report;
}

bool ReproResult::Pass() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(),
                     [](const auto& c) { return c.pass; });
}

void ReproResult::PrintSummary(std::ostream& out) const {
  out << "repro " << target << "\n";
  for (const auto& note : notes) out << "  " << note << "\n";
  out << std::left << std::setw(44) << "  check" << std::setw(14) << "value"
      << std::setw(14) << "threshold"
      << "verdict\n";
  for (const auto& c : checks) {
    out << "  " << std::setw(42) << c.name << std::setw(14)
        << std::setprecision(6) << c.value << std::setw(14) << c.threshold
        << (c.pass ? "PASS" : "FAIL") << "\n";
  }
  out << "overall: " << (Pass() ? "PASS" : "FAIL") << "\n";
}

namespace {

template <typename F>
auto Stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), "stage " + name + ": " + e.what());
  }
}

std::string FormatMatrixDiff(const std::string& label, const MatrixXd& fitted,
                             const MatrixXd& exact) {
  std::ostringstream ss;
  ss << "|" << label << " - " << label << "_analytic|_F = " << std::setprecision(4)
     << (fitted - exact).norm();
  return ss.str();
}

void AddModelNotes(const BilinearModel& fitted, const BilinearModel& exact,
                   std::vector<std::string>* notes) {
  notes->push_back(FormatMatrixDiff("A", fitted.a, exact.a));
  for (int i = 0; i < fitted.ControlDim(); i++) {
    notes->push_back(FormatMatrixDiff("B" + std::to_string(i + 1),
                                      fitted.b[i], exact.b[i]));
  }
}

void WriteArtifacts(const std::string& dir, const TrajectoryBatch& train,
                    const TrajectoryBatch& test, const Json& extra,
                    const ReproResult& result, bool svg) {
  if (dir.empty()) return;
  WriteBatch((fs::path(dir) / "train").string(), train, extra);
  WriteBatch((fs::path(dir) / "test").string(), test, extra);
  WriteJson((fs::path(dir) / "model.json").string(), ModelToJson(result.model));
  WriteJson((fs::path(dir) / "cost.json").string(), CostToJson(result.cost));
  WriteJson((fs::path(dir) / "report.json").string(),
            result.report.ToJson());
  for (size_t i = 0; i < result.report.predictions.size(); i++) {
    AtomicWrite((fs::path(dir) / ("pred_" + TrajectoryFileName(i))).string(),
                TrajectoryToCsv(result.report.predictions[i]));
  }
  if (svg) {
    AtomicWrite((fs::path(dir) / "states.svg").string(),
                StatePlotSvg(test.trajectories, result.report.predictions,
                             result.target +
                                 ": recorded (solid) vs predicted (dashed)"));
  }
}

ReproResult ReproExample2(const std::string& out_dir, bool svg) {
  ReproResult result;
  result.target = "example2";
  const AnalyticSystem sys = MakeSystem("example2");
  const StateBox box = UniformBox(2, -1.0, 1.0);
  constexpr int kTrain = 40, kTest = 5, kHorizon = 100;
  constexpr std::uint64_t kSeed = 1;

  const TrajectoryBatch train = Stage("generate", [&] {
    return GenerateBatch(sys, sys.default_weights, kTrain, kHorizon, box,
                         kSeed);
  });
  const TrajectoryBatch test = Stage("generate", [&] {
    return GenerateBatch(sys, sys.default_weights, kTest, kHorizon, box,
                         kSeed + 1000);
  });
  result.model = Stage("fit", [&] { return FitBilinear(train, sys.lifting); });
  result.cost = Stage("ioc", [&] {
    return InverseBiLqr(result.model, LiftBatch(sys.lifting, train));
  });
  ModelFile model_file;
  model_file.bilinear = result.model;
  result.report = Stage("predict", [&] {
    return Evaluate(model_file, result.cost, test, 2);
  });

  AddModelNotes(result.model, *sys.analytic_bilinear, &result.notes);
  const MatrixXd& q = result.cost.q;
  std::ostringstream qdiag;
  qdiag << "diag(Q^) = [" << std::setprecision(4) << q(0, 0) << ", " << q(1, 1)
        << ", " << q(2, 2) << ", " << q(3, 3) << "], nullspace_dim = "
        << result.cost.diagnostics.NullspaceDim();
  result.notes.push_back(qdiag.str());

  result.checks.push_back({"bilinear fit residual", result.model.residual,
                           1e-2, result.model.residual <= 1e-2});
  const double gap = std::min(q(1, 1) - q(0, 0), q(2, 2) - q(1, 1));
  result.checks.push_back(
      {"Q^ diag strictly increasing (min gap > 0)", gap, 0.0, gap > 0.0});
  result.checks.push_back({"|Q^ constant entry|", std::abs(q(3, 3)), 1e-6,
                           std::abs(q(3, 3)) <= 1e-6});
  const double ratio = result.report.MaxStateRatio();
  result.checks.push_back(
      {"max state RMSE / amplitude", ratio, 1e-2, ratio <= 1e-2});
  result.checks.push_back({"all predictions converged",
                           result.report.AllConverged() ? 1.0 : 0.0, 1.0,
                           result.report.AllConverged()});

  Json extra = {{"system", "example2"},
                {"params", sys.params},
                {"weights", sys.default_weights}};
  Stage("write", [&] {
    WriteArtifacts(out_dir, train, test, extra, result, svg);
    return 0;
  });
  return result;
}

ReproResult ReproUnicycle(const std::string& out_dir, bool svg) {
  ReproResult result;
  result.target = "unicycle";
  const AnalyticSystem sys = MakeSystem("unicycle");
  StateBox box;
  box.lo = VectorXd(3);
  box.hi = VectorXd(3);
  box.lo << -2.0, -2.0, -std::numbers::pi / 2;
  box.hi << 2.0, 2.0, std::numbers::pi / 2;
  constexpr int kHorizon = 150;
  constexpr std::uint64_t kSeed = 7;

  const TrajectoryBatch all = Stage("generate", [&] {
    return GenerateBatch(sys, sys.default_weights, kUnicycleTrajectories,
                         kHorizon, box, kSeed);
  });
  TrajectoryBatch train, test;
  train.dt = test.dt = all.dt;
  for (int i = 0; i < all.Size(); i++) {
    const bool held_out =
        std::find(std::begin(kUnicycleTestIndices),
                  std::end(kUnicycleTestIndices),
                  i) != std::end(kUnicycleTestIndices);
    (held_out ? test : train).trajectories.push_back(all.trajectories[i]);
  }
  result.model = Stage("fit", [&] { return FitBilinear(train, sys.lifting); });
  result.cost = Stage("ioc", [&] {
    return InverseBiLqr(result.model, LiftBatch(sys.lifting, train));
  });
  ModelFile model_file;
  model_file.bilinear = result.model;
  result.report = Stage("predict", [&] {
    return Evaluate(model_file, result.cost, test, 2);
  });

  AddModelNotes(result.model, *sys.analytic_bilinear, &result.notes);
  std::ostringstream qdiag;
  qdiag << "diag(Q^) = [" << std::setprecision(4)
        << result.cost.q.diagonal().transpose() << "], nullspace_dim = "
        << result.cost.diagnostics.NullspaceDim();
  result.notes.push_back(qdiag.str());
  result.notes.push_back("train/test split: " +
                         std::to_string(train.Size()) + "/" +
                         std::to_string(test.Size()));

  result.checks.push_back({"bilinear fit residual", result.model.residual,
                           1e-3, result.model.residual <= 1e-3});
  result.checks.push_back({"test trajectories evaluated",
                           static_cast<double>(result.report.entries.size()),
                           4.0, result.report.entries.size() == 4});
  const double ratio = result.report.MaxPositionRatio();
  result.checks.push_back(
      {"max position RMSE / path length", ratio, 5e-2, ratio <= 5e-2});
  result.checks.push_back({"all predictions converged",
                           result.report.AllConverged() ? 1.0 : 0.0, 1.0,
                           result.report.AllConverged()});

  Json extra = {{"system", "unicycle"},
                {"seed", kSeed},
                {"weights", sys.default_weights}};
  Stage("write", [&] {
    WriteArtifacts(out_dir, train, test, extra, result, svg);
    return 0;
  });
  return result;
}

}  // namespace

ReproResult RunRepro(const std::string& target, const std::string& out_dir,
                     bool svg) {
  if (target == "example2") return ReproExample2(out_dir, svg);
  if (target == "unicycle") return ReproUnicycle(out_dir, svg);
  Fail(ErrorKind::kUsage,
       "unknown repro target '" + target + "' (example2 | unicycle)");
}

}  // namespace kbilqr
