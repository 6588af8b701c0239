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

#ifndef KBILQR_PIPELINE_H_
#define KBILQR_PIPELINE_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "kbilqr/bilqr.h"
#include "kbilqr/common.h"
#include "kbilqr/edmdc.h"
#include "kbilqr/io.h"
#include "kbilqr/optctrl.h"
#include "kbilqr/systems.h"
#include "kbilqr/trajectory.h"

namespace kbilqr {

// comparison of one predicted trajectory with a recorded one
struct TrajectoryMetrics {
  double state_rmse = 0.0;     // sqrt(mean_k |x_k - x^_k|^2)
  double position_rmse = 0.0;  // same on the leading position coordinates
  double control_rmse = 0.0;
  double amplitude = 0.0;      // max_k |x_k|
  double path_length = 0.0;    // sum_k |p_{k+1} - p_k|
  bool converged = false;
  int iterations = 0;
};

TrajectoryMetrics CompareTrajectories(const Trajectory& recorded,
                                      const Trajectory& predicted,
                                      int position_dims);

struct EvalReport {
  std::vector<TrajectoryMetrics> entries;
  std::vector<Trajectory> predictions;

  double MaxStateRatio() const;     // state_rmse / amplitude
  double MaxPositionRatio() const;  // position_rmse / path_length
  bool AllConverged() const;
  Json ToJson() const;
};

// predicts every trajectory of the batch from its initial state
EvalReport Evaluate(const ModelFile& model, const CostEstimate& cost,
                    const TrajectoryBatch& data, int position_dims,
                    const SolverOptions& options = {});

struct ReproCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ReproResult {
  std::string target;
  BilinearModel model;
  CostEstimate cost;
  EvalReport report;
  std::vector<ReproCheck> checks;
  std::vector<std::string> notes;

  bool Pass() const;
  void PrintSummary(std::ostream& out) const;
};

// full generate -> fit -> ioc -> predict -> eval study for "example2" or
// "unicycle"; artifacts go to out_dir when it is non-empty
ReproResult RunRepro(const std::string& target, const std::string& out_dir,
                     bool svg = false);

// unicycle teleoperation-style study data: 48 trajectories, 4 held out
inline constexpr int kUnicycleTrajectories = 48;
inline constexpr int kUnicycleTestIndices[] = {25, 27, 38, 45};

}  // namespace kbilqr

#endif  // KBILQR_PIPELINE_H_
