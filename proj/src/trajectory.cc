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

#include "kbilqr/trajectory.h"

#include <algorithm>
#include <string>

namespace kbilqr {

int TrajectoryBatch::StateDim() const {
  if (trajectories.empty()) Fail(ErrorKind::kDegenerateData, "empty batch");
  return trajectories.front().StateDim();
}

int TrajectoryBatch::ControlDim() const {
  if (trajectories.empty()) Fail(ErrorKind::kDegenerateData, "empty batch");
  return trajectories.front().ControlDim();
}

int TrajectoryBatch::Horizon() const {
  if (trajectories.empty()) Fail(ErrorKind::kDegenerateData, "empty batch");
  const int n = StateDim();
  const int m = ControlDim();
  const int horizon = trajectories.front().Horizon();
  for (int i = 0; i < Size(); i++) {
    const Trajectory& t = trajectories[i];
    const std::string where = "trajectory " + std::to_string(i);
    CheckDims(t.StateDim() == n && t.ControlDim() == m,
              where + ": state/control dimension differs from trajectory 0");
    CheckDims(t.states.cols() == t.controls.cols() + 1,
              where + ": expected T+1 states for T controls");
    CheckDims(t.Horizon() == horizon,
              where + ": horizon " + std::to_string(t.Horizon()) +
                  " differs from " + std::to_string(horizon) +
                  " (ragged batch)");
  }
  if (horizon < 1) Fail(ErrorKind::kDegenerateData, "horizon must be >= 1");
  return horizon;
}

TrajectoryBatch TrajectoryBatch::TruncatedToShortest() const {
  TrajectoryBatch out;
  out.dt = dt;
  if (trajectories.empty()) return out;
  int shortest = trajectories.front().Horizon();
  for (const Trajectory& t : trajectories) {
    shortest = std::min(shortest, t.Horizon());
  }
  for (const Trajectory& t : trajectories) {
    out.trajectories.push_back(
        {t.states.leftCols(shortest + 1), t.controls.leftCols(shortest)});
  }
  return out;
}

}  // namespace kbilqr
