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

#ifndef KBILQR_TRAJECTORY_H_
#define KBILQR_TRAJECTORY_H_

#include <vector>

#include "kbilqr/common.h"

namespace kbilqr {

// one recorded run: states x_0..x_T as columns of an n x (T+1) matrix and
// controls u_0..u_{T-1} as columns of an m x T matrix
struct Trajectory {
  MatrixXd states;
  MatrixXd controls;

  int StateDim() const { return static_cast<int>(states.rows()); }
  int ControlDim() const { return static_cast<int>(controls.rows()); }
  int Horizon() const { return static_cast<int>(controls.cols()); }
};

// M trajectories sampled at a uniform time step
struct TrajectoryBatch {
  std::vector<Trajectory> trajectories;
  double dt = 0.01;

  int Size() const { return static_cast<int>(trajectories.size()); }
  int StateDim() const;
  int ControlDim() const;

  // common horizon T; throws kDimensionMismatch on ragged or malformed data
  int Horizon() const;

  // shortens every trajectory to the shortest horizon in the batch
  TrajectoryBatch TruncatedToShortest() const;
};

}  // namespace kbilqr

#endif  // KBILQR_TRAJECTORY_H_
