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

#ifndef KBILQR_EDMDC_H_
#define KBILQR_EDMDC_H_

#include <string>
#include <vector>

#include "kbilqr/common.h"
#include "kbilqr/lifting.h"
#include "kbilqr/trajectory.h"

namespace kbilqr {

inline constexpr double kDefaultPinvRelTol = 1e-10;

// Moore-Penrose pseudo-inverse by SVD; singular values below
// rel_tol * sigma_max are treated as zero.
MatrixXd Pinv(const Eigen::Ref<const MatrixXd>& mat,
              double rel_tol = kDefaultPinvRelTol);

// Discrete lifted bilinear model z+ = A z + sum_i u_i B_i z, x = C z.
struct BilinearModel {
  MatrixXd a;
  std::vector<MatrixXd> b;
  MatrixXd c;
  Dictionary dict;
  double dt = 0.01;
  // ||theta(Y) - [A B] regressor||_F / sqrt(number of samples)
  double residual = 0.0;
  std::vector<std::string> warnings;

  int LiftedDim() const { return static_cast<int>(a.rows()); }
  int ControlDim() const { return static_cast<int>(b.size()); }
  int StateDim() const { return static_cast<int>(c.rows()); }

  VectorXd StepLifted(const Eigen::Ref<const VectorXd>& z,
                      const Eigen::Ref<const VectorXd>& u) const;

  // continuous-time reporting matrices (A - I) / dt and B_i / dt
  MatrixXd ContinuousA() const;
  MatrixXd ContinuousB(int i) const;
};

// Discrete lifted linear model z+ = A z + B u, x = C z.
struct LinearModel {
  MatrixXd a;
  MatrixXd b;
  MatrixXd c;
  Dictionary dict;
  double dt = 0.01;
  double residual = 0.0;
  std::vector<std::string> warnings;

  int LiftedDim() const { return static_cast<int>(a.rows()); }
  int ControlDim() const { return static_cast<int>(b.cols()); }
  int StateDim() const { return static_cast<int>(c.rows()); }

  VectorXd StepLifted(const Eigen::Ref<const VectorXd>& z,
                      const Eigen::Ref<const VectorXd>& u) const;
};

struct FitOptions {
  double pinv_rel_tol = kDefaultPinvRelTol;
};

// stacked regressor [Z; Z .* U_1; ...; Z .* U_m], (N(1+m)) x K
MatrixXd BilinearRegressor(const Eigen::Ref<const MatrixXd>& z,
                           const Eigen::Ref<const MatrixXd>& u);

// [A | B_1 ... B_m] = theta(Y) pinv(regressor)
BilinearModel FitBilinear(const TrajectoryBatch& data, const Dictionary& dict,
                          const FitOptions& options = {});
BilinearModel FitBilinear(const LiftedBatch& lifted, const Dictionary& dict,
                          double dt, const FitOptions& options = {});

// [A | B] = theta(Y) pinv([theta(X); U])
LinearModel FitLinear(const TrajectoryBatch& data, const Dictionary& dict,
                      const FitOptions& options = {});

// C = X pinv(theta(X))
MatrixXd FitDecoder(const TrajectoryBatch& data, const Dictionary& dict,
                    const FitOptions& options = {});
MatrixXd FitDecoder(const LiftedBatch& lifted, const FitOptions& options = {});

// residual of a model on data, same normalization as the fit
double BilinearResidual(const BilinearModel& model, const LiftedBatch& lifted);
double LinearResidual(const LinearModel& model, const LiftedBatch& lifted);

}  // namespace kbilqr

#endif  // KBILQR_EDMDC_H_
