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

#ifndef KBILQR_COST_H_
#define KBILQR_COST_H_

#include <vector>

#include "kbilqr/common.h"
#include "kbilqr/lifting.h"

namespace kbilqr {

// stage cost l(x, u) = theta(x)' Q theta(x) + u' R u; the objective is
// J = 1/2 sum_k l(x_k, u_k) with zero terminal cost
struct QuadraticCost {
  Dictionary dict;
  MatrixXd q;
  MatrixXd r;

  int ControlDim() const { return static_cast<int>(r.rows()); }

  // throws on inconsistent shapes
  void Validate(int state_dim, int control_dim) const;

  double Stage(const Eigen::Ref<const VectorXd>& x,
               const Eigen::Ref<const VectorXd>& u) const;

  // gradients of 1/2 l with respect to x and u
  void HalfStageGradients(const Eigen::Ref<const VectorXd>& x,
                          const Eigen::Ref<const VectorXd>& u, VectorXd* lx,
                          VectorXd* lu) const;
};

// weighted basis cost sum_i w_i tau_i(x)^2 + sum_j w_{K+j} u_j^2 with root
// terms tau; weights holds K state weights followed by m control weights
QuadraticCost WeightedBasisCost(const Dictionary& roots,
                                const std::vector<double>& weights,
                                int control_dim);

// rewrites a cost over root terms tau as a quadratic form in the lifting
// theta, using the linear map L with tau(x) = L theta(x) fitted on the
// sample columns; throws kInvalidInput if tau is not in the span of theta
QuadraticCost ExpressInLifting(const QuadraticCost& cost,
                               const Dictionary& lifting,
                               const Eigen::Ref<const MatrixXd>& samples,
                               double tol = 1e-8);

}  // namespace kbilqr

#endif  // KBILQR_COST_H_
