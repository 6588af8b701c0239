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

#include "kbilqr/cost.h"

#include <cmath>
#include <string>

#include "kbilqr/edmdc.h"

namespace kbilqr {

void QuadraticCost::Validate(int state_dim, int control_dim) const {
  CheckDims(dict.StateDim() == state_dim,
            "cost dictionary state dimension " +
                std::to_string(dict.StateDim()) + " != " +
                std::to_string(state_dim));
  CheckDims(q.rows() == dict.LiftedDim() && q.cols() == dict.LiftedDim(),
            "cost Q must be N x N with N the dictionary size");
  CheckDims(r.rows() == control_dim && r.cols() == control_dim,
            "cost R must be m x m");
}

double QuadraticCost::Stage(const Eigen::Ref<const VectorXd>& x,
                            const Eigen::Ref<const VectorXd>& u) const {
  const VectorXd z = Lift(dict, x);
  return z.dot(q * z) + u.dot(r * u);
}

void QuadraticCost::HalfStageGradients(const Eigen::Ref<const VectorXd>& x,
                                       const Eigen::Ref<const VectorXd>& u,
                                       VectorXd* lx, VectorXd* lu) const {
  if (lx) {
    const VectorXd z = Lift(dict, x);
    const VectorXd qz = 0.5 * (q * z + q.transpose() * z);
    *lx = LiftJacobian(dict, x).transpose() * qz;
  }
  if (lu) *lu = 0.5 * (r * u + r.transpose() * u);
}

QuadraticCost WeightedBasisCost(const Dictionary& roots,
                                const std::vector<double>& weights,
                                int control_dim) {
  const int k = roots.LiftedDim();
  if (static_cast<int>(weights.size()) != k + control_dim) {
    Fail(ErrorKind::kInvalidInput,
         "expected " + std::to_string(k + control_dim) + " weights, got " +
             std::to_string(weights.size()));
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      Fail(ErrorKind::kInvalidInput, "weights must be finite and nonnegative");
    }
  }
  QuadraticCost cost;
  cost.dict = roots;
  cost.q = MatrixXd::Zero(k, k);
  cost.r = MatrixXd::Zero(control_dim, control_dim);
  for (int i = 0; i < k; i++) cost.q(i, i) = weights[i];
  for (int j = 0; j < control_dim; j++) cost.r(j, j) = weights[k + j];
  return cost;
}

QuadraticCost ExpressInLifting(const QuadraticCost& cost,
                               const Dictionary& lifting,
                               const Eigen::Ref<const MatrixXd>& samples,
                               double tol) {
  CheckDims(cost.dict.StateDim() == lifting.StateDim(),
            "cost and lifting state dimensions differ");
  const MatrixXd theta = LiftColumns(lifting, samples);
  const MatrixXd tau = LiftColumns(cost.dict, samples);
  const MatrixXd l = tau * Pinv(theta);
  const double defect = (tau - l * theta).norm() / (1.0 + tau.norm());
  if (defect > tol) {
    Fail(ErrorKind::kInvalidInput,
         "cost terms are not in the span of the lifting (relative defect " +
             std::to_string(defect) + ")");
  }
  QuadraticCost out;
  out.dict = lifting;
  out.q = l.transpose() * cost.q * l;
  out.q = 0.5 * (out.q + out.q.transpose()).eval();
  out.r = cost.r;
  return out;
}

}  // namespace kbilqr
