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

#include "kbilqr/dynamics.h"

#include <utility>

#include "kbilqr/lifting.h"

namespace kbilqr {

LinearDynamics::LinearDynamics(MatrixXd a, MatrixXd b)
    : a_(std::move(a)), b_(std::move(b)) {
  CheckDims(a_.rows() == a_.cols() && b_.rows() == a_.rows(),
            "linear dynamics: A must be n x n and B n x m");
}

VectorXd LinearDynamics::Step(const VectorXd& x, const VectorXd& u,
                              MatrixXd* dfdx, MatrixXd* dfdu) const {
  if (dfdx) *dfdx = a_;
  if (dfdu) *dfdu = b_;
  return a_ * x + b_ * u;
}

DecodedBilinearDynamics::DecodedBilinearDynamics(BilinearModel model)
    : model_(std::move(model)) {
  CheckDims(model_.c.cols() == model_.LiftedDim(),
            "decoder width does not match lifted dimension");
  CheckDims(model_.dict.LiftedDim() == model_.LiftedDim() &&
                model_.dict.StateDim() == model_.StateDim(),
            "model dictionary does not match its matrices");
}

VectorXd DecodedBilinearDynamics::Step(const VectorXd& x, const VectorXd& u,
                                       MatrixXd* dfdx, MatrixXd* dfdu) const {
  const VectorXd z = Lift(model_.dict, x);
  MatrixXd oab = model_.a;
  for (int i = 0; i < ControlDim(); i++) oab += u[i] * model_.b[i];
  if (dfdx) *dfdx = model_.c * oab * LiftJacobian(model_.dict, x);
  if (dfdu) {
    dfdu->resize(StateDim(), ControlDim());
    for (int i = 0; i < ControlDim(); i++) {
      dfdu->col(i) = model_.c * (model_.b[i] * z);
    }
  }
  return model_.c * (oab * z);
}

DecodedLinearDynamics::DecodedLinearDynamics(LinearModel model)
    : model_(std::move(model)) {
  CheckDims(model_.c.cols() == model_.LiftedDim(),
            "decoder width does not match lifted dimension");
}

VectorXd DecodedLinearDynamics::Step(const VectorXd& x, const VectorXd& u,
                                     MatrixXd* dfdx, MatrixXd* dfdu) const {
  const VectorXd z = Lift(model_.dict, x);
  if (dfdx) *dfdx = model_.c * model_.a * LiftJacobian(model_.dict, x);
  if (dfdu) *dfdu = model_.c * model_.b;
  return model_.c * (model_.a * z + model_.b * u);
}

}  // namespace kbilqr
