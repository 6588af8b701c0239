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

#ifndef KBILQR_DYNAMICS_H_
#define KBILQR_DYNAMICS_H_

#include "kbilqr/common.h"
#include "kbilqr/edmdc.h"

namespace kbilqr {

// discrete step x+ = F(x, u) with optional Jacobians dF/dx (n x n) and
// dF/du (n x m)
class Dynamics {
 public:
  virtual ~Dynamics() = default;

  virtual int StateDim() const = 0;
  virtual int ControlDim() const = 0;
  virtual VectorXd Step(const VectorXd& x, const VectorXd& u,
                        MatrixXd* dfdx = nullptr,
                        MatrixXd* dfdu = nullptr) const = 0;
};

// x+ = A x + B u
class LinearDynamics : public Dynamics {
 public:
  LinearDynamics(MatrixXd a, MatrixXd b);

  int StateDim() const override { return static_cast<int>(a_.rows()); }
  int ControlDim() const override { return static_cast<int>(b_.cols()); }
  VectorXd Step(const VectorXd& x, const VectorXd& u, MatrixXd* dfdx,
                MatrixXd* dfdu) const override;

 private:
  MatrixXd a_;
  MatrixXd b_;
};

// x+ = C (A theta(x) + sum_i u_i B_i theta(x))
class DecodedBilinearDynamics : public Dynamics {
 public:
  explicit DecodedBilinearDynamics(BilinearModel model);

  int StateDim() const override { return model_.StateDim(); }
  int ControlDim() const override { return model_.ControlDim(); }
  VectorXd Step(const VectorXd& x, const VectorXd& u, MatrixXd* dfdx,
                MatrixXd* dfdu) const override;

  const BilinearModel& model() const { return model_; }

 private:
  BilinearModel model_;
};

// x+ = C (A theta(x) + B u)
class DecodedLinearDynamics : public Dynamics {
 public:
  explicit DecodedLinearDynamics(LinearModel model);

  int StateDim() const override { return model_.StateDim(); }
  int ControlDim() const override { return model_.ControlDim(); }
  VectorXd Step(const VectorXd& x, const VectorXd& u, MatrixXd* dfdx,
                MatrixXd* dfdu) const override;

 private:
  LinearModel model_;
};

}  // namespace kbilqr

#endif  // KBILQR_DYNAMICS_H_
