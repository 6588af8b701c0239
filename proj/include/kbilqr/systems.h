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

#ifndef KBILQR_SYSTEMS_H_
#define KBILQR_SYSTEMS_H_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kbilqr/common.h"
#include "kbilqr/cost.h"
#include "kbilqr/dynamics.h"
#include "kbilqr/edmdc.h"
#include "kbilqr/lifting.h"

namespace kbilqr {

using ParamMap = std::map<std::string, double>;

// benchmark system with exact discrete dynamics and its analytic lifting
class AnalyticSystem : public Dynamics {
 public:
  using StepFn = std::function<VectorXd(const VectorXd&, const VectorXd&,
                                        MatrixXd*, MatrixXd*)>;

  std::string name;
  int n = 0;
  int m = 0;
  ParamMap params;
  double dt = 0.01;
  Dictionary lifting;
  // exact up to the O(dt^2) terms dropped by the discretization
  std::optional<BilinearModel> analytic_bilinear;
  std::optional<LinearModel> analytic_linear;
  // cost basis phi: squares of the root terms followed by u_j^2
  Dictionary cost_roots;
  std::vector<double> default_weights;
  StepFn step;

  int StateDim() const override { return n; }
  int ControlDim() const override { return m; }
  VectorXd Step(const VectorXd& x, const VectorXd& u, MatrixXd* dfdx = nullptr,
                MatrixXd* dfdu = nullptr) const override {
    return step(x, u, dfdx, dfdu);
  }

  QuadraticCost Cost(const std::vector<double>& weights) const;
  QuadraticCost DefaultCost() const { return Cost(default_weights); }
};

std::vector<std::string> SystemNames();

// params default per system (example1: a=0.9, b=0.8; example2: c=0.3,
// d=0.2); throws kInvalidInput on an unknown name, unknown key or a value
// outside [0, 1]
AnalyticSystem MakeSystem(const std::string& name, const ParamMap& params = {},
                          double dt = 0.01);

// "a=0.5,b=0.9" -> map; empty string -> empty map
ParamMap ParseParams(const std::string& text);

// lifting of a registered system under default parameters
Dictionary NamedDictionary(const std::string& name);

// max_s || theta(F(x_s, u_s)) - (A + sum_i u_i B_i) theta(x_s) ||_2 over the
// sample columns
double AnalyticLiftCheck(const AnalyticSystem& sys,
                         const Eigen::Ref<const MatrixXd>& x,
                         const Eigen::Ref<const MatrixXd>& u);

// true cost of the system written as a quadratic form in its lifting
QuadraticCost TrueLiftedCost(const AnalyticSystem& sys,
                             const std::vector<double>& weights);

// throws for dt outside (0, 1); returns a warning for dt >= 0.1
std::optional<std::string> CheckSamplingTime(double dt);

}  // namespace kbilqr

#endif  // KBILQR_SYSTEMS_H_
