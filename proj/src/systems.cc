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

#include "kbilqr/systems.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <utility>

namespace kbilqr {
namespace {

ParamMap MergeParams(const std::string& name, const ParamMap& defaults,
                     const ParamMap& given) {
  ParamMap out = defaults;
  for (const auto& [key, value] : given) {
    if (!defaults.count(key)) {
      Fail(ErrorKind::kInvalidInput,
           "unknown parameter '" + key + "' for system " + name);
    }
    if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
      Fail(ErrorKind::kInvalidInput,
           "parameter " + key + " must lie in [0, 1]");
    }
    out[key] = value;
  }
  return out;
}

MatrixXd Unit(int rows, int cols, int r, int c, double value) {
  MatrixXd m = MatrixXd::Zero(rows, cols);
  m(r, c) = value;
  return m;
}

BilinearModel Analytic(const Dictionary& lifting, MatrixXd a,
                       std::vector<MatrixXd> b, double dt) {
  BilinearModel model;
  model.a = std::move(a);
  model.b = std::move(b);
  model.dict = lifting;
  model.dt = dt;
  model.c = MatrixXd::Zero(lifting.StateDim(), lifting.LiftedDim());
  return model;
}

// [x1, x2 + x1^2, x1^2, 1]
Dictionary QuadraticManifoldLifting() {
  return Dictionary(2, {StateTerm{0}, PolynomialTerm{{{0, 1}, {2, 0}}, {1, 1}},
                        MonomialTerm{{2, 0}}, ConstantTerm{}});
}

AnalyticSystem MakeExample1(const ParamMap& given, double dt) {
  AnalyticSystem sys;
  sys.name = "example1";
  sys.n = 2;
  sys.m = 1;
  sys.dt = dt;
  sys.params = MergeParams(sys.name, {{"a", 0.9}, {"b", 0.8}}, given);
  const double a = sys.params.at("a");
  const double b = sys.params.at("b");
  sys.step = [a, b](const VectorXd& x, const VectorXd& u, MatrixXd* fx,
                    MatrixXd* fu) {
    if (fx) {
      *fx = MatrixXd::Zero(2, 2);
      (*fx)(0, 0) = a;
      (*fx)(1, 0) = 2.0 * (b - a * a) * x[0];
      (*fx)(1, 1) = b;
    }
    if (fu) *fu = Unit(2, 1, 1, 0, 1.0);
    VectorXd next(2);
    next << a * x[0], b * x[1] + (b - a * a) * x[0] * x[0] + u[0];
    return next;
  };
  sys.lifting = QuadraticManifoldLifting();
  MatrixXd lifted_a = VectorXd((VectorXd(4) << a, b, a * a, 1.0).finished())
                          .asDiagonal();
  BilinearModel bil = Analytic(sys.lifting, lifted_a, {Unit(4, 4, 1, 3, 1.0)},
                               dt);
  bil.c << 1, 0, 0, 0, 0, 1, -1, 0;
  sys.analytic_bilinear = bil;
  LinearModel lin;
  lin.a = lifted_a;
  lin.b = Unit(4, 1, 1, 0, 1.0);
  lin.c = bil.c;
  lin.dict = sys.lifting;
  lin.dt = dt;
  sys.analytic_linear = lin;
  sys.cost_roots = Dictionary::Identity(2);
  sys.default_weights = {1.0, 1.0, 1.0};
  return sys;
}

AnalyticSystem MakeExample2(const ParamMap& given, double dt) {
  AnalyticSystem sys;
  sys.name = "example2";
  sys.n = 2;
  sys.m = 2;
  sys.dt = dt;
  sys.params = MergeParams(sys.name, {{"c", 0.3}, {"d", 0.2}}, given);
  const double c = sys.params.at("c");
  const double d = sys.params.at("d");
  sys.step = [c, d, dt](const VectorXd& x, const VectorXd& u, MatrixXd* fx,
                        MatrixXd* fu) {
    const double x1 = x[0];
    if (fx) {
      *fx = MatrixXd::Zero(2, 2);
      (*fx)(0, 0) = 1.0 + c * dt;
      (*fx)(1, 0) = 2.0 * (d - 2.0 * c) * dt * x1 + 2.0 * dt * x1 * u[0];
      (*fx)(1, 1) = 1.0 + d * dt;
    }
    if (fu) {
      *fu = MatrixXd::Zero(2, 2);
      (*fu)(0, 0) = dt;
      (*fu)(1, 0) = dt * x1 * x1;
      (*fu)(1, 1) = dt;
    }
    VectorXd next(2);
    next << (1.0 + c * dt) * x1 + dt * u[0],
        (1.0 + d * dt) * x[1] + (d - 2.0 * c) * dt * x1 * x1 +
            dt * x1 * x1 * u[0] + dt * u[1];
    return next;
  };
  sys.lifting = QuadraticManifoldLifting();

  const double dt2 = dt * dt;
  MatrixXd a = MatrixXd::Zero(4, 4);
  a(0, 0) = 1.0 + c * dt;
  a(1, 1) = 1.0 + d * dt;
  a(1, 2) = c * c * dt2;
  a(2, 2) = 1.0 + 2.0 * c * dt + c * c * dt2;
  a(3, 3) = 1.0;
  MatrixXd b1 = MatrixXd::Zero(4, 4);
  b1(0, 3) = dt;
  b1(1, 0) = 2.0 * dt + c * dt2;
  b1(1, 2) = dt;
  b1(2, 0) = 2.0 * dt + c * dt2;
  BilinearModel bil = Analytic(sys.lifting, a, {b1, Unit(4, 4, 1, 3, dt)}, dt);
  bil.c << 1, 0, 0, 0, 0, 1, -1, 0;
  sys.analytic_bilinear = bil;
  sys.cost_roots = Dictionary(
      2, {StateTerm{0}, StateTerm{1}, MonomialTerm{{2, 0}}, ConstantTerm{}});
  sys.default_weights = {1.0, 2.0, 3.0, 1.0, 1.0, 1.0};
  return sys;
}

AnalyticSystem MakeUnicycle(const ParamMap& given, double dt) {
  AnalyticSystem sys;
  sys.name = "unicycle";
  sys.n = 3;
  sys.m = 2;
  sys.dt = dt;
  sys.params = MergeParams(sys.name, {}, given);
  sys.step = [dt](const VectorXd& x, const VectorXd& u, MatrixXd* fx,
                  MatrixXd* fu) {
    const double cs = std::cos(x[2]);
    const double sn = std::sin(x[2]);
    if (fx) {
      *fx = MatrixXd::Identity(3, 3);
      (*fx)(0, 2) = -u[0] * sn * dt;
      (*fx)(1, 2) = u[0] * cs * dt;
    }
    if (fu) {
      *fu = MatrixXd::Zero(3, 2);
      (*fu)(0, 0) = cs * dt;
      (*fu)(1, 0) = sn * dt;
      (*fu)(2, 1) = dt;
    }
    VectorXd next(3);
    next << x[0] + u[0] * cs * dt, x[1] + u[0] * sn * dt, x[2] + u[1] * dt;
    return next;
  };
  sys.lifting = Dictionary(
      3, {StateTerm{0}, StateTerm{1}, StateTerm{2},
          TrigTerm{TrigFunction::kCos, 2}, TrigTerm{TrigFunction::kSin, 2},
          ConstantTerm{}});
  MatrixXd b1 = MatrixXd::Zero(6, 6);
  b1(0, 3) = dt;
  b1(1, 4) = dt;
  MatrixXd b2 = MatrixXd::Zero(6, 6);
  b2(2, 5) = dt;
  b2(3, 4) = -dt;
  b2(4, 3) = dt;
  BilinearModel bil =
      Analytic(sys.lifting, MatrixXd::Identity(6, 6), {b1, b2}, dt);
  bil.c.leftCols(3).setIdentity();
  sys.analytic_bilinear = bil;
  sys.cost_roots = sys.lifting;
  sys.default_weights = {1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0};
  return sys;
}

// double integrator x1+ = x1 + dt x2, x2+ = x2 + dt u
AnalyticSystem MakeLinearLqr(const ParamMap& given, double dt) {
  AnalyticSystem sys;
  sys.name = "linear-lqr";
  sys.n = 2;
  sys.m = 1;
  sys.dt = dt;
  sys.params = MergeParams(sys.name, {}, given);
  MatrixXd a(2, 2);
  a << 1.0, dt, 0.0, 1.0;
  const MatrixXd b = Unit(2, 1, 1, 0, dt);
  sys.step = [a, b](const VectorXd& x, const VectorXd& u, MatrixXd* fx,
                    MatrixXd* fu) {
    if (fx) *fx = a;
    if (fu) *fu = b;
    return VectorXd(a * x + b * u);
  };
  sys.lifting = Dictionary(2, {StateTerm{0}, StateTerm{1}, ConstantTerm{}});
  MatrixXd lifted_a = MatrixXd::Identity(3, 3);
  lifted_a.topLeftCorner(2, 2) = a;
  BilinearModel bil =
      Analytic(sys.lifting, lifted_a, {Unit(3, 3, 1, 2, dt)}, dt);
  bil.c.leftCols(2).setIdentity();
  sys.analytic_bilinear = bil;
  LinearModel lin;
  lin.a = lifted_a;
  lin.b = Unit(3, 1, 1, 0, dt);
  lin.c = bil.c;
  lin.dict = sys.lifting;
  lin.dt = dt;
  sys.analytic_linear = lin;
  sys.cost_roots = Dictionary::Identity(2);
  sys.default_weights = {1.0, 1.0, 1.0};
  return sys;
}

}  // namespace

QuadraticCost AnalyticSystem::Cost(const std::vector<double>& weights) const {
  return WeightedBasisCost(cost_roots, weights, m);
}

std::vector<std::string> SystemNames() {
  return {"example1", "example2", "unicycle", "linear-lqr"};
}

AnalyticSystem MakeSystem(const std::string& name, const ParamMap& params,
                          double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    Fail(ErrorKind::kInvalidInput, "dt must be positive");
  }
  if (name == "example1") return MakeExample1(params, dt);
  if (name == "example2") return MakeExample2(params, dt);
  if (name == "unicycle") return MakeUnicycle(params, dt);
  if (name == "linear-lqr") return MakeLinearLqr(params, dt);
  Fail(ErrorKind::kInvalidInput, "unknown system '" + name + "'");
}

ParamMap ParseParams(const std::string& text) {
  ParamMap out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      Fail(ErrorKind::kUsage, "bad parameter '" + item + "', want key=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      size_t used = 0;
      out[key] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      Fail(ErrorKind::kUsage, "bad value for parameter " + key);
    }
  }
  return out;
}

Dictionary NamedDictionary(const std::string& name) {
  return MakeSystem(name).lifting;
}

double AnalyticLiftCheck(const AnalyticSystem& sys,
                         const Eigen::Ref<const MatrixXd>& x,
                         const Eigen::Ref<const MatrixXd>& u) {
  if (!sys.analytic_bilinear) {
    Fail(ErrorKind::kInvalidInput, sys.name + " has no analytic bilinear form");
  }
  CheckDims(x.cols() == u.cols() && x.rows() == sys.n && u.rows() == sys.m,
            "lift check samples have the wrong shape");
  const BilinearModel& model = *sys.analytic_bilinear;
  double worst = 0.0;
  for (int s = 0; s < x.cols(); s++) {
    const VectorXd xs = x.col(s);
    const VectorXd us = u.col(s);
    const VectorXd exact = Lift(sys.lifting, sys.Step(xs, us));
    const VectorXd approx = model.StepLifted(Lift(sys.lifting, xs), us);
    worst = std::max(worst, (exact - approx).norm());
  }
  return worst;
}

QuadraticCost TrueLiftedCost(const AnalyticSystem& sys,
                             const std::vector<double>& weights) {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  MatrixXd samples(sys.n, 200);
  for (int j = 0; j < samples.cols(); j++) {
    for (int i = 0; i < sys.n; i++) samples(i, j) = dist(rng);
  }
  return ExpressInLifting(sys.Cost(weights), sys.lifting, samples);
}

std::optional<std::string> CheckSamplingTime(double dt) {
  if (!(dt > 0.0) || !(dt < 1.0)) {
    Fail(ErrorKind::kInvalidInput, "dt must lie in (0, 1)");
  }
  if (dt >= 0.1) {
    return "dt = " + std::to_string(dt) +
           " is large; dt^2 terms of the discretization are not negligible";
  }
  return std::nullopt;
}

}  // namespace kbilqr
