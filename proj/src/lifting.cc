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

#include "kbilqr/lifting.h"

#include <cmath>
#include <string>
#include <type_traits>

namespace kbilqr {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void ValidateExponents(const std::vector<int>& exponents, int state_dim) {
  if (static_cast<int>(exponents.size()) != state_dim) {
    Fail(ErrorKind::kInvalidInput,
         "monomial exponents must have one entry per state coordinate");
  }
  for (int e : exponents) {
    if (e < 0) Fail(ErrorKind::kInvalidInput, "negative monomial exponent");
  }
}

void ValidateCoordinate(int coordinate, int state_dim) {
  if (coordinate < 0 || coordinate >= state_dim) {
    Fail(ErrorKind::kInvalidInput,
         "term references coordinate " + std::to_string(coordinate) +
             " outside state dimension " + std::to_string(state_dim));
  }
}

double Monomial(const std::vector<int>& exponents,
                const Eigen::Ref<const VectorXd>& x) {
  double value = 1.0;
  for (int j = 0; j < x.size(); j++) {
    if (exponents[j] > 0) value *= std::pow(x[j], exponents[j]);
  }
  return value;
}

// d/dx of a monomial, accumulated into row with a scale
using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

void AddMonomialGradient(const std::vector<int>& exponents, double scale,
                         const Eigen::Ref<const VectorXd>& x, RowRef row) {
  const int n = static_cast<int>(x.size());
  for (int j = 0; j < n; j++) {
    if (exponents[j] == 0) continue;
    double d = exponents[j] * std::pow(x[j], exponents[j] - 1);
    for (int i = 0; i < n; i++) {
      if (i != j && exponents[i] > 0) d *= std::pow(x[i], exponents[i]);
    }
    row[j] += scale * d;
  }
}

void CheckFinite(const Eigen::Ref<const VectorXd>& x, int state_dim) {
  if (x.size() != state_dim) {
    Fail(ErrorKind::kDimensionMismatch,
         "state has " + std::to_string(x.size()) + " entries, dictionary "
             "expects " + std::to_string(state_dim));
  }
  if (!x.allFinite()) Fail(ErrorKind::kInvalidInput, "non-finite state");
}

}  // namespace

Dictionary::Dictionary(int state_dim, std::vector<Term> terms)
    : state_dim_(state_dim), terms_(std::move(terms)) {
  if (state_dim_ < 1) Fail(ErrorKind::kInvalidInput, "state dimension < 1");
  if (terms_.empty()) Fail(ErrorKind::kInvalidInput, "empty dictionary");
  for (const Term& term : terms_) {
    std::visit(
        Overloaded{
            [&](const StateTerm& t) { ValidateCoordinate(t.coordinate, state_dim_); },
            [&](const MonomialTerm& t) { ValidateExponents(t.exponents, state_dim_); },
            [&](const PolynomialTerm& t) {
              if (t.exponents.empty() ||
                  t.exponents.size() != t.coefficients.size()) {
                Fail(ErrorKind::kInvalidInput,
                     "polynomial needs one coefficient per monomial");
              }
              for (const auto& e : t.exponents) ValidateExponents(e, state_dim_);
            },
            [&](const TrigTerm& t) { ValidateCoordinate(t.coordinate, state_dim_); },
            [&](const RbfTerm& t) {
              if (t.center.size() != state_dim_) {
                Fail(ErrorKind::kInvalidInput, "rbf center has wrong length");
              }
              if (!(t.width > 0.0) || !std::isfinite(t.width)) {
                Fail(ErrorKind::kInvalidInput, "rbf width must be positive");
              }
            },
            [](const ConstantTerm&) {},
        },
        term);
  }
}

Dictionary Dictionary::Identity(int state_dim) {
  std::vector<Term> terms;
  for (int i = 0; i < state_dim; i++) terms.push_back(StateTerm{i});
  return Dictionary(state_dim, std::move(terms));
}

bool Dictionary::HasConstant() const {
  for (int i = 0; i < LiftedDim(); i++) {
    if (IsConstant(i)) return true;
  }
  return false;
}

bool Dictionary::IsConstant(int i) const {
  return std::holds_alternative<ConstantTerm>(terms_[i]);
}

bool Dictionary::LeadsWithState() const {
  if (LiftedDim() < state_dim_) return false;
  for (int j = 0; j < state_dim_; j++) {
    const auto* t = std::get_if<StateTerm>(&terms_[j]);
    if (t == nullptr || t->coordinate != j) return false;
  }
  return true;
}

namespace {

bool TermEqual(const Term& a, const Term& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      Overloaded{
          [&](const StateTerm& t) {
            return t.coordinate == std::get<StateTerm>(b).coordinate;
          },
          [&](const MonomialTerm& t) {
            return t.exponents == std::get<MonomialTerm>(b).exponents;
          },
          [&](const PolynomialTerm& t) {
            const auto& o = std::get<PolynomialTerm>(b);
            return t.exponents == o.exponents &&
                   t.coefficients == o.coefficients;
          },
          [&](const TrigTerm& t) {
            const auto& o = std::get<TrigTerm>(b);
            return t.function == o.function && t.coordinate == o.coordinate;
          },
          [&](const RbfTerm& t) {
            const auto& o = std::get<RbfTerm>(b);
            return t.width == o.width && t.center == o.center;
          },
          [](const ConstantTerm&) { return true; },
      },
      a);
}

}  // namespace

bool operator==(const Dictionary& a, const Dictionary& b) {
  if (a.StateDim() != b.StateDim() || a.LiftedDim() != b.LiftedDim()) {
    return false;
  }
  for (int i = 0; i < a.LiftedDim(); i++) {
    if (!TermEqual(a.terms()[i], b.terms()[i])) return false;
  }
  return true;
}

VectorXd Lift(const Dictionary& dict, const Eigen::Ref<const VectorXd>& x) {
  CheckFinite(x, dict.StateDim());
  VectorXd z(dict.LiftedDim());
  for (int i = 0; i < dict.LiftedDim(); i++) {
    z[i] = std::visit(
        Overloaded{
            [&](const StateTerm& t) { return x[t.coordinate]; },
            [&](const MonomialTerm& t) { return Monomial(t.exponents, x); },
            [&](const PolynomialTerm& t) {
              double v = 0.0;
              for (size_t k = 0; k < t.exponents.size(); k++) {
                v += t.coefficients[k] * Monomial(t.exponents[k], x);
              }
              return v;
            },
            [&](const TrigTerm& t) {
              return t.function == TrigFunction::kSin
                         ? std::sin(x[t.coordinate])
                         : std::cos(x[t.coordinate]);
            },
            [&](const RbfTerm& t) {
              return std::exp(-(x - t.center).squaredNorm() /
                              (t.width * t.width));
            },
            [](const ConstantTerm&) { return 1.0; },
        },
        dict.terms()[i]);
  }
  return z;
}

MatrixXd LiftJacobian(const Dictionary& dict,
                      const Eigen::Ref<const VectorXd>& x) {
  CheckFinite(x, dict.StateDim());
  MatrixXd jac = MatrixXd::Zero(dict.LiftedDim(), dict.StateDim());
  for (int i = 0; i < dict.LiftedDim(); i++) {
    auto row = jac.row(i);
    std::visit(
        Overloaded{
            [&](const StateTerm& t) { row[t.coordinate] = 1.0; },
            [&](const MonomialTerm& t) {
              AddMonomialGradient(t.exponents, 1.0, x, row);
            },
            [&](const PolynomialTerm& t) {
              for (size_t k = 0; k < t.exponents.size(); k++) {
                AddMonomialGradient(t.exponents[k], t.coefficients[k], x, row);
              }
            },
            [&](const TrigTerm& t) {
              row[t.coordinate] = t.function == TrigFunction::kSin
                                      ? std::cos(x[t.coordinate])
                                      : -std::sin(x[t.coordinate]);
            },
            [&](const RbfTerm& t) {
              const double w2 = t.width * t.width;
              const double value = std::exp(-(x - t.center).squaredNorm() / w2);
              row = (-2.0 * value / w2) * (x - t.center).transpose();
            },
            [](const ConstantTerm&) {},
        },
        dict.terms()[i]);
  }
  return jac;
}

MatrixXd LiftColumns(const Dictionary& dict,
                     const Eigen::Ref<const MatrixXd>& x) {
  MatrixXd z(dict.LiftedDim(), x.cols());
  for (int k = 0; k < x.cols(); k++) z.col(k) = Lift(dict, x.col(k));
  return z;
}

LiftedBatch LiftBatch(const Dictionary& dict, const TrajectoryBatch& data) {
  const int horizon = data.Horizon();
  const int n = data.StateDim();
  const int m = data.ControlDim();
  CheckDims(n == dict.StateDim(),
            "data state dimension " + std::to_string(n) +
                " does not match dictionary dimension " +
                std::to_string(dict.StateDim()));
  const int num = data.Size();
  const int cols = num * horizon;

  LiftedBatch out;
  out.num_trajectories = num;
  out.horizon = horizon;
  out.z.resize(dict.LiftedDim(), cols);
  out.y.resize(dict.LiftedDim(), cols);
  out.u.resize(m, cols);
  out.x.resize(n, cols);
  out.layout.reserve(cols);
  for (int i = 0; i < num; i++) {
    const Trajectory& t = data.trajectories[i];
    // lift every state once; columns 0..T-1 feed z, 1..T feed y
    const MatrixXd lifted = LiftColumns(dict, t.states);
    const int c0 = i * horizon;
    out.z.middleCols(c0, horizon) = lifted.leftCols(horizon);
    out.y.middleCols(c0, horizon) = lifted.rightCols(horizon);
    out.u.middleCols(c0, horizon) = t.controls;
    out.x.middleCols(c0, horizon) = t.states.leftCols(horizon);
    for (int k = 0; k < horizon; k++) out.layout.emplace_back(i, k);
  }
  return out;
}

}  // namespace kbilqr
