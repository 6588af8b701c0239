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

#ifndef KBILQR_LIFTING_H_
#define KBILQR_LIFTING_H_

#include <utility>
#include <variant>
#include <vector>

#include "kbilqr/common.h"
#include "kbilqr/trajectory.h"

namespace kbilqr {

// observable terms; every term depends on the state only
struct StateTerm {
  int coordinate = 0;
};

struct MonomialTerm {
  std::vector<int> exponents;  // one per state coordinate
};

// sum of weighted monomials, e.g. x2 + x1^2
struct PolynomialTerm {
  std::vector<std::vector<int>> exponents;
  std::vector<double> coefficients;
};

enum class TrigFunction { kSin, kCos };

struct TrigTerm {
  TrigFunction function = TrigFunction::kSin;
  int coordinate = 0;
};

// Gaussian exp(-|x - center|^2 / width^2)
struct RbfTerm {
  VectorXd center;
  double width = 1.0;
};

struct ConstantTerm {};

using Term = std::variant<StateTerm, MonomialTerm, PolynomialTerm, TrigTerm,
                          RbfTerm, ConstantTerm>;

// Ordered observable dictionary theta(x) = [theta_1(x), ..., theta_N(x)].
// Term order is exactly the construction order.
class Dictionary {
 public:
  Dictionary() = default;

  // throws kInvalidInput when a term references a coordinate >= state_dim
  Dictionary(int state_dim, std::vector<Term> terms);

  // theta(x) = x
  static Dictionary Identity(int state_dim);

  int StateDim() const { return state_dim_; }
  int LiftedDim() const { return static_cast<int>(terms_.size()); }
  const std::vector<Term>& terms() const { return terms_; }

  bool HasConstant() const;
  bool IsConstant(int i) const;

  // true when theta_j(x) = x_j for every j < n
  bool LeadsWithState() const;

 private:
  int state_dim_ = 0;
  std::vector<Term> terms_;
};

bool operator==(const Dictionary& a, const Dictionary& b);

VectorXd Lift(const Dictionary& dict, const Eigen::Ref<const VectorXd>& x);

// entry (i, j) = d theta_i / d x_j
MatrixXd LiftJacobian(const Dictionary& dict,
                      const Eigen::Ref<const VectorXd>& x);

// lifts every column of x
MatrixXd LiftColumns(const Dictionary& dict,
                     const Eigen::Ref<const MatrixXd>& x);

// snapshot matrices for the regression; column c of z, y and u belongs to
// (trajectory layout[c].first, time layout[c].second)
struct LiftedBatch {
  MatrixXd z;  // theta(x_k)
  MatrixXd y;  // theta(x_{k+1})
  MatrixXd u;  // u_k
  MatrixXd x;  // x_k (decoder targets)
  std::vector<std::pair<int, int>> layout;
  int num_trajectories = 0;
  int horizon = 0;

  // columns [i*T, (i+1)*T) belong to trajectory i
  int FirstColumn(int trajectory) const { return trajectory * horizon; }
};

LiftedBatch LiftBatch(const Dictionary& dict, const TrajectoryBatch& data);

}  // namespace kbilqr

#endif  // KBILQR_LIFTING_H_
