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

#include "kbilqr/edmdc.h"

#include <cmath>
#include <string>

#include <Eigen/SVD>

namespace kbilqr {

MatrixXd Pinv(const Eigen::Ref<const MatrixXd>& mat, double rel_tol) {
  if (mat.size() == 0) return MatrixXd::Zero(mat.cols(), mat.rows());
  Eigen::JacobiSVD<MatrixXd> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sigma = svd.singularValues();
  const double cutoff = rel_tol * sigma[0];
  VectorXd inv = VectorXd::Zero(sigma.size());
  for (int i = 0; i < sigma.size(); i++) {
    if (sigma[i] > cutoff && sigma[i] > 0.0) inv[i] = 1.0 / sigma[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

VectorXd BilinearModel::StepLifted(const Eigen::Ref<const VectorXd>& z,
                                   const Eigen::Ref<const VectorXd>& u) const {
  VectorXd next = a * z;
  for (int i = 0; i < ControlDim(); i++) next += u[i] * (b[i] * z);
  return next;
}

MatrixXd BilinearModel::ContinuousA() const {
  return (a - MatrixXd::Identity(a.rows(), a.cols())) / dt;
}

MatrixXd BilinearModel::ContinuousB(int i) const { return b[i] / dt; }

VectorXd LinearModel::StepLifted(const Eigen::Ref<const VectorXd>& z,
                                 const Eigen::Ref<const VectorXd>& u) const {
  return a * z + b * u;
}

MatrixXd BilinearRegressor(const Eigen::Ref<const MatrixXd>& z,
                           const Eigen::Ref<const MatrixXd>& u) {
  CheckDims(z.cols() == u.cols(), "regressor: z and u column counts differ");
  const int lifted = static_cast<int>(z.rows());
  const int m = static_cast<int>(u.rows());
  MatrixXd reg(lifted * (1 + m), z.cols());
  reg.topRows(lifted) = z;
  for (int i = 0; i < m; i++) {
    // Z .* (1_N U_i)
    reg.middleRows(lifted * (1 + i), lifted) =
        z.array().rowwise() * u.row(i).array();
  }
  return reg;
}

namespace {

double SampleResidual(const MatrixXd& y, const MatrixXd& fit) {
  return (y - fit).norm() / std::sqrt(static_cast<double>(y.cols()));
}

std::vector<std::string> FitWarnings(const Dictionary& dict, int samples,
                                     int unknowns_per_row) {
  std::vector<std::string> warnings;
  if (samples < unknowns_per_row) {
    warnings.push_back("underdetermined regression: " + std::to_string(samples) +
                       " samples < " + std::to_string(unknowns_per_row) +
                       " unknowns per lifted row");
  }
  if (!dict.HasConstant()) {
    warnings.push_back(
        "dictionary has no constant term; additive control inputs cannot be "
        "represented by a separable bilinear lift");
  }
  return warnings;
}

void CheckRegressorRank(const MatrixXd& reg) {
  if (reg.size() == 0 || reg.cwiseAbs().maxCoeff() == 0.0) {
    Fail(ErrorKind::kDegenerateData, "regressor matrix has rank 0");
  }
}

}  // namespace

BilinearModel FitBilinear(const LiftedBatch& lifted, const Dictionary& dict,
                          double dt, const FitOptions& options) {
  if (!(dt > 0.0)) Fail(ErrorKind::kInvalidInput, "dt must be positive");
  const int lifted_dim = dict.LiftedDim();
  const int m = static_cast<int>(lifted.u.rows());
  CheckDims(lifted.z.rows() == lifted_dim, "lifted batch/dictionary mismatch");

  const MatrixXd reg = BilinearRegressor(lifted.z, lifted.u);
  CheckRegressorRank(reg);
  const MatrixXd coeffs = lifted.y * Pinv(reg, options.pinv_rel_tol);

  BilinearModel model;
  model.dict = dict;
  model.dt = dt;
  model.a = coeffs.leftCols(lifted_dim);
  for (int i = 0; i < m; i++) {
    model.b.push_back(coeffs.middleCols(lifted_dim * (1 + i), lifted_dim));
  }
  model.c = FitDecoder(lifted, options);
  model.residual = SampleResidual(lifted.y, coeffs * reg);
  model.warnings = FitWarnings(dict, static_cast<int>(reg.cols()),
                               static_cast<int>(reg.rows()));
  return model;
}

BilinearModel FitBilinear(const TrajectoryBatch& data, const Dictionary& dict,
                          const FitOptions& options) {
  return FitBilinear(LiftBatch(dict, data), dict, data.dt, options);
}

LinearModel FitLinear(const TrajectoryBatch& data, const Dictionary& dict,
                      const FitOptions& options) {
  if (!(data.dt > 0.0)) Fail(ErrorKind::kInvalidInput, "dt must be positive");
  const LiftedBatch lifted = LiftBatch(dict, data);
  const int lifted_dim = dict.LiftedDim();
  MatrixXd reg(lifted_dim + lifted.u.rows(), lifted.z.cols());
  reg << lifted.z, lifted.u;
  CheckRegressorRank(reg);
  const MatrixXd coeffs = lifted.y * Pinv(reg, options.pinv_rel_tol);

  LinearModel model;
  model.dict = dict;
  model.dt = data.dt;
  model.a = coeffs.leftCols(lifted_dim);
  model.b = coeffs.rightCols(lifted.u.rows());
  model.c = FitDecoder(lifted, options);
  model.residual = SampleResidual(lifted.y, coeffs * reg);
  model.warnings = FitWarnings(dict, static_cast<int>(reg.cols()),
                               static_cast<int>(reg.rows()));
  return model;
}

MatrixXd FitDecoder(const LiftedBatch& lifted, const FitOptions& options) {
  if (lifted.z.cols() == 0) Fail(ErrorKind::kDegenerateData, "no samples");
  CheckRegressorRank(lifted.z);
  return lifted.x * Pinv(lifted.z, options.pinv_rel_tol);
}

MatrixXd FitDecoder(const TrajectoryBatch& data, const Dictionary& dict,
                    const FitOptions& options) {
  return FitDecoder(LiftBatch(dict, data), options);
}

double BilinearResidual(const BilinearModel& model, const LiftedBatch& lifted) {
  MatrixXd pred(lifted.y.rows(), lifted.y.cols());
  for (int k = 0; k < lifted.z.cols(); k++) {
    pred.col(k) = model.StepLifted(lifted.z.col(k), lifted.u.col(k));
  }
  return SampleResidual(lifted.y, pred);
}

double LinearResidual(const LinearModel& model, const LiftedBatch& lifted) {
  return SampleResidual(lifted.y, model.a * lifted.z + model.b * lifted.u);
}

}  // namespace kbilqr
