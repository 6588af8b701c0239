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

#include "kbilqr/bilqr.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace kbilqr {

MatrixXd DuplicationMatrix(int dim) {
  if (dim < 1) Fail(ErrorKind::kInvalidInput, "duplication matrix needs N >= 1");
  MatrixXd d = MatrixXd::Zero(dim * dim, dim * (dim + 1) / 2);
  int h = 0;
  for (int j = 0; j < dim; j++) {
    for (int i = j; i < dim; i++, h++) {
      d(i + j * dim, h) = 1.0;
      d(j + i * dim, h) = 1.0;
    }
  }
  return d;
}

VectorXd Vech(const Eigen::Ref<const MatrixXd>& s) {
  CheckDims(s.rows() == s.cols(), "vech needs a square matrix");
  const int dim = static_cast<int>(s.rows());
  const MatrixXd sym = 0.5 * (s + s.transpose());
  VectorXd v(dim * (dim + 1) / 2);
  int h = 0;
  for (int j = 0; j < dim; j++) {
    for (int i = j; i < dim; i++) v[h++] = sym(i, j);
  }
  return v;
}

int DimFromVechLength(int length) {
  const int dim = static_cast<int>(
      std::lround((std::sqrt(8.0 * length + 1.0) - 1.0) / 2.0));
  CheckDims(dim * (dim + 1) / 2 == length,
            "length " + std::to_string(length) + " is not triangular");
  return dim;
}

MatrixXd Unvech(const Eigen::Ref<const VectorXd>& v) {
  const int dim = DimFromVechLength(static_cast<int>(v.size()));
  MatrixXd s(dim, dim);
  int h = 0;
  for (int j = 0; j < dim; j++) {
    for (int i = j; i < dim; i++, h++) {
      s(i, j) = v[h];
      s(j, i) = v[h];
    }
  }
  return s;
}

MatrixXd BuildOAB(const BilinearModel& model,
                  const Eigen::Ref<const VectorXd>& u) {
  CheckDims(u.size() == model.ControlDim(), "O_AB: control dimension");
  MatrixXd o = model.a;
  for (int i = 0; i < model.ControlDim(); i++) o += u[i] * model.b[i];
  return o;
}

MatrixXd BuildOB(const BilinearModel& model,
                 const Eigen::Ref<const VectorXd>& z) {
  CheckDims(z.size() == model.LiftedDim(), "O_B: lifted dimension");
  MatrixXd o(model.LiftedDim(), model.ControlDim());
  for (int i = 0; i < model.ControlDim(); i++) o.col(i) = model.b[i] * z;
  return o;
}

LiftedTrajectory ExtractTrajectory(const LiftedBatch& batch, int trajectory) {
  const int c0 = batch.FirstColumn(trajectory);
  return {batch.z.middleCols(c0, batch.horizon),
          batch.u.middleCols(c0, batch.horizon)};
}

CostateSequence CostateBackward(const BilinearModel& model,
                                const Eigen::Ref<const MatrixXd>& q,
                                const LiftedTrajectory& traj) {
  const int horizon = traj.Horizon();
  const int lifted = model.LiftedDim();
  CheckDims(horizon >= 2, "costate recursion needs T >= 2");
  CheckDims(traj.z.cols() >= horizon && traj.z.rows() == lifted,
            "costate recursion: lifted states");
  CheckDims(q.rows() == lifted && q.cols() == lifted, "costate: Q shape");
  CostateSequence out;
  out.lambda = MatrixXd::Zero(lifted, horizon);
  // lambda_T = 0 sits in the last column
  for (int k = horizon - 1; k >= 1; k--) {
    out.lambda.col(k - 1) =
        q * traj.z.col(k) +
        BuildOAB(model, traj.u.col(k)).transpose() * out.lambda.col(k);
  }
  return out;
}

MatrixXd BuildScriptAi(const BilinearModel& model,
                       const LiftedTrajectory& traj) {
  const int horizon = traj.Horizon();
  const int lifted = model.LiftedDim();
  const int m = model.ControlDim();
  CheckDims(horizon >= 2, "script A needs T >= 2");
  CheckDims(traj.z.rows() == lifted && traj.z.cols() >= horizon,
            "script A: lifted states");
  CheckDims(traj.u.rows() == m, "script A: control dimension");

  std::vector<MatrixXd> oab_t(horizon);
  std::vector<MatrixXd> ob_t(horizon);
  for (int k = 0; k < horizon; k++) {
    oab_t[k] = BuildOAB(model, traj.u.col(k)).transpose();
    ob_t[k] = BuildOB(model, traj.z.col(k)).transpose();
  }

  MatrixXd out = MatrixXd::Zero((horizon - 1) * m, lifted * lifted);
  for (int r = 0; r + 1 < horizon; r++) {
    auto block = out.middleRows(r * m, m);
    // g = O_B_r' O_AB_{r+1}' ... O_AB_{j-1}'
    MatrixXd g = ob_t[r];
    for (int j = r + 1; j < horizon; j++) {
      for (int c = 0; c < lifted; c++) {
        block.middleCols(c * lifted, lifted) += traj.z(c, j) * g;
      }
      if (j + 1 < horizon) g = g * oab_t[j];
    }
  }
  return out;
}

MatrixXd BuildScriptA(const BilinearModel& model, const LiftedBatch& batch) {
  CheckDims(batch.z.rows() == model.LiftedDim(), "script A: batch lifting");
  CheckDims(batch.u.rows() == model.ControlDim(), "script A: batch controls");
  CheckDims(batch.z.cols() == batch.num_trajectories * batch.horizon,
            "script A: ragged batch");
  const int rows_each = (batch.horizon - 1) * model.ControlDim();
  const int lifted = model.LiftedDim();
  MatrixXd out(batch.num_trajectories * rows_each, lifted * lifted);
  for (int i = 0; i < batch.num_trajectories; i++) {
    out.middleRows(i * rows_each, rows_each) =
        BuildScriptAi(model, ExtractTrajectory(batch, i));
  }
  return out;
}

MatrixXd BuildScriptALinear(const Eigen::Ref<const MatrixXd>& a,
                            const Eigen::Ref<const MatrixXd>& b,
                            const LiftedBatch& batch) {
  const int lifted = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.cols());
  const int horizon = batch.horizon;
  CheckDims(a.cols() == lifted && b.rows() == lifted, "linear script A: A/B");
  CheckDims(batch.z.rows() == lifted && batch.u.rows() == m,
            "linear script A: batch dimensions");
  CheckDims(batch.z.cols() == batch.num_trajectories * horizon,
            "linear script A: ragged batch");
  CheckDims(horizon >= 2, "linear script A needs T >= 2");

  // powers[p] = B' (A')^p
  std::vector<MatrixXd> powers(horizon - 1);
  powers[0] = b.transpose();
  for (int p = 1; p < horizon - 1; p++) {
    powers[p] = powers[p - 1] * a.transpose();
  }

  const int rows_each = (horizon - 1) * m;
  MatrixXd out =
      MatrixXd::Zero(batch.num_trajectories * rows_each, lifted * lifted);
  for (int i = 0; i < batch.num_trajectories; i++) {
    const int c0 = batch.FirstColumn(i);
    for (int r = 0; r + 1 < horizon; r++) {
      auto block = out.block(i * rows_each + r * m, 0, m, lifted * lifted);
      for (int j = r + 1; j < horizon; j++) {
        for (int c = 0; c < lifted; c++) {
          block.middleCols(c * lifted, lifted) +=
              batch.z(c, c0 + j) * powers[j - 1 - r];
        }
      }
    }
  }
  return out;
}

MatrixXd FoldDuplication(const Eigen::Ref<const MatrixXd>& script_a) {
  const int dim = static_cast<int>(std::lround(std::sqrt(script_a.cols())));
  CheckDims(dim * dim == script_a.cols(), "script A must have N^2 columns");
  MatrixXd out(script_a.rows(), dim * (dim + 1) / 2);
  int h = 0;
  for (int j = 0; j < dim; j++) {
    for (int i = j; i < dim; i++, h++) {
      out.col(h) = script_a.col(i + j * dim);
      if (i != j) out.col(h) += script_a.col(j + i * dim);
    }
  }
  return out;
}

VectorXd StackControls(const LiftedBatch& batch,
                       const Eigen::Ref<const MatrixXd>& r) {
  const int m = static_cast<int>(batch.u.rows());
  CheckDims(r.rows() == m && r.cols() == m, "R must be m x m");
  const int rows_each = (batch.horizon - 1) * m;
  VectorXd out(batch.num_trajectories * rows_each);
  for (int i = 0; i < batch.num_trajectories; i++) {
    const int c0 = batch.FirstColumn(i);
    for (int k = 0; k + 1 < batch.horizon; k++) {
      out.segment(i * rows_each + k * m, m) = r * batch.u.col(c0 + k);
    }
  }
  return out;
}

namespace {

void ProjectPsd(CostEstimate* est) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(est->q);
  const VectorXd values = eig.eigenvalues();
  if (values.minCoeff() >= 0.0) return;
  est->warnings.push_back("recovered Q had negative eigenvalue " +
                          std::to_string(values.minCoeff()) +
                          "; clipped to the PSD cone");
  const MatrixXd v = eig.eigenvectors();
  const MatrixXd clipped = v * values.cwiseMax(0.0).asDiagonal() * v.transpose();
  est->q = Unvech(Vech(clipped));
}

}  // namespace

CostEstimate SolveQ(const Eigen::Ref<const MatrixXd>& script_a,
                    const Eigen::Ref<const VectorXd>& u_stack,
                    const IocOptions& options) {
  if (script_a.rows() == 0 || u_stack.size() == 0) {
    Fail(ErrorKind::kDegenerateData, "inverse LQR: no equations");
  }
  CheckDims(script_a.rows() == u_stack.size(),
            "script A and control stack are not row-aligned");
  const MatrixXd ad = FoldDuplication(script_a);
  const int cols = static_cast<int>(ad.cols());
  const int rows = static_cast<int>(ad.rows());

  Eigen::JacobiSVD<MatrixXd> svd(ad, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const VectorXd& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;
  if (!(sigma_max > 0.0)) {
    Fail(ErrorKind::kDegenerateData, "script A D has rank 0");
  }

  // minimum-norm least squares
  const VectorXd rhs = -u_stack;
  const VectorXd utb = svd.matrixU().transpose() * rhs;
  VectorXd vech_q = VectorXd::Zero(cols);
  for (int i = 0; i < sigma.size(); i++) {
    if (sigma[i] > options.pinv_rel_tol * sigma_max) {
      vech_q += (utb[i] / sigma[i]) * svd.matrixV().col(i);
    }
  }

  CostEstimate est;
  est.q = Unvech(vech_q);
  est.r = options.r;

  IocDiagnostics& diag = est.diagnostics;
  diag.rows = rows;
  diag.equations = rows;
  diag.cols = cols;
  int rank = 0;
  for (int i = 0; i < sigma.size(); i++) {
    if (sigma[i] > options.rank_rel_tol * sigma_max) rank++;
  }
  diag.numerical_rank = rank;
  diag.condition_number = sigma_max / sigma[rank - 1];
  diag.lemma5_satisfied = rows >= cols && rank == cols;
  diag.nullspace_basis = svd.matrixV().rightCols(cols - rank);

  if (options.psd_project) {
    ProjectPsd(&est);
    vech_q = Vech(est.q);
  }
  est.ls_residual = (rhs - ad * vech_q).norm();
  return est;
}

MatrixXd VanishingQuadraticForms(const Eigen::Ref<const MatrixXd>& z,
                                 double rel_tol) {
  const int lifted = static_cast<int>(z.rows());
  const int cols = lifted * (lifted + 1) / 2;
  MatrixXd w(z.cols(), cols);
  for (int k = 0; k < z.cols(); k++) {
    int c = 0;
    for (int j = 0; j < lifted; j++) {
      for (int i = j; i < lifted; i++) {
        w(k, c++) = (i == j ? 1.0 : 2.0) * z(i, k) * z(j, k);
      }
    }
  }
  if (w.rows() == 0) return MatrixXd::Identity(cols, cols);
  Eigen::JacobiSVD<MatrixXd> svd(w, Eigen::ComputeFullV);
  const VectorXd& sigma = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sigma.size(); i++) {
    if (sigma[i] > rel_tol * sigma[0]) rank++;
  }
  return svd.matrixV().rightCols(cols - rank);
}

std::vector<int> DetectUnactuated(const BilinearModel& model, double tol) {
  const int lifted = model.LiftedDim();
  double b_norm2 = 0.0;
  for (const MatrixXd& b : model.b) b_norm2 += b.squaredNorm();
  const double threshold = tol * std::sqrt(b_norm2);
  std::vector<int> out;
  for (int j = 0; j < lifted; j++) {
    if (j < model.dict.LiftedDim() && model.dict.IsConstant(j)) continue;
    double row_max = 0.0;
    for (const MatrixXd& b : model.b) row_max = std::max(row_max, b.row(j).norm());
    if (row_max <= threshold) out.push_back(j);
  }
  return out;
}

bool CheckTerminalStateRank(const LiftedBatch& batch, double rank_rel_tol) {
  const int lifted = static_cast<int>(batch.z.rows());
  if (batch.horizon < lifted + 2) return false;
  if (batch.num_trajectories < lifted) return false;
  MatrixXd terminal(lifted, batch.num_trajectories);
  for (int i = 0; i < batch.num_trajectories; i++) {
    terminal.col(i) = batch.z.col(batch.FirstColumn(i) + batch.horizon - 1);
  }
  Eigen::JacobiSVD<MatrixXd> svd(terminal);
  const VectorXd& sigma = svd.singularValues();
  if (!(sigma[0] > 0.0)) return false;
  int rank = 0;
  for (int i = 0; i < sigma.size(); i++) {
    if (sigma[i] > rank_rel_tol * sigma[0]) rank++;
  }
  return rank == lifted;
}

namespace {

MatrixXd ResolveR(const IocOptions& options, int m) {
  if (options.r.size() == 0) return MatrixXd::Identity(m, m);
  CheckDims(options.r.rows() == m && options.r.cols() == m, "R must be m x m");
  return options.r;
}

// removes the components of vech(Q) along exact null directions and along
// quadratic forms that vanish on every observed lifted state, then
// re-applies the optional PSD projection
void Canonicalize(const MatrixXd& ad, const VectorXd& rhs,
                  const LiftedBatch& batch, const IocOptions& options,
                  CostEstimate& est) {
  if (options.canonicalize) {
    const MatrixXd vanishing =
        VanishingQuadraticForms(batch.z, options.rank_rel_tol);
    est.diagnostics.data_null_dim = static_cast<int>(vanishing.cols());
    if (vanishing.cols() > 0) {
      MatrixXd span(ad.cols(),
                    est.diagnostics.nullspace_basis.cols() + vanishing.cols());
      span << est.diagnostics.nullspace_basis, vanishing;
      Eigen::JacobiSVD<MatrixXd> svd(span, Eigen::ComputeThinU);
      const VectorXd& sigma = svd.singularValues();
      int rank = 0;
      for (int i = 0; i < sigma.size(); i++) {
        if (sigma[i] > 1e-8 * sigma[0]) rank++;
      }
      const MatrixXd basis = svd.matrixU().leftCols(rank);
      VectorXd v = Vech(est.q);
      v -= basis * (basis.transpose() * v);
      est.q = Unvech(v);
      est.warnings.push_back(
          std::to_string(vanishing.cols()) +
          " quadratic form(s) vanish on the observed lifted states; Q is "
          "reported as the minimum-norm representative of its class");
    }
  }
  if (options.psd_project) ProjectPsd(&est);
  est.ls_residual = (rhs - ad * Vech(est.q)).norm();
}

void FinishDiagnostics(const LiftedBatch& batch, const IocOptions& options,
                       std::vector<int> unactuated, CostEstimate& est) {
  IocDiagnostics& diag = est.diagnostics;
  const int m = static_cast<int>(batch.u.rows());
  diag.rows = batch.num_trajectories * std::max(batch.horizon - 2, 0) * m;
  diag.lemma5_satisfied =
      diag.rows >= diag.cols && diag.numerical_rank == diag.cols;
  est.diagnostics.lemma6_satisfied =
      CheckTerminalStateRank(batch, options.rank_rel_tol);
  est.diagnostics.unactuated_modes = std::move(unactuated);
  if (!est.diagnostics.unactuated_modes.empty()) {
    std::string list;
    for (int j : est.diagnostics.unactuated_modes) {
      list += (list.empty() ? "" : ",") + std::to_string(j);
    }
    est.warnings.push_back("unactuated lifted coordinates {" + list +
                           "}: their cost terms cannot be identified");
  }
  if (diag.numerical_rank < diag.cols) {
    est.warnings.push_back("stacked system is rank deficient (" +
                           std::to_string(diag.numerical_rank) + " of " +
                           std::to_string(diag.cols) +
                           "); minimum-norm Q returned");
  } else if (!diag.lemma5_satisfied) {
    est.warnings.push_back("row count " + std::to_string(diag.rows) +
                           " is below " + std::to_string(diag.cols) +
                           "; identifiability is not guaranteed");
  }
}

}  // namespace

CostEstimate InverseBiLqr(const BilinearModel& model, const LiftedBatch& batch,
                          const IocOptions& options) {
  CheckDims(batch.z.rows() == model.LiftedDim(),
            "model lifted dimension does not match data");
  CheckDims(batch.u.rows() == model.ControlDim(),
            "model control dimension does not match data");
  const MatrixXd r = ResolveR(options, model.ControlDim());
  IocOptions opts = options;
  opts.r = r;
  opts.psd_project = false;
  const MatrixXd script_a = BuildScriptA(model, batch);
  const VectorXd u_stack = StackControls(batch, r);
  CostEstimate est = SolveQ(script_a, u_stack, opts);
  opts.psd_project = options.psd_project;
  Canonicalize(FoldDuplication(script_a), -u_stack, batch, opts, est);
  FinishDiagnostics(batch, opts, DetectUnactuated(model, opts.unactuated_tol),
                    est);
  return est;
}

CostEstimate InverseLqr(const LinearModel& model, const LiftedBatch& batch,
                        const IocOptions& options) {
  CheckDims(batch.z.rows() == model.LiftedDim(),
            "model lifted dimension does not match data");
  CheckDims(batch.u.rows() == model.ControlDim(),
            "model control dimension does not match data");
  const MatrixXd r = ResolveR(options, model.ControlDim());
  IocOptions opts = options;
  opts.r = r;
  opts.psd_project = false;
  const MatrixXd script_a = BuildScriptALinear(model.a, model.b, batch);
  const VectorXd u_stack = StackControls(batch, r);
  CostEstimate est = SolveQ(script_a, u_stack, opts);
  opts.psd_project = options.psd_project;
  Canonicalize(FoldDuplication(script_a), -u_stack, batch, opts, est);
  // a lifted coordinate is unactuated when its row of B vanishes
  std::vector<int> unactuated;
  const double threshold = opts.unactuated_tol * model.b.norm();
  for (int j = 0; j < model.LiftedDim(); j++) {
    if (model.dict.IsConstant(j)) continue;
    if (model.b.row(j).norm() <= threshold) unactuated.push_back(j);
  }
  FinishDiagnostics(batch, opts, std::move(unactuated), est);
  return est;
}

}  // namespace kbilqr
