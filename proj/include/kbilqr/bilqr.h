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

// Inverse bilinear LQR: recovers the lifted state weight Q from optimal
// trajectories of z+ = A z + sum_i u_i B_i z under the stage cost
// 1/2 (z' Q z + u' R u), zero terminal cost.
//
// The costate obeys lambda_T = 0, lambda_k = Q z_k + O_AB_k' lambda_{k+1},
// and stationarity gives R u_k = -O_B_k' lambda_{k+1}. Eliminating the
// costates yields -vec(R u_{0:T-2}) = A(z, u) vec(Q), which is linear in Q.

#ifndef KBILQR_BILQR_H_
#define KBILQR_BILQR_H_

#include <string>
#include <vector>

#include "kbilqr/common.h"
#include "kbilqr/edmdc.h"
#include "kbilqr/lifting.h"

namespace kbilqr {

// 0/1 matrix D with D vech(S) = vec(S) for symmetric S (column-major vec,
// vech stacks the lower triangle column by column)
MatrixXd DuplicationMatrix(int dim);

// symmetrizes first
VectorXd Vech(const Eigen::Ref<const MatrixXd>& s);
MatrixXd Unvech(const Eigen::Ref<const VectorXd>& v);

// half-vectorization length -> matrix dimension; throws if not triangular
int DimFromVechLength(int length);

// O_AB_k = A + sum_i u_i B_i
MatrixXd BuildOAB(const BilinearModel& model,
                  const Eigen::Ref<const VectorXd>& u);

// O_B_k = [B_1 z  ...  B_m z]
MatrixXd BuildOB(const BilinearModel& model,
                 const Eigen::Ref<const VectorXd>& z);

// lifted states z_0..z_{T-1} (at least) and controls u_0..u_{T-1} of one
// trajectory; the stacked equations use u_0..u_{T-2} and z_1..z_{T-1}
struct LiftedTrajectory {
  MatrixXd z;  // N x (>= T)
  MatrixXd u;  // m x T

  int Horizon() const { return static_cast<int>(u.cols()); }
};

LiftedTrajectory ExtractTrajectory(const LiftedBatch& batch, int trajectory);

// costates lambda_1..lambda_T (column k-1 holds lambda_k), lambda_T = 0
struct CostateSequence {
  MatrixXd lambda;

  VectorXd At(int k) const { return lambda.col(k - 1); }
};

CostateSequence CostateBackward(const BilinearModel& model,
                                const Eigen::Ref<const MatrixXd>& q,
                                const LiftedTrajectory& traj);

// (T-1)m x N^2 block for one trajectory; row block r (r = 0..T-2) is
// sum_{j>r} z_j' (x) [O_B_r' O_AB_{r+1}' ... O_AB_{j-1}']
MatrixXd BuildScriptAi(const BilinearModel& model,
                       const LiftedTrajectory& traj);

// vertical stack of the per-trajectory blocks
MatrixXd BuildScriptA(const BilinearModel& model, const LiftedBatch& batch);

// inverse LQR baseline for z+ = A z + B u: row block r is
// sum_{j>r} z_j' (x) B'(A')^{j-1-r}
MatrixXd BuildScriptALinear(const Eigen::Ref<const MatrixXd>& a,
                            const Eigen::Ref<const MatrixXd>& b,
                            const LiftedBatch& batch);

// A D, columns of A folded through the duplication matrix
MatrixXd FoldDuplication(const Eigen::Ref<const MatrixXd>& script_a);

// vec(R u_{0:T-2}) stacked over trajectories, row-aligned with BuildScriptA
VectorXd StackControls(const LiftedBatch& batch,
                       const Eigen::Ref<const MatrixXd>& r);

struct IocDiagnostics {
  // row count used by the sufficiency test, M(T-2)m for batch solves;
  // SolveQ alone reports the stacked row count
  int rows = 0;
  int equations = 0;  // rows actually stacked, M(T-1)m
  int cols = 0;  // N(N+1)/2
  int numerical_rank = 0;
  double condition_number = 0.0;
  bool lemma5_satisfied = false;
  bool lemma6_satisfied = false;
  std::vector<int> unactuated_modes;
  MatrixXd nullspace_basis;  // cols x k, orthonormal columns
  // quadratic forms z' S z vanishing on every observed lifted state
  int data_null_dim = 0;

  int NullspaceDim() const { return static_cast<int>(nullspace_basis.cols()); }
};

struct CostEstimate {
  MatrixXd q;
  MatrixXd r;
  double ls_residual = 0.0;
  IocDiagnostics diagnostics;
  std::vector<std::string> warnings;
};

struct IocOptions {
  double pinv_rel_tol = kDefaultPinvRelTol;
  double rank_rel_tol = 1e-8;   // diagnostics only
  double unactuated_tol = 1e-6;
  bool psd_project = false;
  // report Q modulo quadratic forms that vanish on the observed states
  bool canonicalize = true;
  MatrixXd r;  // empty means identity
};

// minimum-norm solution of || -u_stack - (script_a D) vech(Q) ||_2;
// u_stack holds R u_k (see StackControls). The terminal-rank and
// unactuated-mode fields are left for the caller (InverseBiLqr fills them).
CostEstimate SolveQ(const Eigen::Ref<const MatrixXd>& script_a,
                    const Eigen::Ref<const VectorXd>& u_stack,
                    const IocOptions& options = {});

// orthonormal basis (in vech coordinates) of the symmetric S with
// z' S z = 0 for every column of z
MatrixXd VanishingQuadraticForms(const Eigen::Ref<const MatrixXd>& z,
                                 double rel_tol);

// lifted coordinates whose rows vanish in every B_i; constant terms of the
// dictionary are skipped
std::vector<int> DetectUnactuated(const BilinearModel& model,
                                  double tol = 1e-6);

// true when T >= N+2, M >= N and the states z_{T-1} of the batch span R^N
bool CheckTerminalStateRank(const LiftedBatch& batch, double rank_rel_tol);

// O_AB/O_B, stacked system, least squares and all diagnostics for a batch;
// with options.canonicalize the estimate is then reduced to the
// minimum-norm member of its class modulo null directions and forms that
// vanish on the data
CostEstimate InverseBiLqr(const BilinearModel& model, const LiftedBatch& batch,
                          const IocOptions& options = {});

// same for a linear lifted model via the baseline construction
CostEstimate InverseLqr(const LinearModel& model, const LiftedBatch& batch,
                        const IocOptions& options = {});

}  // namespace kbilqr

#endif  // KBILQR_BILQR_H_
