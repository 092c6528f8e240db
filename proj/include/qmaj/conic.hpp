// Copyright 2026 The qmaj developers
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

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmaj/linalg.hpp"

namespace qmaj {

// Real symmetric embedding of a complex Hermitian matrix,
// [[Re H, -Im H], [Im H, Re H]]. H >= 0 iff the embedding is >= 0;
// eigenvalues are doubled in multiplicity.
RMat embed_complex(const Mat& h);

// Adjoint of the embedding: maps a real symmetric 2d x 2d matrix Y to the
// complex Hermitian E*(Y) = (Y11 + Y22) + i (Y21 - Y12), which satisfies
// <embed_complex(H), Y> = <H, E*(Y)> for Hermitian H.
Mat unembed_dual(const RMat& y);

using VarId = int;

// Hermitian-matrix-valued affine expression in the declared variables.
// Built from constants and structure-preserving linear maps; the compiler
// turns it into real coefficient data by propagating a Hermitian basis.
class MatExpr {
 public:
  MatExpr() : dim_(0) {}
  explicit MatExpr(Mat constant);

  int dim() const { return dim_; }
  const Mat& constant() const { return constant_; }

  // expr(vars) for concrete variable values, in declaration order.
  Mat eval(const std::vector<Mat>& vars) const;

  // Linear part applied to a single basis element of one variable.
  Mat eval_linear(VarId var, const Mat& basis_elem) const;

  const std::vector<VarId>& vars() const { return vars_; }

  friend MatExpr operator+(const MatExpr& a, const MatExpr& b);
  friend MatExpr operator-(const MatExpr& a, const MatExpr& b);
  friend MatExpr operator*(double s, const MatExpr& e);

  // Builders.
  static MatExpr var(VarId v, int dim);
  static MatExpr constant(Mat c);
  // L * e * L^dag (left/right multiplication, Hermiticity-preserving).
  static MatExpr conj_sandwich(const Mat& l, const MatExpr& e);
  // General Hermitian-preserving linear image of e under `map`. The map
  // must be real-linear and send Hermitian to Hermitian; out_dim is the
  // dimension of the image space.
  static MatExpr mapped(const MatExpr& e, int out_dim, std::function<Mat(const Mat&)> map);
  static MatExpr tensor_left(int d, const MatExpr& e);   // I_d (x) e
  static MatExpr tensor_right(const MatExpr& e, int d);  // e (x) I_d
  static MatExpr ptrace(const MatExpr& e, const FactoredDims& dims, Which traced);
  static MatExpr trace_of(const MatExpr& e);  // 1x1 expression

 private:
  struct Term {
    VarId var;
    std::function<Mat(const Mat&)> map;  // linear in the variable
  };
  static MatExpr lift(const MatExpr& e, int out_dim, const std::function<Mat(const Mat&)>& outer);

  int dim_;
  Mat constant_;
  std::vector<Term> terms_;
  std::vector<VarId> vars_;
};

enum class SdpStatus { Optimal, Infeasible, Unbounded, Inaccurate };

struct SdpSolution {
  SdpStatus status = SdpStatus::Inaccurate;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;

  // Primal variable values, one per declared variable.
  std::vector<Mat> primal_vars;
  // One Hermitian dual matrix per PSD constraint (PSD at Optimal); on
  // Infeasible these hold the Farkas certificate blocks.
  std::vector<Mat> psd_duals;
  // One Hermitian dual per equality constraint (the Farkas multipliers on
  // Infeasible).
  std::vector<Mat> eq_duals;

  // Solver diagnostics.
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;

  // For Unbounded: an improving ray in the primal variables.
  std::vector<Mat> ray;
};

// Linear SDP over Hermitian matrix variables with equality constraints and
// PSD-cone constraints. Scalars are 1x1 variables.
class SdpProblem {
 public:
  VarId add_var(const std::string& name, int dim);

  int var_dim(VarId v) const { return var_dims_.at(static_cast<size_t>(v)); }
  int num_vars() const { return static_cast<int>(var_dims_.size()); }
  MatExpr var(VarId v) const { return MatExpr::var(v, var_dim(v)); }

  // minimize sum_k Tr(C_k X_k) + constant (C_k Hermitian).
  void minimize(const std::vector<std::pair<VarId, Mat>>& terms, double constant = 0.0);
  void maximize(const std::vector<std::pair<VarId, Mat>>& terms, double constant = 0.0);

  void add_eq(const MatExpr& expr);   // expr == 0
  void add_psd(const MatExpr& expr);  // expr >= 0

  int num_eqs() const { return static_cast<int>(eqs_.size()); }
  int num_psds() const { return static_cast<int>(psds_.size()); }

  friend SdpSolution solve(const SdpProblem& p, double gap_tol);

 private:
  std::vector<int> var_dims_;
  std::vector<std::string> var_names_;
  std::vector<std::pair<VarId, Mat>> objective_;
  double obj_constant_ = 0.0;
  double obj_sign_ = 1.0;  // -1 when maximizing
  std::vector<MatExpr> eqs_;
  std::vector<MatExpr> psds_;
};

// Solves to the requested relative duality gap (feasibility target tol::feas).
// Optimal solutions carry certified primal/dual values; Infeasible returns a
// numerically verified Farkas certificate in (psd_duals, eq_duals); solver
// failure degrades to Inaccurate, never a silent wrong answer.
SdpSolution solve(const SdpProblem& p, double gap_tol = tol::gap);

// gap_tol override used by the CLI (QMAJ_SOLVER_TOL).
double solver_gap_tol_from_env();

}  // namespace qmaj
