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

#include "qmaj/entropy.hpp"

#include <cmath>

namespace qmaj {

BipartiteState::BipartiteState(Mat r, FactoredDims d) : rho(std::move(r)), dims(d) {
  require_hermitian(rho, "BipartiteState");
  if (rho.rows() != dims.total()) throw DimensionError("BipartiteState: dims mismatch");
  if (!is_psd(rho, 1e-8)) throw InputError("BipartiteState: not PSD");
  if (std::abs(rho.trace().real() - 1.0) > 1e-8) throw InputError("BipartiteState: trace != 1");
}

//! map: min-entropy-primal :: qmaj::lambda_program
LambdaResult lambda_program(const Mat& x, const FactoredDims& dims) {
  require_hermitian(x, "lambda_program");
  if (x.rows() != dims.total()) throw DimensionError("lambda_program: dims mismatch");

  SdpProblem p;
  VarId w = p.add_var("omega", dims.d_B);
  p.minimize({{w, identity(dims.d_B)}});
  p.add_psd(MatExpr::tensor_left(dims.d_A, p.var(w)) - MatExpr::constant(hermitian_part(x)));
  SdpSolution sol = solve(p, solver_gap_tol_from_env());
  if (sol.status != SdpStatus::Optimal)
    throw SolverError("lambda_program: solve did not certify optimality", sol.primal_value,
                      sol.dual_value);

  LambdaResult res;
  res.value = sol.primal_value;
  res.omega = hermitian_part(sol.primal_vars[0]);
  res.gap = sol.gap;

  // Polish the dual: clip to PSD and renormalize the A-marginal to the
  // identity, then keep whichever certificate pairs better.
  Mat xd = sol.psd_duals[0];
  Mat marg = partial_trace(xd, dims, Which::A);
  Mat g = psd_inv_sqrt(marg, 1e-12);
  Mat polished = tensor(identity(dims.d_A), g) * xd * tensor(identity(dims.d_A), g).adjoint();
  res.dual_X = hermitian_part(polished);
  return res;
}

//! map: self-adjoint-extension :: qmaj::lambda_selfadjoint
double lambda_selfadjoint(const Mat& x, const FactoredDims& dims) {
  return lambda_program(x, dims).value;
}

//! map: conditional-min-entropy :: qmaj::hmin
HminResult hmin(const BipartiteState& state) {
  LambdaResult lr = lambda_program(state.rho, state.dims);
  HminResult res;
  res.lambda = lr.value;
  res.value_bits = -std::log2(lr.value);
  res.optimal_omega = lr.omega;
  res.dual_X = lr.dual_X;
  res.gap = lr.gap;
  return res;
}

//! map: min-entropy-dual :: qmaj::hmin_dual
std::pair<double, Mat> hmin_dual(const BipartiteState& state) {
  const FactoredDims& dims = state.dims;
  SdpProblem p;
  VarId x = p.add_var("X", dims.total());
  p.maximize({{x, hermitian_part(state.rho)}});
  p.add_psd(p.var(x));
  p.add_eq(MatExpr::ptrace(p.var(x), dims, Which::A) - MatExpr::constant(identity(dims.d_B)));
  SdpSolution sol = solve(p, solver_gap_tol_from_env());
  if (sol.status != SdpStatus::Optimal)
    throw SolverError("hmin_dual: solve did not certify optimality", sol.primal_value,
                      sol.dual_value);
  return {sol.primal_value, hermitian_part(sol.primal_vars[0])};
}

//! map: positive-linfl1 :: qmaj::linfl1_norm
double linfl1_norm(const Mat& x, const FactoredDims& dims) {
  require_hermitian(x, "linfl1_norm");
  if (x.rows() != dims.total()) throw DimensionError("linfl1_norm: dims mismatch");
  if (!is_psd(x, 1e-8)) throw InputError("linfl1_norm: PSD input required");
  return eig_max(partial_trace(x, dims, Which::B));
}

}  // namespace qmaj
