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

#include "qmaj/approx.hpp"

#include <cmath>

namespace qmaj {

namespace {

MatExpr scalar_times_identity(const SdpProblem& p, VarId s, int d) {
  return MatExpr::mapped(p.var(s), d, [d](const Mat& x) { return Mat(x(0, 0) * identity(d)); });
}

Channel polish(const Mat& j_raw, int d_in, int d_out) {
  Mat j = psd_clip(hermitian_part(j_raw));
  Mat marg = partial_trace(j, FactoredDims(d_in, d_out), Which::B);
  Mat g = psd_inv_sqrt(marg, 1e-14);
  return Channel(d_in, d_out,
                 hermitian_part(tensor(g, identity(d_out)) * j * tensor(g, identity(d_out)).adjoint()));
}

}  // namespace

//! map: diamond-norm :: qmaj::diamond_norm
double diamond_norm(const Mat& j_delta, int d_in, int d_out) {
  require_hermitian(j_delta, "diamond_norm");
  if (j_delta.rows() != static_cast<Eigen::Index>(d_in) * d_out)
    throw DimensionError("diamond_norm: Choi dims mismatch");
  // The zero map needs no program (and sits on a degenerate cone face).
  if (j_delta.norm() <= 1e-13 * j_delta.rows()) return 0.0;
  FactoredDims dims(d_in, d_out);
  SdpProblem pr;
  VarId s = pr.add_var("s", 1);
  VarId p = pr.add_var("P", dims.total());
  VarId n = pr.add_var("N", dims.total());
  pr.minimize({{s, identity(1)}});
  pr.add_psd(pr.var(p));
  pr.add_psd(pr.var(n));
  pr.add_eq(pr.var(p) - pr.var(n) - MatExpr::constant(hermitian_part(j_delta)));
  pr.add_psd(scalar_times_identity(pr, s, d_in) - MatExpr::ptrace(pr.var(p), dims, Which::B) -
             MatExpr::ptrace(pr.var(n), dims, Which::B));
  SdpSolution sol = solve(pr, solver_gap_tol_from_env());
  if (sol.status != SdpStatus::Optimal)
    throw SolverError("diamond_norm: solve did not certify optimality", sol.primal_value,
                      sol.dual_value);
  return std::max(sol.primal_value, 0.0);
}

double diamond_distance(const Channel& t, const Channel& s) {
  if (t.d_in != s.d_in || t.d_out != s.d_out)
    throw DimensionError("diamond_distance: dims mismatch");
  return diamond_norm(Mat(t.choi - s.choi), t.d_in, t.d_out);
}

//! map: trace-distance-variational :: qmaj::trace_dist_variational
double trace_dist_variational(const Mat& rho, const Mat& sigma) {
  require_hermitian(rho, "trace_dist_variational");
  require_hermitian(sigma, "trace_dist_variational");
  if (rho.rows() != sigma.rows()) throw DimensionError("trace_dist_variational: dims");
  return positive_part_trace(rho - sigma);
}

double diamond_sup_form(const Mat& j_delta, int d_in, int d_out) {
  require_hermitian(j_delta, "diamond_sup_form");
  FactoredDims dims(d_in, d_out);
  Mat marg = partial_trace(j_delta, dims, Which::B);
  if (marg.norm() > 1e-7 * std::max(1.0, j_delta.norm()))
    throw InputError("diamond_sup_form: requires a difference of trace-preserving maps");
  SdpProblem pr;
  VarId r = pr.add_var("rho", dims.total());
  VarId w = pr.add_var("omega", d_in);
  pr.maximize({{r, hermitian_part(j_delta)}});
  pr.add_psd(pr.var(r));
  pr.add_psd(MatExpr::tensor_right(pr.var(w), d_out) - pr.var(r));
  pr.add_psd(MatExpr::constant(identity(1)) - MatExpr::trace_of(pr.var(w)));
  SdpSolution sol = solve(pr, solver_gap_tol_from_env());
  if (sol.status != SdpStatus::Optimal)
    throw SolverError("diamond_sup_form: solve did not certify optimality", sol.primal_value,
                      sol.dual_value);
  return std::max(2.0 * sol.primal_value, 0.0);
}

//! map: approx-conversion :: qmaj::min_conversion_error
ApproxResult min_conversion_error(const BipartiteState& rho, const BipartiteState& sigma) {
  if (rho.dims.d_A != sigma.dims.d_A || rho.dims.d_B != sigma.dims.d_B)
    throw DimensionError("min_conversion_error: dims mismatch");
  const FactoredDims& dims = rho.dims;
  FactoredDims jdims(dims.d_B, dims.d_B);
  Mat lift = tensor(partial_transpose(rho.rho, dims, Which::B), identity(dims.d_B));

  SdpProblem pr;
  VarId j = pr.add_var("J", jdims.total());
  VarId p = pr.add_var("P", dims.total());
  VarId n = pr.add_var("N", dims.total());
  pr.minimize({{p, identity(dims.total())}, {n, identity(dims.total())}});
  pr.add_psd(pr.var(j));
  pr.add_psd(pr.var(p));
  pr.add_psd(pr.var(n));
  pr.add_eq(MatExpr::ptrace(pr.var(j), jdims, Which::B) - MatExpr::constant(identity(dims.d_B)));
  pr.add_eq(pr.var(p) - pr.var(n) - MatExpr::constant(hermitian_part(sigma.rho)) +
            MatExpr::mapped(pr.var(j), dims.total(), [&dims, lift](const Mat& jb) {
              Mat prod = lift * tensor(identity(dims.d_A), jb);
              return trace_factor(prod, {dims.d_A, dims.d_B, dims.d_B}, 1);
            }));
  SdpSolution sol = solve(pr, solver_gap_tol_from_env());
  if (sol.status != SdpStatus::Optimal)
    throw SolverError("min_conversion_error: solve did not certify optimality", sol.primal_value,
                      sol.dual_value);
  ApproxResult res;
  res.optimizer = polish(sol.primal_vars[0], dims.d_B, dims.d_B);
  res.delta_star = std::max(sol.primal_value, 0.0);
  res.dual_value = sol.dual_value;
  res.gap = sol.gap;
  return res;
}

//! map: approx-factorization :: qmaj::min_post_factor_error
ApproxResult min_post_factor_error(const Channel& t, const Channel& s) {
  if (t.d_in != s.d_in || t.d_out != s.d_out)
    throw DimensionError("min_post_factor_error: dims mismatch");
  const int d_in = t.d_in, d_out = t.d_out;
  FactoredDims cdims(d_in, d_out);       // Choi dims of T, S and the difference
  FactoredDims jdims(d_out, d_out);      // Choi dims of Phi
  Mat lift = tensor(partial_transpose(t.choi, cdims, Which::B), identity(d_out));

  SdpProblem pr;
  VarId sc = pr.add_var("s", 1);
  VarId j = pr.add_var("J", jdims.total());
  VarId p = pr.add_var("P", cdims.total());
  VarId n = pr.add_var("N", cdims.total());
  pr.minimize({{sc, identity(1)}});
  pr.add_psd(pr.var(j));
  pr.add_psd(pr.var(p));
  pr.add_psd(pr.var(n));
  pr.add_eq(MatExpr::ptrace(pr.var(j), jdims, Which::B) - MatExpr::constant(identity(d_out)));
  // P - N = choi(S) - (id (x) Phi)(choi(T)).
  pr.add_eq(pr.var(p) - pr.var(n) - MatExpr::constant(s.choi) +
            MatExpr::mapped(pr.var(j), cdims.total(), [cdims, d_out, lift](const Mat& jb) {
              Mat prod = lift * tensor(identity(cdims.d_A), jb);
              return trace_factor(prod, {cdims.d_A, cdims.d_B, d_out}, 1);
            }));
  pr.add_psd(scalar_times_identity(pr, sc, d_in) - MatExpr::ptrace(pr.var(p), cdims, Which::B) -
             MatExpr::ptrace(pr.var(n), cdims, Which::B));
  SdpSolution sol = solve(pr, solver_gap_tol_from_env());
  if (sol.status != SdpStatus::Optimal)
    throw SolverError("min_post_factor_error: solve did not certify optimality", sol.primal_value,
                      sol.dual_value);
  ApproxResult res;
  res.optimizer = polish(sol.primal_vars[1], d_out, d_out);
  res.delta_star = std::max(sol.primal_value, 0.0);
  res.dual_value = sol.dual_value;
  res.gap = sol.gap;
  return res;
}

//! map: approx-state-slack :: qmaj::check_conversion_slack
bool check_conversion_slack(const BipartiteState& rho, const BipartiteState& sigma, const Channel& psi,
                 double delta) {
  if (rho.dims.d_A != sigma.dims.d_A || rho.dims.d_B != sigma.dims.d_B)
    throw DimensionError("check_conversion_slack: dims mismatch");
  if (psi.d_in != rho.dims.d_A) throw DimensionError("check_conversion_slack: Psi must act on factor A");
  Mat rb = partial_trace(rho.rho, rho.dims, Which::B);
  Mat sb = partial_trace(sigma.rho, sigma.dims, Which::B);
  if (trace_norm(rb - sb) > 1e-6)
    throw InputError("check_conversion_slack: marginals on the untouched factor differ");

  FactoredDims vdims(psi.d_out, rho.dims.d_B);
  double lam_sigma = lambda_selfadjoint(
      hermitian_part(apply_to_factor(psi, sigma.rho, sigma.dims, Which::A)), vdims);
  double lam_rho = lambda_selfadjoint(
      hermitian_part(apply_to_factor(psi, rho.rho, rho.dims, Which::A)), vdims);
  // The slack multiplier is the CB norm of Psi as a map from trace class
  // into the operator space: at finite dimension, the operator norm of its
  // Choi matrix. The diamond norm is the wrong direction here; it would
  // break the inequality already for unitary witnesses.
  double cb = operator_norm(psi.choi);
  double slack = 2e-7 * std::max({1.0, lam_rho, lam_sigma});
  return lam_sigma <= lam_rho + 0.5 * delta * cb + slack;
}

//! map: approx-channel-slack :: qmaj::check_factorization_slack
bool check_factorization_slack(const Channel& t, const Channel& s, const BipartiteState& rho_test,
                 double delta) {
  if (t.d_in != s.d_in || t.d_out != s.d_out) throw DimensionError("check_factorization_slack: dims mismatch");
  if (rho_test.dims.d_B != t.d_in)
    throw DimensionError("check_factorization_slack: test state factor B must match the channel input");
  FactoredDims odims(rho_test.dims.d_A, t.d_out);
  double lam_s = lambda_selfadjoint(
      hermitian_part(apply_to_factor(s, rho_test.rho, rho_test.dims, Which::B)), odims);
  double lam_t = lambda_selfadjoint(
      hermitian_part(apply_to_factor(t, rho_test.rho, rho_test.dims, Which::B)), odims);
  double lam_rho = lambda_selfadjoint(rho_test.rho, rho_test.dims);
  double slack = 2e-7 * std::max({1.0, lam_t, lam_s});
  return lam_s <= lam_t + 0.5 * delta * lam_rho + slack;
}

}  // namespace qmaj
