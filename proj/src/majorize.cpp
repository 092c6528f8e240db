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

#include "qmaj/majorize.hpp"

#include <algorithm>
#include <cmath>

namespace qmaj {

namespace {

// Conversion map as a function of the Choi matrix: (id_A (x) Phi_J)(rho).
Mat convert_with_choi(const Mat& j, const Mat& rho_pt_lift, const FactoredDims& dims, int d_out) {
  Mat prod = rho_pt_lift * tensor(identity(dims.d_A), j);
  return trace_factor(prod, {dims.d_A, dims.d_B, d_out}, 1);
}

Mat pt_lift(const Mat& rho, const FactoredDims& dims, int d_out) {
  return tensor(partial_transpose(rho, dims, Which::B), identity(d_out));
}

// Project a solver iterate onto an exactly trace-preserving CP channel.
Channel polish_channel(const Mat& j_raw, int d_in, int d_out) {
  Mat j = psd_clip(hermitian_part(j_raw));
  Mat marg = partial_trace(j, FactoredDims(d_in, d_out), Which::B);
  Mat g = psd_inv_sqrt(marg, 1e-14);
  Mat fixed = tensor(g, identity(d_out)) * j * tensor(g, identity(d_out)).adjoint();
  return Channel(d_in, d_out, hermitian_part(fixed));
}

BipartiteState swapped(const BipartiteState& st) {
  return BipartiteState(swap_factors(st.rho, st.dims), FactoredDims(st.dims.d_B, st.dims.d_A));
}

}  // namespace

Mat pairing_kernel(const Mat& w, const Mat& rho, const FactoredDims& dims, int d_out) {
  require_hermitian(w, "pairing_kernel");
  if (w.rows() != static_cast<Eigen::Index>(dims.d_A) * d_out)
    throw DimensionError("pairing_kernel: W does not live on A (x) B_out");
  Mat lift = pt_lift(rho, dims, d_out);
  // Lift W from (A, B_out) to (A, B_in, B_out).
  Mat wl = permute_factors(tensor(w, identity(dims.d_B)), {dims.d_A, d_out, dims.d_B}, {0, 2, 1});
  Mat m = trace_factor(wl * lift, {dims.d_A, dims.d_B, d_out}, 0);
  return hermitian_part(m);
}

//! map: channel-pairing-sup :: qmaj::sup_pairing
PairingResult sup_pairing(const Mat& w, const Mat& rho, const FactoredDims& dims) {
  int d_out = static_cast<int>(w.rows()) / dims.d_A;
  Mat kernel = pairing_kernel(w, rho, dims, d_out);
  FactoredDims jdims(dims.d_B, d_out);

  SdpProblem p;
  VarId j = p.add_var("J", jdims.total());
  p.maximize({{j, kernel}});
  p.add_psd(p.var(j));
  p.add_eq(MatExpr::ptrace(p.var(j), jdims, Which::B) - MatExpr::constant(identity(dims.d_B)));
  SdpSolution sol = solve(p, solver_gap_tol_from_env());
  if (sol.status != SdpStatus::Optimal)
    throw SolverError("sup_pairing: solve did not certify optimality", sol.primal_value,
                      sol.dual_value);
  PairingResult res;
  res.value = sol.primal_value;
  res.argmax = polish_channel(sol.primal_vars[0], dims.d_B, d_out);
  return res;
}

//! map: norm-duality-attainment :: qmaj::prop_attain_value
double prop_attain_value(const Mat& rho, const FactoredDims& dims, bool trace_preserving) {
  require_hermitian(rho, "prop_attain_value");
  FactoredDims jdims(dims.d_B, dims.d_A);
  SdpProblem p;
  VarId j = p.add_var("J", jdims.total());
  p.maximize({{j, hermitian_part(swap_factors(rho, dims))}});
  p.add_psd(p.var(j));
  MatExpr marg = MatExpr::ptrace(p.var(j), jdims, Which::B);
  if (trace_preserving)
    p.add_eq(marg - MatExpr::constant(identity(dims.d_B)));
  else
    p.add_psd(MatExpr::constant(identity(dims.d_B)) - marg);
  SdpSolution sol = solve(p, solver_gap_tol_from_env());
  if (sol.status != SdpStatus::Optimal)
    throw SolverError("prop_attain_value: solve did not certify optimality", sol.primal_value,
                      sol.dual_value);
  return sol.primal_value;
}

//! map: witness-extraction :: qmaj::extract_witness
std::optional<Witness> extract_witness(const Mat& w_in, const BipartiteState& rho,
                                       const BipartiteState& sigma) {
  const FactoredDims& dims = rho.dims;
  Mat w = hermitian_part(w_in);
  double wn = operator_norm(w);
  if (wn <= 0) return std::nullopt;
  w /= wn;

  double sup_rho = sup_pairing(w, rho.rho, dims).value;
  double margin = frobenius_inner(w, sigma.rho).real() - sup_rho;
  if (margin <= 0) return std::nullopt;

  // Hermitian operator-Schmidt split of the separator.
  auto terms = operator_schmidt(w, dims);

  // Positive shift: each a (x) b plus ||a|| ||b|| 1 (x) 1 splits into two
  // tensor products of PSD factors by the half-sum identity.
  std::vector<Mat> cs, ds;
  for (const auto& t : terms) {
    Mat a = t.coeff * t.a;
    Mat b = t.b;
    double na = operator_norm(a), nb = operator_norm(b);
    if (na * nb <= 0) continue;
    if (eig_min(a) < 0 && eig_min(-a) >= -1e-12 * na) {
      a = -a;
      b = -b;
    }
    if (eig_min(a) >= -1e-12 * na && eig_min(b) >= -1e-12 * nb) {
      // Already a tensor product of positive factors: no shift needed.
      cs.push_back(psd_clip(a));
      ds.push_back(psd_clip(b));
      continue;
    }
    cs.push_back(psd_clip(0.5 * (a + na * identity(dims.d_A))));
    ds.push_back(psd_clip(b + nb * identity(dims.d_B)));
    cs.push_back(psd_clip(0.5 * (na * identity(dims.d_A) - a)));
    ds.push_back(psd_clip(nb * identity(dims.d_B) - b));
  }

  Mat rho_a = partial_trace(rho.rho, dims, Which::B);
  Mat sigma_a = partial_trace(sigma.rho, dims, Which::B);
  double marg_diff = trace_norm(sigma_a - rho_a);

  auto verify = [&](const Channel& psi) -> std::optional<Witness> {
    Mat out_r = hermitian_part(apply_to_factor(psi, rho.rho, dims, Which::A));
    Mat out_s = hermitian_part(apply_to_factor(psi, sigma.rho, dims, Which::A));
    FactoredDims vdims(psi.d_out, dims.d_B);
    double hr, hs;
    try {
      hr = hmin(BipartiteState(out_r, vdims)).value_bits;
      hs = hmin(BipartiteState(out_s, vdims)).value_bits;
    } catch (const Error&) {
      return std::nullopt;
    }
    if (hr - hs < tol::witness_min_gap) return std::nullopt;
    Witness wit;
    wit.eb_channel = psi;
    wit.hmin_rho = hr;
    wit.hmin_sigma = hs;
    wit.raw_dual = w;
    return wit;
  };

  // Measure-and-prepare channel from the positive split, completed to be
  // trace preserving by dumping the deficit onto the maximally mixed state.
  auto build_deficit_witness = [&]() -> std::optional<Channel> {
    std::vector<Mat> povm, states;
    Mat total = zeros(dims.d_A);
    for (size_t m = 0; m < cs.size(); ++m) {
      double td = ds[m].trace().real();
      if (td <= 1e-14 || operator_norm(cs[m]) <= 1e-14) continue;
      povm.push_back(td * cs[m]);
      states.push_back(ds[m].transpose() / td);
      total += povm.back();
    }
    if (povm.empty()) return std::nullopt;
    double kappa = eig_max(total);
    if (kappa <= 1e-14) return std::nullopt;
    for (auto& x : povm) x /= kappa;
    povm.push_back(psd_clip(identity(dims.d_A) - total / kappa));
    states.push_back(identity(dims.d_B) / dims.d_B);
    try {
      return eb_from_ensemble(povm, states);
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  // Two-projection witness for unequal marginals on the untouched factor:
  // measure the support of (sigma_A - rho_A)_+ and prepare projectors of
  // different rank.
  auto build_marginal_witness = [&]() -> std::optional<Channel> {
    auto e = eigh(sigma_a - rho_a);
    Mat q1 = zeros(dims.d_A);
    for (Eigen::Index i = 0; i < e.values.size(); ++i)
      if (e.values(i) > 1e-12) q1 += e.vectors.col(i) * e.vectors.col(i).adjoint();
    if (operator_norm(q1) < 0.5) return std::nullopt;
    Mat q2 = identity(dims.d_A) - q1;
    Mat e0 = zeros(2);
    e0(0, 0) = 1;
    try {
      return eb_from_ensemble({q1, q2}, {e0, identity(2) / 2.0});
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  std::optional<Witness> best;
  auto consider = [&](const std::optional<Channel>& psi) {
    if (!psi) return;
    auto wit = verify(*psi);
    if (wit && (!best || wit->gap_bits() > best->gap_bits())) best = wit;
  };
  if (marg_diff <= tol::marginal) {
    consider(build_deficit_witness());
  } else {
    consider(build_marginal_witness());
    if (!best) consider(build_deficit_witness());
  }
  return best;
}

// Max-margin separating functional: maximize Tr(W sigma) - Tr(Y) subject to
// Y (x) I >= M(W, rho) and -I <= W <= I. Positive value certifies that sigma
// lies outside the reachable set.
std::optional<Separation> max_margin_separator(const BipartiteState& rho,
                                               const BipartiteState& sigma) {
  const FactoredDims& dims = rho.dims;
  Mat lift = pt_lift(rho.rho, dims, dims.d_B);
  SdpProblem p;
  VarId w = p.add_var("W", dims.total());
  VarId y = p.add_var("Y", dims.d_B);
  p.maximize({{w, hermitian_part(sigma.rho)}, {y, Mat(-identity(dims.d_B))}});
  auto kernel_of_w = MatExpr::mapped(p.var(w), dims.d_B * dims.d_B, [&dims, lift](const Mat& wb) {
    Mat wl =
        permute_factors(tensor(wb, identity(dims.d_B)), {dims.d_A, dims.d_B, dims.d_B}, {0, 2, 1});
    return hermitian_part(trace_factor(wl * lift, {dims.d_A, dims.d_B, dims.d_B}, 0));
  });
  p.add_psd(MatExpr::tensor_right(p.var(y), dims.d_B) - kernel_of_w);
  p.add_psd(MatExpr::constant(identity(dims.total())) - p.var(w));
  p.add_psd(MatExpr::constant(identity(dims.total())) + p.var(w));
  SdpSolution sol = solve(p, solver_gap_tol_from_env());
  if (sol.status != SdpStatus::Optimal) return std::nullopt;
  return Separation{sol.primal_value, hermitian_part(sol.primal_vars[0])};
}

namespace {

MajorizationDecision decide_b_factor(const BipartiteState& rho, const BipartiteState& sigma,
                                     double tolerance) {
  const FactoredDims& dims = rho.dims;
  MajorizationDecision dec;

  // Feasibility program over the Choi matrix of the B-side channel.
  Mat lift = pt_lift(rho.rho, dims, dims.d_B);
  FactoredDims jdims(dims.d_B, dims.d_B);
  SdpProblem p;
  VarId j = p.add_var("J", jdims.total());
  p.add_psd(p.var(j));
  p.add_eq(MatExpr::ptrace(p.var(j), jdims, Which::B) - MatExpr::constant(identity(dims.d_B)));
  p.add_eq(MatExpr::mapped(p.var(j), dims.total(),
                           [&dims, lift](const Mat& jb) {
                             return convert_with_choi(jb, lift, dims, dims.d_B);
                           }) -
           MatExpr::constant(hermitian_part(sigma.rho)));
  SdpSolution sol = solve(p, solver_gap_tol_from_env());

  if (sol.status == SdpStatus::Optimal) {
    Channel phi = polish_channel(sol.primal_vars[0], dims.d_B, dims.d_B);
    double resid = trace_norm(apply_to_factor(phi, rho.rho, dims, Which::B) - sigma.rho);
    if (resid <= tolerance) {
      dec.verdict = Verdict::Majorized;
      dec.channel = phi;
      dec.feas_residual = resid;
      return dec;
    }
    dec.feas_residual = resid;
    dec.note = "feasible point exceeded the conversion tolerance";
  }

  // Candidate separating functionals: the Farkas dual of the conversion
  // equality, then the max-margin separation program.
  std::vector<Mat> candidates;
  if (sol.status == SdpStatus::Infeasible && sol.eq_duals.size() == 2) {
    Mat wf = hermitian_part(sol.eq_duals[1]);
    if (operator_norm(wf) > 1e-12) candidates.push_back(wf / operator_norm(wf));
  }
  auto sep = max_margin_separator(rho, sigma);
  if (sep) {
    dec.sep_margin = sep->value;
    if (operator_norm(sep->w) > 1e-12) candidates.push_back(sep->w);
  }

  std::optional<Witness> best;
  for (const Mat& w : candidates) {
    double margin = 0;
    try {
      margin = frobenius_inner(w, sigma.rho).real() - sup_pairing(w, rho.rho, dims).value;
    } catch (const Error&) {
      continue;
    }
    if (margin <= 1e-9) continue;
    if (!dec.raw_dual) dec.raw_dual = w;
    auto wit = extract_witness(w, rho, sigma);
    if (wit && (!best || wit->gap_bits() > best->gap_bits())) best = wit;
  }
  if (best) {
    dec.verdict = Verdict::NotMajorized;
    dec.witness = best;
    dec.witness_gap = best->gap_bits();
    dec.raw_dual = best->raw_dual;
    return dec;
  }

  dec.verdict = Verdict::Undecided;
  if (dec.note.empty())
    dec.note = sep ? "separation margin below the witness verification gate"
                   : "solver could not certify either direction";
  return dec;
}

}  // namespace

//! map: majorization-decision :: qmaj::is_majorized
MajorizationDecision is_majorized(const BipartiteState& rho, const BipartiteState& sigma,
                                  double tolerance, Which channel_factor) {
  if (rho.dims.d_A != sigma.dims.d_A || rho.dims.d_B != sigma.dims.d_B)
    throw DimensionError("is_majorized: states live on different factorizations");
  if (channel_factor == Which::A) return decide_b_factor(swapped(rho), swapped(sigma), tolerance);
  return decide_b_factor(rho, sigma, tolerance);
}

//! map: family-convertibility :: qmaj::convert_family
FamilyDecision convert_family(const FamilyInstance& inst, double tolerance) {
  const int n = inst.size();
  if (n == 0 || inst.dim < 1) throw InputError("convert_family: empty instance");
  if (inst.sigmas.size() != inst.rhos.size())
    throw InputError("convert_family: pair lists differ in length");
  std::vector<double> mu = inst.weights;
  if (mu.empty()) mu.assign(static_cast<size_t>(n), 1.0 / n);
  if (static_cast<int>(mu.size()) != n) throw InputError("convert_family: weights length");
  double total = 0;
  for (double m : mu) {
    if (m < 0) throw InputError("convert_family: negative weight");
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-8) throw InputError("convert_family: weights must sum to 1");

  const int d = inst.dim;
  Mat rho_block = zeros(n * d), sigma_block = zeros(n * d);
  for (int i = 0; i < n; ++i) {
    const Mat& r = inst.rhos[static_cast<size_t>(i)];
    const Mat& s = inst.sigmas[static_cast<size_t>(i)];
    require_hermitian(r, "convert_family rho");
    require_hermitian(s, "convert_family sigma");
    if (r.rows() != d || s.rows() != d) throw DimensionError("convert_family: pair dims");
    if (!is_psd(r, 1e-8) || std::abs(r.trace().real() - 1) > 1e-8 || !is_psd(s, 1e-8) ||
        std::abs(s.trace().real() - 1) > 1e-8)
      throw InputError("convert_family: entries must be density matrices");
    rho_block.block(i * d, i * d, d, d) = mu[static_cast<size_t>(i)] * r;
    sigma_block.block(i * d, i * d, d, d) = mu[static_cast<size_t>(i)] * s;
  }
  FactoredDims dims(n, d);
  BipartiteState rho_hat(rho_block, dims), sigma_hat(sigma_block, dims);
  MajorizationDecision dec = is_majorized(rho_hat, sigma_hat, tolerance, Which::B);

  FamilyDecision out;
  out.note = dec.note;
  if (dec.verdict == Verdict::Majorized) {
    // Per-pair verification of the single channel.
    double worst = 0;
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, trace_norm(qmaj::apply(*dec.channel, inst.rhos[static_cast<size_t>(i)]) -
                                         inst.sigmas[static_cast<size_t>(i)]));
    if (worst <= tolerance) {
      out.verdict = Verdict::Majorized;
      out.channel = dec.channel;
      out.feas_residual = worst;
      return out;
    }
    out.verdict = Verdict::Undecided;
    out.note = "block-feasible channel missed a per-pair tolerance";
    out.feas_residual = worst;
    return out;
  }
  if (dec.verdict == Verdict::NotMajorized) {
    FamilyWitness fw;
    fw.weights = mu;
    for (int i = 0; i < n; ++i) {
      Mat e = zeros(n);
      e(i, i) = 1;
      fw.omegas.push_back(hermitian_part(qmaj::apply(dec.witness->eb_channel, e)));
    }
    fw.hmin_rho = dec.witness->hmin_rho;
    fw.hmin_sigma = dec.witness->hmin_sigma;
    out.verdict = Verdict::NotMajorized;
    out.witness = fw;
    out.witness_gap = dec.witness_gap;
    return out;
  }
  out.verdict = Verdict::Undecided;
  return out;
}

//! map: subfamily-scan :: qmaj::finite_subfamily_scan
SubfamilyScanReport finite_subfamily_scan(const FamilyInstance& inst, int k_max) {
  const int n = inst.size();
  SubfamilyScanReport report;

  auto run_subset = [&](const std::vector<int>& idx) {
    FamilyInstance sub;
    sub.dim = inst.dim;
    for (int i : idx) {
      sub.rhos.push_back(inst.rhos[static_cast<size_t>(i)]);
      sub.sigmas.push_back(inst.sigmas[static_cast<size_t>(i)]);
    }
    return convert_family(sub);
  };

  for (int k = 1; k <= std::min(k_max, n); ++k) {
    std::vector<int> idx(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
    while (true) {
      ++report.subsets_checked;
      FamilyDecision d = run_subset(idx);
      if (d.verdict == Verdict::Undecided) ++report.undecided;
      if (d.verdict == Verdict::NotMajorized && report.first_infeasible.empty())
        report.first_infeasible = idx;
      // Advance the combination.
      int pos = k - 1;
      while (pos >= 0 && idx[static_cast<size_t>(pos)] == n - k + pos) --pos;
      if (pos < 0) break;
      ++idx[static_cast<size_t>(pos)];
      for (int q = pos + 1; q < k; ++q)
        idx[static_cast<size_t>(q)] = idx[static_cast<size_t>(q - 1)] + 1;
    }
  }

  FamilyDecision full = convert_family(inst);
  report.full_verdict = full.verdict;
  if (full.verdict == Verdict::Majorized && !report.first_infeasible.empty())
    ++report.consistency_violations;
  return report;
}

}  // namespace qmaj
