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

#include <optional>

#include "qmaj/majorize.hpp"

namespace qmaj {

// Completely bounded trace norm of a Hermitian-preserving map given by its
// Choi matrix (input factor first):
//   ||D||_diamond = min { ||Tr_out(P + N)||_inf : P - N = J, P, N >= 0 }.
double diamond_norm(const Mat& j_delta, int d_in, int d_out);

// Convenience overload for a difference of channels.
double diamond_distance(const Channel& t, const Channel& s);

// The dual/sup evaluation of the same quantity for trace-annihilating J
// (differences of trace-preserving maps):
//   2 max { <J, rho> : 0 <= rho <= omega (x) I_out, Tr omega <= 1 }.
// Kept as an independent route; agreement with diamond_norm is a property,
// not an implementation alias.
double diamond_sup_form(const Mat& j_delta, int d_in, int d_out);

struct ApproxResult {
  double delta_star = 0;
  Channel optimizer;
  double gap = 0;         // solver duality gap certifying optimality
  double dual_value = 0;  // certified lower bound on delta_star
};

// min over CPTP Phi on B of || sigma - (id (x) Phi) rho ||_1.
ApproxResult min_conversion_error(const BipartiteState& rho, const BipartiteState& sigma);

// min over CPTP Phi of || S - Phi o T ||_diamond, as one SDP in choi(Phi).
ApproxResult min_post_factor_error(const Channel& t, const Channel& s);

// Evaluates the slack inequality
//   lambda((Psi (x) id) sigma) <= lambda((Psi (x) id) rho) + (delta/2) ||Psi||_cb
// for a CP trace-class map Psi on the A factor, with ||Psi||_cb its diamond
// norm. Requires equal marginals on the untouched factor: Tr_B rho = Tr_B
// sigma within tolerance.
bool check_conversion_slack(const BipartiteState& rho, const BipartiteState& sigma, const Channel& psi,
                 double delta);

// Evaluates lambda((id (x) S) rho) <= lambda((id (x) T) rho) + (delta/2) lambda(rho)
// on a bipartite test density rho (reference factor first, channel input
// second).
bool check_factorization_slack(const Channel& t, const Channel& s, const BipartiteState& rho_test, double delta);

// sup { Tr(x (rho - sigma)) : 0 <= x <= 1 } in closed form, Tr(rho - sigma)_+.
double trace_dist_variational(const Mat& rho, const Mat& sigma);

}  // namespace qmaj
