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
#include <string>
#include <vector>

#include "qmaj/channel.hpp"
#include "qmaj/entropy.hpp"

namespace qmaj {

enum class Verdict { Majorized, NotMajorized, Undecided };

// A verified negative certificate: an entanglement-breaking channel acting
// on the untouched factor under which the conditional min-entropy ordering
// is strictly violated.
struct Witness {
  Channel eb_channel;      // EB-CPTP on A (output dimension may differ)
  double hmin_rho = 0;     // bits of H_min((Psi (x) id) rho), re-verified
  double hmin_sigma = 0;   // bits of H_min((Psi (x) id) sigma)
  Mat raw_dual;            // the separating Hermitian W before the shift
  double gap_bits() const { return hmin_rho - hmin_sigma; }
};

struct MajorizationDecision {
  Verdict verdict = Verdict::Undecided;
  std::optional<Channel> channel;  // Majorized: (id (x) channel) rho = sigma
  std::optional<Witness> witness;  // NotMajorized
  double feas_residual = 0;        // trace-norm conversion error of channel
  double witness_gap = 0;          // bits
  // Margins for Undecided: best separation value and best feasibility
  // residual observed, plus the unverified dual for inspection.
  double sep_margin = 0;
  std::optional<Mat> raw_dual;
  std::string note;
};

// Decides whether sigma = (id (x) Phi)(rho) for some CPTP Phi acting on the
// named factor (default B). Feasible instances return the channel; infeasible
// ones return a numerically verified entanglement-breaking witness built from
// the Farkas dual; near-boundary instances return Undecided with margins.
MajorizationDecision is_majorized(const BipartiteState& rho, const BipartiteState& sigma,
                                  double tolerance = tol::decision,
                                  Which channel_factor = Which::B);

// max over CPTP Phi on B of Tr(W (id (x) Phi) rho), with the maximizer.
struct PairingResult {
  double value = 0;
  Channel argmax;
};
PairingResult sup_pairing(const Mat& w, const Mat& rho, const FactoredDims& dims);

// Hermitian kernel M with Tr(W (id (x) Phi) rho) = <M, choi(Phi)> for every
// Hermitian-preserving Phi on the B factor.
Mat pairing_kernel(const Mat& w, const Mat& rho, const FactoredDims& dims, int d_out);

// Builds the entanglement-breaking witness from a separating Hermitian W
// with Tr(W sigma) > sup_pairing(W, rho): Hermitian Schmidt split, positive
// shift, measure-and-prepare assembly, trace-preserving completion, then a
// mandatory min-entropy verification. Returns nullopt when the verification
// margin stays below witness_min_gap.
std::optional<Witness> extract_witness(const Mat& w, const BipartiteState& rho,
                                       const BipartiteState& sigma);

// Channel-pairing evaluation of the projective norm for PSD inputs:
// max { <choi(Lambda), swap(rho)> : Lambda CPTP or CPTNI from B into A }.
// Coincides with the hmin lambda for PSD rho.
double prop_attain_value(const Mat& rho, const FactoredDims& dims, bool trace_preserving);

// Max-margin separating functional for the reachable set of rho under
// B-side channels: maximize Tr(W sigma) - sup_pairing(W, rho) over
// -I <= W <= I. A positive value certifies sigma unreachable.
struct Separation {
  double value = 0;
  Mat w;
};
std::optional<Separation> max_margin_separator(const BipartiteState& rho,
                                               const BipartiteState& sigma);

// ---------------------------------------------------------------------------
// Family convertibility.
// ---------------------------------------------------------------------------

struct FamilyInstance {
  int dim = 0;
  std::vector<Mat> rhos;
  std::vector<Mat> sigmas;
  std::vector<double> weights;  // empty = uniform
  int size() const { return static_cast<int>(rhos.size()); }
};

// Witness for a non-convertible family: a finitely supported (weight, omega)
// list whose block pairing violates the min-entropy ordering.
struct FamilyWitness {
  std::vector<double> weights;
  std::vector<Mat> omegas;
  double hmin_rho = 0;
  double hmin_sigma = 0;
};

struct FamilyDecision {
  Verdict verdict = Verdict::Undecided;
  std::optional<Channel> channel;
  std::optional<FamilyWitness> witness;
  double feas_residual = 0;
  double witness_gap = 0;
  std::string note;
};

// Single SDP: one CPTP map Phi with Phi(rho_i) = sigma_i for every i.
FamilyDecision convert_family(const FamilyInstance& inst, double tolerance = tol::decision);

struct SubfamilyScanReport {
  Verdict full_verdict = Verdict::Undecided;
  int subsets_checked = 0;
  int undecided = 0;
  std::vector<int> first_infeasible;  // empty when none found
  // full feasible implies every subfamily feasible; violations counted here.
  int consistency_violations = 0;
};

// Runs convert_family on all subfamilies up to size k_max and on the full
// family, reporting the first infeasible subfamily (a minimal obstruction).
SubfamilyScanReport finite_subfamily_scan(const FamilyInstance& inst, int k_max);

}  // namespace qmaj
