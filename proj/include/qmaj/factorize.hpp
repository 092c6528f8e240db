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

#include "qmaj/majorize.hpp"

namespace qmaj {

enum class FactorVerdict { Factors, NoFactor, Undecided };

// Witness for a failed post-factorization: an explicitly decomposed
// separable state (never a density matrix merely claimed separable) under
// which the min-entropy ordering of the two channels is violated.
struct SeparableWitness {
  std::vector<double> weights;  // nonnegative, sum 1
  std::vector<Mat> on_input;    // densities on the channel input space
  std::vector<Mat> on_ref;      // densities on the reference space
  double lhs = 0;               // H_min bits through T (must exceed rhs)
  double rhs = 0;               // H_min bits through S

  Mat assemble(const FactoredDims& dims) const;  // ref (x) input density
};

// Witness for a failed pre-factorization: a PSD x whose adjoint-side
// operator norms order the wrong way.
struct PsdWitness {
  Mat x;           // PSD on (adjoint input) (x) (reference)
  double lhs = 0;  // ||(T^adj (x) id)(x)||_inf
  double rhs = 0;  // ||(S^adj (x) id)(x)||_inf  (must exceed lhs)
};

struct FactorWitness {
  enum class Kind { SeparableState, PositiveOperator } kind = Kind::SeparableState;
  std::optional<SeparableWitness> separable;
  std::optional<PsdWitness> positive;
};

struct FactorizationDecision {
  FactorVerdict verdict = FactorVerdict::Undecided;
  std::optional<Channel> middle;  // the factoring channel Phi
  std::optional<FactorWitness> witness;
  double residual = 0;  // trace norm Choi mismatch of the certified factor
  double witness_gap = 0;
  std::string note;
};

// Decides Phi o T = S over CPTP Phi. On infeasibility the witness is a
// separable state rho with H_min(id (x) T (rho)) > H_min(id (x) S (rho)),
// verified numerically.
FactorizationDecision post_factor(const Channel& t, const Channel& s,
                                  double tolerance = tol::decision);

// Decides T o Phi = S over CPTP Phi. On infeasibility the witness is a PSD
// x with ||(T^adj (x) id)x||_inf < ||(S^adj (x) id)x||_inf, obtained from
// the dual via an inverse-square-root conjugation with a halving schedule
// on the regularizer.
FactorizationDecision pre_factor(const Channel& t, const Channel& s,
                                 double tolerance = tol::decision);

struct ChoiEquivalenceReport {
  bool agree = false;
  bool any_undecided = false;
  FactorVerdict factor_verdict = FactorVerdict::Undecided;
  Verdict majorization_verdict = Verdict::Undecided;
};

// Cross-checks post_factor(T, S) against is_majorized on the normalized
// Choi states with the channel acting on the output factor.
ChoiEquivalenceReport choi_majorization_equiv(const Channel& t, const Channel& s);

}  // namespace qmaj
