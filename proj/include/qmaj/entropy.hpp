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

#include "qmaj/conic.hpp"
#include "qmaj/linalg.hpp"

namespace qmaj {

// Density operator on a tensor-factored space.
struct BipartiteState {
  Mat rho;
  FactoredDims dims;
  BipartiteState(Mat r, FactoredDims d);
};

// Result of the conditional min-entropy program for H_min(A|B):
//   lambda = min { Tr w : 1_A (x) w >= rho },  value_bits = -log2 lambda,
// with a dual certificate X >= 0, Tr_A X = I_B, Tr(X rho) >= lambda - gap.
struct HminResult {
  double value_bits = 0;
  double lambda = 0;
  Mat optimal_omega;  // on B
  Mat dual_X;         // on A (x) B
  double gap = 0;
};

HminResult hmin(const BipartiteState& state);

// Dual program value and optimizer: max { Tr(X rho) : X >= 0, Tr_A X = I_B }.
// Solved as its own SDP; strong duality ties it to hmin within 2*gap_tol.
std::pair<double, Mat> hmin_dual(const BipartiteState& state);

// min { Tr w : 1_A (x) w >= x } over Hermitian w, for self-adjoint x. For
// PSD x this equals the hmin lambda (after normalization); for general
// self-adjoint x it is a lower bound on the projective norm, exposed only
// as a bound.
double lambda_selfadjoint(const Mat& x, const FactoredDims& dims);

// Same program with the optimizer and dual returned (internal consumers:
// witness pipelines and the channel-pairing value).
struct LambdaResult {
  double value = 0;
  Mat omega;
  Mat dual_X;
  double gap = 0;
};
LambdaResult lambda_program(const Mat& x, const FactoredDims& dims);

// sup { Tr((a* a (x) 1) x) : ||a||_2 = 1 } for PSD x, which evaluates to
// lambda_max(Tr_B x).
double linfl1_norm(const Mat& x, const FactoredDims& dims);

}  // namespace qmaj
