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
#include <vector>

#include "qmaj/linalg.hpp"

namespace qmaj {

// Completely positive map represented by its Choi matrix, input factor
// first: choi = sum_ij e_ij (x) Phi(e_ij), a d_in*d_out square Hermitian
// matrix, PSD iff the map is CP. The action is
//   apply(rho) = Tr_in[(rho^T (x) I_out) choi],
// which makes choi_from_kraus({K}) act as rho -> K rho K^dag under the
// A-major index convention.
struct Channel {
  int d_in = 0;
  int d_out = 0;
  Mat choi;
  // Set by eb_from_ensemble: the channel is entanglement-breaking by
  // construction (measure-and-prepare form).
  bool eb_by_construction = false;

  Channel() = default;
  Channel(int din, int dout, Mat choi_in);

  FactoredDims choi_dims() const { return FactoredDims(d_in, d_out); }
};

enum class ChannelClass { CPTP, CPTNI, CP, EB_CPTP };

struct ChannelFlags {
  bool cp = false;
  bool tp = false;
  bool tni = false;
  bool unital = false;
  std::optional<bool> eb;  // unset when not certifiable at this dimension
};

// Strongest class the flags support; EB_CPTP implies CPTP.
ChannelClass classify(const ChannelFlags& flags);

Channel choi_from_kraus(const std::vector<Mat>& kraus);

// Kraus operators recovered from the Choi eigendecomposition (CP maps).
std::vector<Mat> kraus_from_choi(const Channel& ch, double drop_tol = 1e-12);

Mat apply(const Channel& ch, const Mat& rho);

// (Phi (x) id) or (id (x) Phi) on a bipartite operator; the named factor
// must match d_in, and the output dims change when d_out != d_in.
Mat apply_to_factor(const Channel& ch, const Mat& x, const FactoredDims& dims, Which which);

// Frobenius-adjoint map under the bilinear trace pairing:
// Tr(Y apply(ch, X)) = Tr(apply(adjoint(ch), Y) X).
Channel adjoint(const Channel& ch);

ChannelFlags validate(const Channel& ch, double tolerance = tol::channel);

// Measure-and-prepare channel rho -> sum_j Tr(x_j rho) omega_j from a POVM
// {x_j} and prepared states {omega_j}; entanglement-breaking by construction.
Channel eb_from_ensemble(const std::vector<Mat>& povm, const std::vector<Mat>& states);

Channel identity_channel(int d);
Channel replacement_channel(const Mat& omega, int d_in);
Channel depolarizing_channel(int d, double p);
Channel compose(const Channel& after, const Channel& before);  // after o before

// Unitary conjugation rho -> U rho U^dag.
Channel unitary_channel(const Mat& u);

}  // namespace qmaj
