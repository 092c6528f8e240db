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

#include <cstdint>
#include <string>

#include "qmaj/channel.hpp"
#include "qmaj/linalg.hpp"
#include "qmaj/rng.hpp"

namespace qmaj::oracle {

using Seed = std::uint64_t;

// G G^dag / Tr with G a d x rank matrix of complex Gaussians drawn from the
// pinned PCG32 stream (row-major, real part before imaginary part).
Mat random_density(int d, int rank, Seed seed);

// Haar-style isometry V : d_in -> d_out * env via QR of a Gaussian matrix
// (columns phase-fixed so R_ii > 0), then Tr_env V . V^dag.
Channel random_cptp(int d_in, int d_out, int env, Seed seed);

Mat random_unitary_mat(int d, Seed seed);

// Convex mixture of `terms` product densities on d_A (x) d_B.
Mat random_separable(const FactoredDims& dims, int terms, Seed seed);

// Independent brute-force evaluation of min { Tr w : 1_A (x) w >= x } for
// d_B = 2, by scanning density shapes over the Bloch ball with a signed
// scale and refining locally. Never calls the SDP path.
double grid_lambda(const Mat& x, const FactoredDims& dims, int resolution);

// Same scan restricted to a normalized density input (the H_min lambda).
double grid_hmin(const Mat& rho, const FactoredDims& dims, int resolution);

// Randomized lower-bound search for sup over CPTP maps on the B factor of
// Tr(W (id (x) Phi) rho): hill-climbs Stinespring isometries with QR
// retraction, evaluating through the Kraus action directly.
double channel_search_sup(const Mat& w, const Mat& rho, const FactoredDims& dims, int d_out,
                          int restarts, int iters, Seed seed);

// Suite reports are JSON strings: counts, worst margins, failing seeds.
std::string monotonicity_suite(int n, Seed seed);
std::string majorization_roundtrip_suite(int n, Seed seed);

}  // namespace qmaj::oracle
