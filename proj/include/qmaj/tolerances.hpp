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

namespace qmaj::tol {

// Relative Frobenius tolerance for accepting a matrix as Hermitian.
// Inputs outside this are rejected, not silently symmetrized.
inline constexpr double herm = 1e-10;

// Conic solver targets.
inline constexpr double feas = 1e-8;
inline constexpr double gap = 1e-7;

// Channel trace-preservation / trace-non-increase flags.
inline constexpr double channel = 1e-8;

// Trace-norm residual below which a conversion channel is accepted.
inline constexpr double decision = 1e-6;

// Minimum separation, in bits of conditional min-entropy, that a
// negative-verdict witness must demonstrate before it is returned.
inline constexpr double witness_min_gap = 1e-5;

// Operator-Schmidt terms below this relative size are dropped.
inline constexpr double schmidt_drop = 1e-12;

// Marginal-equality test used when selecting a witness completion branch.
inline constexpr double marginal = 1e-8;

}  // namespace qmaj::tol
