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

#include <stdexcept>
#include <string>

namespace qmaj {

// Base class for all qmaj exceptions.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Shape or factor-dimension mismatch between operands.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

// Malformed user input (non-Hermitian where required, NaN entries,
// non-density states, incomplete POVMs, bad files, ...).
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(what) {}
};

// The conic solver could not certify a result to tolerance. Carries the
// best bounds reached so callers can report margins.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double primal_bound, double dual_bound)
      : Error(what), primal_bound(primal_bound), dual_bound(dual_bound) {}
  double primal_bound;
  double dual_bound;
};

}  // namespace qmaj
