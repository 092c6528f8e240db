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

#include <json.hpp>

#include "qmaj/majorize.hpp"
#include "qmaj/oracle.hpp"

namespace qmaj::oracle {

namespace {

using nlohmann::json;

// Deterministic planted-infeasible instance: separable rho, entangled sigma
// (verified NPT), alternating between equal and unequal A-marginals.
struct PlantedInfeasible {
  Mat rho;
  Mat sigma;
};

PlantedInfeasible plant_infeasible(Seed seed, bool equal_marginals) {
  const FactoredDims dims(2, 2);
  for (int attempt = 0;; ++attempt) {
    Seed s = Pcg32::derive(seed, 7000 + static_cast<Seed>(attempt));
    Mat pure = random_density(4, 1, s);
    Mat sigma = hermitian_part(0.98 * pure + 0.02 * identity(4) / 4.0);
    // Keep only clearly entangled targets (exact at 2x2 via the partial
    // transpose spectrum).
    if (eig_min(partial_transpose(sigma, dims, Which::B)) > -0.05) continue;
    Mat rho;
    if (equal_marginals) {
      rho = hermitian_part(tensor(partial_trace(sigma, dims, Which::B), identity(2) / 2.0));
    } else {
      rho = random_separable(dims, 3, Pcg32::derive(seed, 9000 + static_cast<Seed>(attempt)));
    }
    return {rho, sigma};
  }
}

}  // namespace

//! map: data-processing-suite :: qmaj::oracle::monotonicity_suite
std::string monotonicity_suite(int n, Seed seed) {
  json rep;
  rep["suite"] = "monotonicity";
  rep["n"] = n;
  rep["seed"] = seed;
  int pass = 0, fail = 0;
  double worst_duality = 0, worst_dp = 0, worst_unitary = 0;
  std::vector<Seed> failing;

  for (int k = 0; k < n; ++k) {
    Seed sk = Pcg32::derive(seed, static_cast<Seed>(k));
    int d_a = 2 + static_cast<int>(sk % 2);
    int d_b = 2 + static_cast<int>((sk >> 8) % 2);
    FactoredDims dims(d_a, d_b);
    bool ok = true;
    try {
      Mat rho = random_density(dims.total(), dims.total(), Pcg32::derive(sk, 1));
      BipartiteState st(rho, dims);
      auto base = hmin(st);
      auto [dual, x] = hmin_dual(st);
      double dgap = std::abs(base.lambda - dual);
      worst_duality = std::max(worst_duality, dgap);
      if (dgap > 1e-6) ok = false;

      Channel phi = random_cptp(d_b, d_b, 2, Pcg32::derive(sk, 2));
      Mat processed = hermitian_part(apply_to_factor(phi, rho, dims, Which::B));
      double dp = hmin(BipartiteState(processed, dims)).value_bits - base.value_bits;
      worst_dp = std::max(worst_dp, -dp);
      if (dp < -1e-6) ok = false;

      Mat u = random_unitary_mat(d_a, Pcg32::derive(sk, 3));
      Mat v = random_unitary_mat(d_b, Pcg32::derive(sk, 4));
      Mat rotated = hermitian_part(tensor(u, v) * rho * tensor(u, v).adjoint());
      double drot = std::abs(hmin(BipartiteState(rotated, dims)).value_bits - base.value_bits);
      worst_unitary = std::max(worst_unitary, drot);
      if (drot > 1e-7) ok = false;
    } catch (const Error&) {
      ok = false;
    }
    if (ok)
      ++pass;
    else {
      ++fail;
      failing.push_back(sk);
    }
  }
  rep["pass"] = pass;
  rep["fail"] = fail;
  rep["worst"] = {{"duality_gap", worst_duality},
                  {"data_processing_violation", worst_dp},
                  {"unitary_invariance_drift", worst_unitary}};
  rep["failed_seeds"] = failing;
  return rep.dump(2);
}

//! map: roundtrip-suite :: qmaj::oracle::majorization_roundtrip_suite
std::string majorization_roundtrip_suite(int n, Seed seed) {
  json rep;
  rep["suite"] = "majorization_roundtrip";
  rep["n"] = n;
  rep["seed"] = seed;
  const FactoredDims dims(2, 2);

  int feasible_majorized = 0, feasible_undecided = 0, feasible_wrong = 0;
  int infeasible_rejected = 0, infeasible_undecided = 0, infeasible_wrong = 0;
  double worst_residual = 0, worst_gap = std::numeric_limits<double>::infinity();
  std::vector<Seed> failing;

  for (int k = 0; k < n; ++k) {
    Seed sk = Pcg32::derive(seed, 1000 + static_cast<Seed>(k));
    bool planted_feasible = (k % 2 == 0);
    try {
      if (planted_feasible) {
        Mat rho = random_density(4, 2 + static_cast<int>(sk % 3), Pcg32::derive(sk, 1));
        Channel phi = random_cptp(2, 2, 1 + static_cast<int>(sk % 4), Pcg32::derive(sk, 2));
        Mat sigma = hermitian_part(apply_to_factor(phi, rho, dims, Which::B));
        auto dec = is_majorized(BipartiteState(rho, dims), BipartiteState(sigma, dims));
        if (dec.verdict == Verdict::Majorized) {
          ++feasible_majorized;
          worst_residual = std::max(worst_residual, dec.feas_residual);
        } else if (dec.verdict == Verdict::Undecided) {
          ++feasible_undecided;
        } else {
          ++feasible_wrong;
          failing.push_back(sk);
        }
      } else {
        auto inst = plant_infeasible(sk, k % 4 == 1);
        auto dec = is_majorized(BipartiteState(inst.rho, dims), BipartiteState(inst.sigma, dims));
        if (dec.verdict == Verdict::NotMajorized) {
          ++infeasible_rejected;
          worst_gap = std::min(worst_gap, dec.witness_gap);
        } else if (dec.verdict == Verdict::Undecided) {
          ++infeasible_undecided;
        } else {
          ++infeasible_wrong;
          failing.push_back(sk);
        }
      }
    } catch (const Error&) {
      failing.push_back(sk);
      if (planted_feasible)
        ++feasible_wrong;
      else
        ++infeasible_wrong;
    }
  }
  rep["planted_feasible"] = {{"majorized", feasible_majorized},
                             {"undecided", feasible_undecided},
                             {"not_majorized", feasible_wrong}};
  rep["planted_infeasible"] = {{"not_majorized", infeasible_rejected},
                               {"undecided", infeasible_undecided},
                               {"majorized", infeasible_wrong}};
  rep["worst"] = {{"conversion_residual", worst_residual},
                  {"witness_gap_bits",
                   std::isfinite(worst_gap) ? worst_gap : 0.0}};
  rep["failed_seeds"] = failing;
  return rep.dump(2);
}

}  // namespace qmaj::oracle
