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

#include <json.hpp>
#include <string>

#include "qmaj/approx.hpp"
#include "qmaj/factorize.hpp"

namespace qmaj::io {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "qmaj 1.0.0";

// ---------------------------------------------------------------------------
// Matrix files: {"kind": "state"|"channel"|"operator", "dims": ...,
// "data": rows of [re, im]} with entries accepted as doubles or decimal
// strings; doubles are emitted losslessly.
// ---------------------------------------------------------------------------

json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j);

json state_file(const BipartiteState& st);
json channel_file(const Channel& ch);
json operator_file(const Mat& m, const FactoredDims& dims);

BipartiteState state_from_file(const json& j);
Channel channel_from_file(const json& j);
std::pair<Mat, FactoredDims> operator_from_file(const json& j);

// Family file: {"kind":"family","dim":d,"pairs":[{"rho":...,"sigma":...}],
// "weights": [...optional...]}.
json family_file(const FamilyInstance& inst);
FamilyInstance family_from_file(const json& j);

json load_json(const std::string& path);
void save_json(const std::string& path, const json& j);

// ---------------------------------------------------------------------------
// Certificates. Every negative verdict re-verifies offline: the verifier
// recomputes entropies and norms from the inputs and never trusts solver
// numbers stored in the file.
// ---------------------------------------------------------------------------

json certificate(const MajorizationDecision& dec, Which factor);
json certificate(const FamilyDecision& dec);
json certificate(const FactorizationDecision& dec, const std::string& kind);  // factor-post/pre
json certificate(const HminResult& res);
json certificate(const ApproxResult& res, const std::string& kind);  // approx-convert/factor

struct VerifyOutcome {
  bool ok = false;
  std::string message;
};

// inputs: the original problem files, in command-line order.
VerifyOutcome verify_certificate(const json& cert, const std::vector<json>& inputs);

}  // namespace qmaj::io
