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

#include "qmaj/io.hpp"

#include <cmath>
#include <fstream>

namespace qmaj::io {

namespace {

double scalar_from(const json& v, const char* who) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return std::stod(v.get<std::string>());
    } catch (...) {
    }
  }
  throw InputError(std::string(who) + ": entry is neither a number nor a decimal string");
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Majorized:
      return "Majorized";
    case Verdict::NotMajorized:
      return "NotMajorized";
    default:
      return "Undecided";
  }
}

const char* verdict_name(FactorVerdict v) {
  switch (v) {
    case FactorVerdict::Factors:
      return "Factors";
    case FactorVerdict::NoFactor:
      return "NoFactor";
    default:
      return "Undecided";
  }
}

}  // namespace

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(row);
  }
  return rows;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InputError("matrix: data must be a nonempty array");
  const int n = static_cast<int>(j.size());
  Mat m(n, static_cast<int>(j[0].size()));
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(j[static_cast<size_t>(i)].size()) != m.cols())
      throw InputError("matrix: ragged rows");
    for (int c = 0; c < m.cols(); ++c) {
      const json& e = j[static_cast<size_t>(i)][static_cast<size_t>(c)];
      if (!e.is_array() || e.size() != 2) throw InputError("matrix: entries must be [re, im]");
      m(i, c) = Complex(scalar_from(e[0], "matrix"), scalar_from(e[1], "matrix"));
    }
  }
  if (!finite_entries(m)) throw InputError("matrix: non-finite entries");
  return m;
}

json state_file(const BipartiteState& st) {
  return json{{"kind", "state"},
              {"dims", json::array({st.dims.d_A, st.dims.d_B})},
              {"data", matrix_to_json(st.rho)}};
}

json channel_file(const Channel& ch) {
  json j{{"kind", "channel"},
         {"dims", json{{"d_in", ch.d_in}, {"d_out", ch.d_out}}},
         {"data", matrix_to_json(ch.choi)}};
  if (ch.eb_by_construction) j["eb_by_construction"] = true;
  return j;
}

json operator_file(const Mat& m, const FactoredDims& dims) {
  return json{{"kind", "operator"},
              {"dims", json::array({dims.d_A, dims.d_B})},
              {"data", matrix_to_json(m)}};
}

namespace {
FactoredDims dims_from(const json& j) {
  if (!j.is_array()) throw InputError("dims: expected [d_A, d_B]");
  if (j.size() == 1) return FactoredDims(1, j[0].get<int>());
  if (j.size() != 2) throw InputError("dims: expected [d_A, d_B]");
  return FactoredDims(j[0].get<int>(), j[1].get<int>());
}
}  // namespace

BipartiteState state_from_file(const json& j) {
  if (j.value("kind", "") != "state") throw InputError("state file: kind must be \"state\"");
  FactoredDims dims = dims_from(j.at("dims"));
  Mat m = matrix_from_json(j.at("data"));
  return BipartiteState(hermitian_part(m), dims);
}

Channel channel_from_file(const json& j) {
  if (j.value("kind", "") != "channel") throw InputError("channel file: kind must be \"channel\"");
  const json& d = j.at("dims");
  Channel ch(d.at("d_in").get<int>(), d.at("d_out").get<int>(),
             hermitian_part(matrix_from_json(j.at("data"))));
  ch.eb_by_construction = j.value("eb_by_construction", false);
  return ch;
}

std::pair<Mat, FactoredDims> operator_from_file(const json& j) {
  if (j.value("kind", "") != "operator")
    throw InputError("operator file: kind must be \"operator\"");
  FactoredDims dims = dims_from(j.at("dims"));
  Mat m = matrix_from_json(j.at("data"));
  if (m.rows() != dims.total()) throw InputError("operator file: dims do not match data");
  return {m, dims};
}

json family_file(const FamilyInstance& inst) {
  json pairs = json::array();
  for (int i = 0; i < inst.size(); ++i)
    pairs.push_back(json{{"rho", matrix_to_json(inst.rhos[static_cast<size_t>(i)])},
                         {"sigma", matrix_to_json(inst.sigmas[static_cast<size_t>(i)])}});
  json j{{"kind", "family"}, {"dim", inst.dim}, {"pairs", pairs}};
  if (!inst.weights.empty()) j["weights"] = inst.weights;
  return j;
}

FamilyInstance family_from_file(const json& j) {
  if (j.value("kind", "") != "family") throw InputError("family file: kind must be \"family\"");
  FamilyInstance inst;
  inst.dim = j.at("dim").get<int>();
  for (const auto& p : j.at("pairs")) {
    inst.rhos.push_back(hermitian_part(matrix_from_json(p.at("rho"))));
    inst.sigmas.push_back(hermitian_part(matrix_from_json(p.at("sigma"))));
  }
  if (j.contains("weights")) inst.weights = j.at("weights").get<std::vector<double>>();
  return inst;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw InputError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

json certificate(const MajorizationDecision& dec, Which factor) {
  json c;
  c["version"] = kToolVersion;
  c["kind"] = "majorize";
  c["factor"] = factor == Which::B ? "B" : "A";
  c["verdict"] = verdict_name(dec.verdict);
  c["margins"] = {{"feas_residual", dec.feas_residual},
                  {"witness_gap_bits", dec.witness_gap},
                  {"separation_margin", dec.sep_margin}};
  if (dec.channel) c["channel"] = channel_file(*dec.channel);
  if (dec.witness) {
    c["witness"] = {{"eb_channel", channel_file(dec.witness->eb_channel)},
                    {"hmin_rho", dec.witness->hmin_rho},
                    {"hmin_sigma", dec.witness->hmin_sigma},
                    {"raw_dual", matrix_to_json(dec.witness->raw_dual)}};
  }
  if (!dec.note.empty()) c["note"] = dec.note;
  return c;
}

json certificate(const FamilyDecision& dec) {
  json c;
  c["version"] = kToolVersion;
  c["kind"] = "convert-family";
  c["verdict"] = verdict_name(dec.verdict);
  c["margins"] = {{"feas_residual", dec.feas_residual}, {"witness_gap_bits", dec.witness_gap}};
  if (dec.channel) c["channel"] = channel_file(*dec.channel);
  if (dec.witness) {
    json omegas = json::array();
    for (const auto& w : dec.witness->omegas) omegas.push_back(matrix_to_json(w));
    c["witness"] = {{"weights", dec.witness->weights},
                    {"omegas", omegas},
                    {"hmin_rho", dec.witness->hmin_rho},
                    {"hmin_sigma", dec.witness->hmin_sigma}};
  }
  if (!dec.note.empty()) c["note"] = dec.note;
  return c;
}

json certificate(const FactorizationDecision& dec, const std::string& kind) {
  json c;
  c["version"] = kToolVersion;
  c["kind"] = kind;
  c["verdict"] = verdict_name(dec.verdict);
  c["margins"] = {{"choi_residual", dec.residual}, {"witness_gap", dec.witness_gap}};
  if (dec.middle) c["channel"] = channel_file(*dec.middle);
  if (dec.witness) {
    if (dec.witness->kind == FactorWitness::Kind::SeparableState) {
      const auto& w = *dec.witness->separable;
      json on_input = json::array(), on_ref = json::array();
      for (const auto& m : w.on_input) on_input.push_back(matrix_to_json(m));
      for (const auto& m : w.on_ref) on_ref.push_back(matrix_to_json(m));
      c["witness"] = {{"type", "separable_state"}, {"weights", w.weights},
                      {"on_input", on_input},     {"on_ref", on_ref},
                      {"lhs_bits", w.lhs},        {"rhs_bits", w.rhs}};
    } else {
      const auto& w = *dec.witness->positive;
      c["witness"] = {{"type", "positive_operator"},
                      {"x", matrix_to_json(w.x)},
                      {"lhs_norm", w.lhs},
                      {"rhs_norm", w.rhs}};
    }
  }
  if (!dec.note.empty()) c["note"] = dec.note;
  return c;
}

json certificate(const HminResult& res) {
  json c;
  c["version"] = kToolVersion;
  c["kind"] = "hmin";
  c["verdict"] = "ok";
  c["value_bits"] = res.value_bits;
  c["lambda"] = res.lambda;
  c["gap"] = res.gap;
  c["optimal_omega"] = matrix_to_json(res.optimal_omega);
  c["dual_X"] = matrix_to_json(res.dual_X);
  return c;
}

json certificate(const ApproxResult& res, const std::string& kind) {
  json c;
  c["version"] = kToolVersion;
  c["kind"] = kind;
  c["verdict"] = "ok";
  c["delta_star"] = res.delta_star;
  c["dual_value"] = res.dual_value;
  c["gap"] = res.gap;
  c["optimizer"] = channel_file(res.optimizer);
  return c;
}

// ---------------------------------------------------------------------------
// Offline verification
// ---------------------------------------------------------------------------

namespace {

VerifyOutcome fail(const std::string& msg) { return {false, msg}; }
VerifyOutcome pass(const std::string& msg) { return {true, msg}; }

double hmin_bits_of(const Mat& m, const FactoredDims& dims) {
  return hmin(BipartiteState(hermitian_part(m), dims)).value_bits;
}

VerifyOutcome verify_majorize(const json& cert, const std::vector<json>& inputs) {
  if (inputs.size() != 2) return fail("majorize verification needs rho and sigma files");
  Which factor = cert.value("factor", "B") == "A" ? Which::A : Which::B;
  BipartiteState rho = state_from_file(inputs[0]);
  BipartiteState sigma = state_from_file(inputs[1]);
  std::string verdict = cert.value("verdict", "");
  if (verdict == "Majorized") {
    Channel ch = channel_from_file(cert.at("channel"));
    auto f = validate(ch);
    if (!f.cp || !f.tp) return fail("certified channel is not CPTP");
    double resid = trace_norm(apply_to_factor(ch, rho.rho, rho.dims, factor) - sigma.rho);
    if (resid > tol::decision) return fail("conversion residual exceeds tolerance");
    return pass("channel reproduces sigma within tolerance");
  }
  if (verdict == "NotMajorized") {
    const json& w = cert.at("witness");
    Channel psi = channel_from_file(w.at("eb_channel"));
    auto f = validate(psi);
    if (!f.cp || !f.tp) return fail("witness channel is not CPTP");
    if (f.eb.has_value() && !*f.eb) return fail("witness channel is not entanglement-breaking");
    Which untouched = factor == Which::B ? Which::A : Which::B;
    // Recompute both entropies from scratch.
    Mat vr = apply_to_factor(psi, rho.rho, rho.dims, untouched);
    Mat vs = apply_to_factor(psi, sigma.rho, sigma.dims, untouched);
    FactoredDims vdims = untouched == Which::A ? FactoredDims(psi.d_out, rho.dims.d_B)
                                               : FactoredDims(rho.dims.d_A, psi.d_out);
    // The min-entropy ordering must be violated by the certified margin.
    FactoredDims hdims = untouched == Which::A
                             ? vdims
                             : FactoredDims(vdims.d_B, vdims.d_A);
    Mat mr = untouched == Which::A ? vr : swap_factors(vr, vdims);
    Mat ms = untouched == Which::A ? vs : swap_factors(vs, vdims);
    double hr = hmin_bits_of(mr, hdims);
    double hs = hmin_bits_of(ms, hdims);
    if (hr - hs < tol::witness_min_gap) return fail("witness gap below the minimum");
    double claimed = w.value("hmin_rho", 0.0) - w.value("hmin_sigma", 0.0);
    if (std::abs((hr - hs) - claimed) > 1e-6) return fail("recomputed gap disagrees with claim");
    return pass("entanglement-breaking witness verified by independent recomputation");
  }
  return fail("Undecided certificates carry no verifiable claim");
}

VerifyOutcome verify_family(const json& cert, const std::vector<json>& inputs) {
  if (inputs.size() != 1) return fail("convert-family verification needs the pairs file");
  FamilyInstance inst = family_from_file(inputs[0]);
  std::string verdict = cert.value("verdict", "");
  if (verdict == "Majorized") {
    Channel ch = channel_from_file(cert.at("channel"));
    auto f = validate(ch);
    if (!f.cp || !f.tp) return fail("certified channel is not CPTP");
    for (int i = 0; i < inst.size(); ++i) {
      double r = trace_norm(qmaj::apply(ch, inst.rhos[static_cast<size_t>(i)]) -
                            inst.sigmas[static_cast<size_t>(i)]);
      if (r > tol::decision) return fail("pair residual exceeds tolerance");
    }
    return pass("one channel reproduces every pair");
  }
  if (verdict == "NotMajorized") {
    const json& w = cert.at("witness");
    auto weights = w.at("weights").get<std::vector<double>>();
    std::vector<Mat> omegas;
    for (const auto& om : w.at("omegas")) omegas.push_back(hermitian_part(matrix_from_json(om)));
    if (weights.size() != omegas.size() || static_cast<int>(weights.size()) != inst.size())
      return fail("witness family has the wrong arity");
    int d_w = static_cast<int>(omegas[0].rows());
    FactoredDims vdims(d_w, inst.dim);
    Mat br = zeros(vdims.total()), bs = zeros(vdims.total());
    for (int i = 0; i < inst.size(); ++i) {
      if (!is_psd(omegas[static_cast<size_t>(i)], 1e-7)) return fail("witness omega not PSD");
      br += weights[static_cast<size_t>(i)] *
            tensor(omegas[static_cast<size_t>(i)], inst.rhos[static_cast<size_t>(i)]);
      bs += weights[static_cast<size_t>(i)] *
            tensor(omegas[static_cast<size_t>(i)], inst.sigmas[static_cast<size_t>(i)]);
    }
    double hr = hmin_bits_of(br, vdims), hs = hmin_bits_of(bs, vdims);
    if (hr - hs < tol::witness_min_gap) return fail("family witness gap below the minimum");
    return pass("family witness verified by independent recomputation");
  }
  return fail("Undecided certificates carry no verifiable claim");
}

VerifyOutcome verify_factor(const json& cert, const std::vector<json>& inputs, bool post) {
  if (inputs.size() != 2) return fail("factor verification needs T and S files");
  Channel t = channel_from_file(inputs[0]);
  Channel s = channel_from_file(inputs[1]);
  std::string verdict = cert.value("verdict", "");
  if (verdict == "Factors") {
    Channel phi = channel_from_file(cert.at("channel"));
    auto f = validate(phi);
    if (!f.cp || !f.tp) return fail("certified factor is not CPTP");
    Mat achieved = post ? compose(phi, t).choi : compose(t, phi).choi;
    if (trace_norm(achieved - s.choi) > tol::decision)
      return fail("factored Choi residual exceeds tolerance");
    return pass("factorization verified");
  }
  if (verdict == "NoFactor") {
    const json& w = cert.at("witness");
    if (post) {
      auto weights = w.at("weights").get<std::vector<double>>();
      std::vector<Mat> on_input, on_ref;
      for (const auto& m : w.at("on_input")) on_input.push_back(hermitian_part(matrix_from_json(m)));
      for (const auto& m : w.at("on_ref")) on_ref.push_back(hermitian_part(matrix_from_json(m)));
      FactoredDims vdims(t.d_out, t.d_in);
      Mat rho = zeros(vdims.total());
      double total = 0;
      for (size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] < -1e-12) return fail("negative ensemble weight");
        if (!is_psd(on_input[k], 1e-7) || !is_psd(on_ref[k], 1e-7))
          return fail("ensemble component not PSD");
        rho += weights[k] * tensor(on_ref[k], on_input[k]);
        total += weights[k];
      }
      if (std::abs(total - 1.0) > 1e-8) return fail("ensemble weights do not sum to 1");
      double lhs = hmin_bits_of(apply_to_factor(t, rho, vdims, Which::B),
                                FactoredDims(t.d_out, t.d_out));
      double rhs = hmin_bits_of(apply_to_factor(s, rho, vdims, Which::B),
                                FactoredDims(t.d_out, s.d_out));
      if (lhs - rhs < tol::witness_min_gap) return fail("separable witness gap below the minimum");
      return pass("separable witness verified by independent recomputation");
    }
    Mat x = hermitian_part(matrix_from_json(w.at("x")));
    if (!is_psd(x, 1e-7)) return fail("witness operator not PSD");
    FactoredDims xdims(t.d_out, t.d_in);
    double lhs = operator_norm(hermitian_part(apply_to_factor(adjoint(t), x, xdims, Which::A)));
    double rhs = operator_norm(hermitian_part(apply_to_factor(adjoint(s), x, xdims, Which::A)));
    if (rhs - lhs < tol::witness_min_gap * std::max(1.0, rhs))
      return fail("adjoint-norm witness gap below the minimum");
    return pass("positive-operator witness verified by independent recomputation");
  }
  return fail("Undecided certificates carry no verifiable claim");
}

VerifyOutcome verify_hmin(const json& cert, const std::vector<json>& inputs) {
  if (inputs.size() != 1) return fail("hmin verification needs the state file");
  BipartiteState st = state_from_file(inputs[0]);
  double lambda = cert.at("lambda").get<double>();
  double bits = cert.at("value_bits").get<double>();
  if (std::abs(lambda * std::pow(2.0, bits) - 1.0) > 1e-9)
    return fail("lambda and value_bits are inconsistent");
  Mat omega = hermitian_part(matrix_from_json(cert.at("optimal_omega")));
  if (!is_psd(tensor(identity(st.dims.d_A), omega) - st.rho, 1e-6))
    return fail("primal omega is infeasible");
  if (std::abs(omega.trace().real() - lambda) > 1e-6) return fail("omega trace mismatch");
  Mat x = hermitian_part(matrix_from_json(cert.at("dual_X")));
  if (!is_psd(x, 1e-6)) return fail("dual X not PSD");
  if ((partial_trace(x, st.dims, Which::A) - identity(st.dims.d_B)).norm() > 1e-5)
    return fail("dual X marginal is not the identity");
  double pair = frobenius_inner(x, st.rho).real();
  if (pair < lambda - cert.value("gap", 0.0) - 1e-6) return fail("dual pairing below lambda");
  return pass("primal and dual certificates verified");
}

VerifyOutcome verify_approx(const json& cert, const std::vector<json>& inputs, bool convert) {
  if (inputs.size() != 2) return fail("approx verification needs both input files");
  Channel opt = channel_from_file(cert.at("optimizer"));
  auto f = validate(opt);
  if (!f.cp || !f.tp) return fail("optimizer is not CPTP");
  double delta = cert.at("delta_star").get<double>();
  if (delta < -1e-12) return fail("negative delta");
  if (convert) {
    BipartiteState rho = state_from_file(inputs[0]);
    BipartiteState sigma = state_from_file(inputs[1]);
    double achieved =
        trace_norm(apply_to_factor(opt, rho.rho, rho.dims, Which::B) - sigma.rho);
    if (achieved > delta + 1e-6) return fail("optimizer misses the certified error");
    return pass("optimizer achieves the certified conversion error");
  }
  Channel t = channel_from_file(inputs[0]);
  Channel s = channel_from_file(inputs[1]);
  double achieved = diamond_distance(s, compose(opt, t));
  if (achieved > delta + 1e-6) return fail("optimizer misses the certified diamond error");
  return pass("optimizer achieves the certified factorization error");
}

}  // namespace

VerifyOutcome verify_certificate(const json& cert, const std::vector<json>& inputs) {
  std::string kind = cert.value("kind", "");
  try {
    if (kind == "majorize") return verify_majorize(cert, inputs);
    if (kind == "convert-family") return verify_family(cert, inputs);
    if (kind == "factor-post") return verify_factor(cert, inputs, true);
    if (kind == "factor-pre") return verify_factor(cert, inputs, false);
    if (kind == "hmin") return verify_hmin(cert, inputs);
    if (kind == "approx-convert") return verify_approx(cert, inputs, true);
    if (kind == "approx-factor") return verify_approx(cert, inputs, false);
  } catch (const Error& e) {
    return fail(std::string("verification error: ") + e.what());
  }
  return fail("unknown certificate kind: " + kind);
}

}  // namespace qmaj::io
