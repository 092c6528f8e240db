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

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include <qmaj/io.hpp>
#include <qmaj/oracle.hpp>

using namespace qmaj;
using io::json;

namespace {

// Exit codes: 0 affirmative/ok, 1 negative, 2 undecided, 3 input error.
constexpr int kOk = 0, kNegative = 1, kUndecided = 2, kError = 3;

void print_verdict(const std::string& word, double margin) {
  std::printf("VERDICT %s margin=%.9g\n", word.c_str(), margin);
}

int exit_code(Verdict v) {
  if (v == Verdict::Majorized) return kOk;
  if (v == Verdict::NotMajorized) return kNegative;
  return kUndecided;
}

int exit_code(FactorVerdict v) {
  if (v == FactorVerdict::Factors) return kOk;
  if (v == FactorVerdict::NoFactor) return kNegative;
  return kUndecided;
}

void maybe_save(const std::string& path, const json& cert) {
  if (!path.empty()) io::save_json(path, cert);
}

int run(int argc, char** argv) {
  CLI::App app{"qmaj: decide, certify and quantify quantum majorization"};
  app.require_subcommand(1);

  // hmin
  auto* hmin_cmd = app.add_subcommand("hmin", "conditional min-entropy of a bipartite state");
  std::string hmin_state, hmin_cert;
  hmin_cmd->add_option("state", hmin_state)->required();
  hmin_cmd->add_option("--cert", hmin_cert);

  // majorize
  auto* maj_cmd = app.add_subcommand("majorize", "decide sigma = (id (x) Phi) rho");
  std::string maj_rho, maj_sigma, maj_cert, maj_factor = "B";
  double maj_tol = tol::decision;
  maj_cmd->add_option("rho", maj_rho)->required();
  maj_cmd->add_option("sigma", maj_sigma)->required();
  maj_cmd->add_option("--factor", maj_factor)->check(CLI::IsMember({"A", "B"}));
  maj_cmd->add_option("--tol", maj_tol);
  maj_cmd->add_option("--cert", maj_cert);

  // convert-family
  auto* fam_cmd = app.add_subcommand("convert-family", "one channel for a family of pairs");
  std::string fam_pairs, fam_cert;
  fam_cmd->add_option("pairs", fam_pairs)->required();
  fam_cmd->add_option("--cert", fam_cert);

  // factor-post / factor-pre
  auto* fp_cmd = app.add_subcommand("factor-post", "decide Phi o T = S");
  auto* fq_cmd = app.add_subcommand("factor-pre", "decide T o Phi = S");
  std::string f_t, f_s, f_cert, q_t, q_s, q_cert;
  fp_cmd->add_option("T", f_t)->required();
  fp_cmd->add_option("S", f_s)->required();
  fp_cmd->add_option("--cert", f_cert);
  fq_cmd->add_option("T", q_t)->required();
  fq_cmd->add_option("S", q_s)->required();
  fq_cmd->add_option("--cert", q_cert);

  // diamond
  auto* dia_cmd = app.add_subcommand("diamond", "diamond-norm distance of two channels");
  std::string dia_t, dia_s;
  dia_cmd->add_option("T", dia_t)->required();
  dia_cmd->add_option("S", dia_s)->required();

  // approx-convert / approx-factor
  auto* ac_cmd = app.add_subcommand("approx-convert", "minimal conversion error");
  std::string ac_rho, ac_sigma, ac_cert;
  ac_cmd->add_option("rho", ac_rho)->required();
  ac_cmd->add_option("sigma", ac_sigma)->required();
  ac_cmd->add_option("--cert", ac_cert);
  auto* af_cmd = app.add_subcommand("approx-factor", "minimal post-factorization error");
  std::string af_t, af_s, af_cert;
  af_cmd->add_option("T", af_t)->required();
  af_cmd->add_option("S", af_s)->required();
  af_cmd->add_option("--cert", af_cert);

  // verify
  auto* ver_cmd = app.add_subcommand("verify", "re-check a certificate from the inputs");
  std::string ver_cert;
  std::vector<std::string> ver_inputs;
  ver_cmd->add_option("certificate", ver_cert)->required();
  ver_cmd->add_option("inputs", ver_inputs);

  // random
  auto* rnd_cmd = app.add_subcommand("random", "reproducible instance generator");
  std::string rnd_what, rnd_out;
  int rnd_dim = 2, rnd_rank = 0, rnd_da = 0, rnd_db = 0, rnd_din = 2, rnd_dout = 2, rnd_env = 2;
  std::uint64_t rnd_seed = 1;
  rnd_cmd->add_option("what", rnd_what)->required()->check(CLI::IsMember({"state", "channel"}));
  rnd_cmd->add_option("--dim", rnd_dim);
  rnd_cmd->add_option("--rank", rnd_rank);
  rnd_cmd->add_option("--dA", rnd_da);
  rnd_cmd->add_option("--dB", rnd_db);
  rnd_cmd->add_option("--din", rnd_din);
  rnd_cmd->add_option("--dout", rnd_dout);
  rnd_cmd->add_option("--env", rnd_env);
  rnd_cmd->add_option("--seed", rnd_seed);
  rnd_cmd->add_option("--out", rnd_out);

  // selftest
  auto* st_cmd = app.add_subcommand("selftest", "run the oracle suites");
  int st_n = 20;
  std::uint64_t st_seed = 1;
  std::string st_out;
  st_cmd->add_option("--n", st_n);
  st_cmd->add_option("--seed", st_seed);
  st_cmd->add_option("--out", st_out);

  CLI11_PARSE(app, argc, argv);

  if (hmin_cmd->parsed()) {
    BipartiteState st = io::state_from_file(io::load_json(hmin_state));
    HminResult res = hmin(st);
    std::printf("H_min = %.6f bits\n", res.value_bits);
    std::printf("lambda = %.12g\n", res.lambda);
    maybe_save(hmin_cert, io::certificate(res));
    print_verdict("ok", res.gap);
    return kOk;
  }

  if (maj_cmd->parsed()) {
    BipartiteState rho = io::state_from_file(io::load_json(maj_rho));
    BipartiteState sigma = io::state_from_file(io::load_json(maj_sigma));
    Which factor = maj_factor == "A" ? Which::A : Which::B;
    auto dec = is_majorized(rho, sigma, maj_tol, factor);
    maybe_save(maj_cert, io::certificate(dec, factor));
    if (dec.verdict == Verdict::Majorized)
      print_verdict("Majorized", dec.feas_residual);
    else if (dec.verdict == Verdict::NotMajorized)
      print_verdict("NotMajorized", dec.witness_gap);
    else
      print_verdict("Undecided", dec.sep_margin);
    return exit_code(dec.verdict);
  }

  if (fam_cmd->parsed()) {
    FamilyInstance inst = io::family_from_file(io::load_json(fam_pairs));
    auto dec = convert_family(inst);
    maybe_save(fam_cert, io::certificate(dec));
    if (dec.verdict == Verdict::Majorized)
      print_verdict("Majorized", dec.feas_residual);
    else if (dec.verdict == Verdict::NotMajorized)
      print_verdict("NotMajorized", dec.witness_gap);
    else
      print_verdict("Undecided", 0.0);
    return exit_code(dec.verdict);
  }

  if (fp_cmd->parsed() || fq_cmd->parsed()) {
    bool post = fp_cmd->parsed();
    Channel t = io::channel_from_file(io::load_json(post ? f_t : q_t));
    Channel s = io::channel_from_file(io::load_json(post ? f_s : q_s));
    auto dec = post ? post_factor(t, s) : pre_factor(t, s);
    maybe_save(post ? f_cert : q_cert, io::certificate(dec, post ? "factor-post" : "factor-pre"));
    if (dec.verdict == FactorVerdict::Factors)
      print_verdict("Factors", dec.residual);
    else if (dec.verdict == FactorVerdict::NoFactor)
      print_verdict("NoFactor", dec.witness_gap);
    else
      print_verdict("Undecided", 0.0);
    return exit_code(dec.verdict);
  }

  if (dia_cmd->parsed()) {
    Channel t = io::channel_from_file(io::load_json(dia_t));
    Channel s = io::channel_from_file(io::load_json(dia_s));
    double d = diamond_distance(t, s);
    std::printf("diamond = %.12g\n", d);
    print_verdict("ok", d);
    return kOk;
  }

  if (ac_cmd->parsed()) {
    BipartiteState rho = io::state_from_file(io::load_json(ac_rho));
    BipartiteState sigma = io::state_from_file(io::load_json(ac_sigma));
    auto res = min_conversion_error(rho, sigma);
    std::printf("delta_star = %.12g\n", res.delta_star);
    maybe_save(ac_cert, io::certificate(res, "approx-convert"));
    print_verdict("ok", res.delta_star);
    return kOk;
  }

  if (af_cmd->parsed()) {
    Channel t = io::channel_from_file(io::load_json(af_t));
    Channel s = io::channel_from_file(io::load_json(af_s));
    auto res = min_post_factor_error(t, s);
    std::printf("delta_star = %.12g\n", res.delta_star);
    maybe_save(af_cert, io::certificate(res, "approx-factor"));
    print_verdict("ok", res.delta_star);
    return kOk;
  }

  if (ver_cmd->parsed()) {
    json cert = io::load_json(ver_cert);
    std::vector<json> inputs;
    for (const auto& p : ver_inputs) inputs.push_back(io::load_json(p));
    auto out = io::verify_certificate(cert, inputs);
    std::printf("%s\n", out.message.c_str());
    print_verdict(out.ok ? "verified" : "rejected", 0.0);
    return out.ok ? kOk : kNegative;
  }

  if (rnd_cmd->parsed()) {
    json j;
    if (rnd_what == "state") {
      int da = rnd_da > 0 ? rnd_da : 1;
      int db = rnd_db > 0 ? rnd_db : rnd_dim;
      int total = da * db;
      int rank = rnd_rank > 0 ? rnd_rank : total;
      Mat rho = oracle::random_density(total, rank, rnd_seed);
      j = io::state_file(BipartiteState(rho, FactoredDims(da, db)));
    } else {
      Channel ch = oracle::random_cptp(rnd_din, rnd_dout, rnd_env, rnd_seed);
      j = io::channel_file(ch);
    }
    if (rnd_out.empty())
      std::cout << j.dump(2) << "\n";
    else
      io::save_json(rnd_out, j);
    return kOk;
  }

  if (st_cmd->parsed()) {
    json rep;
    rep["version"] = io::kToolVersion;
    rep["monotonicity"] = json::parse(oracle::monotonicity_suite(st_n, st_seed));
    rep["roundtrip"] = json::parse(oracle::majorization_roundtrip_suite(st_n, st_seed));
    std::string text = rep.dump(2);
    if (st_out.empty())
      std::cout << text << "\n";
    else {
      std::ofstream out(st_out);
      out << text << "\n";
    }
    bool ok = rep["monotonicity"]["fail"].get<int>() == 0 &&
              rep["roundtrip"]["planted_feasible"]["not_majorized"].get<int>() == 0 &&
              rep["roundtrip"]["planted_infeasible"]["majorized"].get<int>() == 0;
    return ok ? kOk : kNegative;
  }

  return kError;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const DimensionError& e) {
    std::fprintf(stderr, "ERROR dimension: %s\n", e.what());
  } catch (const InputError& e) {
    std::fprintf(stderr, "ERROR input: %s\n", e.what());
  } catch (const SolverError& e) {
    std::fprintf(stderr, "ERROR solver: %s (bounds %.9g / %.9g)\n", e.what(), e.primal_bound,
                 e.dual_bound);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ERROR internal: %s\n", e.what());
  }
  return kError;
}
