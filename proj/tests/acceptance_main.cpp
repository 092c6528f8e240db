// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero when any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <qmaj/approx.hpp>
#include <qmaj/factorize.hpp>
#include <qmaj/io.hpp>
#include <qmaj/oracle.hpp>

#ifndef QMAJ_CLI_PATH
#define QMAJ_CLI_PATH "qmaj"
#endif

using namespace qmaj;
using io::json;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int idx, bool ok, const std::string& what, const std::string& detail,
            double seconds) {
  std::printf("%s criterion %d: %s (%s, %.2fs)\n", ok ? "PASS" : "FAIL", idx, what.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

Mat max_entangled2() {
  Mat psi = Mat::Zero(4, 1);
  psi(0, 0) = psi(3, 0) = 1.0 / std::sqrt(2.0);
  return psi * psi.adjoint();
}

std::string tmpdir() {
  const char* t = std::getenv("TMPDIR");
  return t ? t : "/tmp";
}

int run_command(const std::string& cmd) {
  int raw = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(raw);
}

struct Planted {
  Mat rho, sigma;
};

Planted plant_infeasible(oracle::Seed seed, bool equal_marginals) {
  const FactoredDims dims(2, 2);
  for (int attempt = 0;; ++attempt) {
    oracle::Seed s = Pcg32::derive(seed, 7000 + static_cast<oracle::Seed>(attempt));
    Mat pure = oracle::random_density(4, 1, s);
    Mat sigma = hermitian_part(0.98 * pure + 0.02 * identity(4) / 4.0);
    if (eig_min(partial_transpose(sigma, dims, Which::B)) > -0.05) continue;
    Mat rho = equal_marginals
                  ? Mat(hermitian_part(
                        tensor(partial_trace(sigma, dims, Which::B), identity(2) / 2.0)))
                  : oracle::random_separable(dims, 3,
                                             Pcg32::derive(seed, 9000 + static_cast<oracle::Seed>(attempt)));
    return {rho, sigma};
  }
}

// --------------------------------------------------------------------------

void criterion1() {
  Timer t;
  bool ok = true;
  std::ostringstream d;

  Timer t_prod;
  Mat sigma_b = oracle::random_density(2, 2, 11);
  BipartiteState prod(hermitian_part(tensor(identity(2) / 2.0, sigma_b)), FactoredDims(2, 2));
  auto r1 = hmin(prod);
  double dt_prod = t_prod.seconds();
  if (std::abs(r1.value_bits - 1.0) > 1e-6) ok = false;

  Timer t_me;
  BipartiteState me(max_entangled2(), FactoredDims(2, 2));
  auto r2 = hmin(me);
  double dt_me = t_me.seconds();
  if (std::abs(r2.value_bits + 1.0) > 1e-6) ok = false;
  double grid = oracle::grid_hmin(me.rho, me.dims, 10000);
  if (std::abs(grid - r2.lambda) > 1e-3) ok = false;
  if (dt_prod >= 1.0 || dt_me >= 1.0) ok = false;

  d << "product=" << r1.value_bits << " entangled=" << r2.value_bits << " grid_lambda=" << grid;
  report(1, ok, "pinned H_min values with grid cross-check", d.str(), t.seconds());
}

void criterion2() {
  Timer t;
  double worst = 0;
  int n = 0;
  for (int k = 0; k < 100; ++k) {
    int da = 2 + k % 2, db = 2 + (k / 2) % 2;
    Mat rho = oracle::random_density(da * db, da * db, 2000 + k);
    BipartiteState st(rho, FactoredDims(da, db));
    double primal = hmin(st).lambda;
    double dual = hmin_dual(st).first;
    worst = std::max(worst, std::abs(primal - dual));
    ++n;
  }
  bool ok = worst <= 1e-6 && t.seconds() < 60.0;
  std::ostringstream d;
  d << n << " instances, worst |primal-dual| = " << worst;
  report(2, ok, "strong duality of the min-entropy programs", d.str(), t.seconds());
}

void criterion3() {
  Timer t;
  double worst = 0;
  int violations = 0;
  for (int k = 0; k < 100; ++k) {
    int da = 2 + k % 2, db = 2 + (k / 3) % 2;
    FactoredDims dims(da, db);
    Mat rho = oracle::random_density(dims.total(), dims.total(), 3000 + k);
    Channel phi = oracle::random_cptp(db, db, 1 + k % 3, 3500 + k);
    BipartiteState st(rho, dims);
    double before = hmin(st).value_bits;
    Mat processed = hermitian_part(apply_to_factor(phi, rho, dims, Which::B));
    double after = hmin(BipartiteState(processed, dims)).value_bits;
    worst = std::max(worst, before - after);
    if (after < before - 1e-6) ++violations;
  }
  bool ok = violations == 0;
  std::ostringstream d;
  d << "100 instances, violations = " << violations << ", worst drop = " << worst << " bits";
  report(3, ok, "data processing under conditioning-side channels", d.str(), t.seconds());
}

void criterion4() {
  Timer t;
  const FactoredDims dims(2, 2);
  int majorized = 0, undecided = 0, rejected = 0;
  double worst_residual = 0;
  for (int k = 0; k < 200; ++k) {
    Mat rho = oracle::random_density(4, 2 + k % 3, 4000 + k);
    Channel phi = oracle::random_cptp(2, 2, 1 + k % 4, 4500 + k);
    Mat sigma = hermitian_part(apply_to_factor(phi, rho, dims, Which::B));
    auto dec = is_majorized(BipartiteState(rho, dims), BipartiteState(sigma, dims));
    if (dec.verdict == Verdict::Majorized) {
      ++majorized;
      double resid =
          trace_norm(apply_to_factor(*dec.channel, rho, dims, Which::B) - sigma);
      worst_residual = std::max(worst_residual, resid);
    } else if (dec.verdict == Verdict::Undecided) {
      ++undecided;
    } else {
      ++rejected;
    }
  }
  bool ok = rejected == 0 && undecided <= 4 && worst_residual <= 1e-6 && t.seconds() < 300.0;
  std::ostringstream d;
  d << "majorized=" << majorized << " undecided=" << undecided << " rejected=" << rejected
    << " worst_residual=" << worst_residual;
  report(4, ok, "completeness on 200 planted-feasible instances", d.str(), t.seconds());
}

void criterion5() {
  Timer t;
  const FactoredDims dims(2, 2);
  int not_majorized = 0, undecided = 0, wrong = 0, verify_failures = 0;
  double worst_gap = std::numeric_limits<double>::infinity();
  std::string dir = tmpdir();

  auto check_one = [&](const Mat& rho, const Mat& sigma) {
    BipartiteState r(rho, dims), s(sigma, dims);
    auto dec = is_majorized(r, s);
    if (dec.verdict == Verdict::Majorized) {
      ++wrong;
      return;
    }
    if (dec.verdict == Verdict::Undecided) {
      ++undecided;
      return;
    }
    ++not_majorized;
    worst_gap = std::min(worst_gap, dec.witness_gap);
    if (dec.witness_gap < 1e-5) ++verify_failures;
    // Offline re-verification through the CLI with independent recomputation.
    std::string rp = dir + "/acc5_rho.json", sp = dir + "/acc5_sigma.json",
                cp = dir + "/acc5_cert.json";
    io::save_json(rp, io::state_file(r));
    io::save_json(sp, io::state_file(s));
    io::save_json(cp, io::certificate(dec, Which::B));
    int code = run_command(std::string(QMAJ_CLI_PATH) + " verify " + cp + " " + rp + " " + sp);
    if (code != 0) ++verify_failures;
  };

  check_one(Mat(identity(4) / 4.0), max_entangled2());
  for (int k = 0; k < 50; ++k) {
    auto inst = plant_infeasible(5000 + k, k % 2 == 0);
    check_one(inst.rho, inst.sigma);
  }
  bool ok = wrong == 0 && verify_failures == 0 && not_majorized >= 1;
  std::ostringstream d;
  d << "not_majorized=" << not_majorized << " undecided=" << undecided
    << " verify_failures=" << verify_failures << " min_gap_bits="
    << (std::isfinite(worst_gap) ? worst_gap : 0.0);
  report(5, ok, "witness soundness with offline re-verification", d.str(), t.seconds());
}

void criterion6() {
  Timer t;
  int agree = 0, undecided = 0, disagree = 0;
  for (int k = 0; k < 100; ++k) {
    Channel a = oracle::random_cptp(2, 2, 1 + k % 4, 6000 + k);
    Channel b = (k % 2 == 0) ? compose(oracle::random_cptp(2, 2, 2, 6500 + k), a)
                             : oracle::random_cptp(2, 2, 1 + (k / 2) % 4, 6500 + k);
    auto rep = choi_majorization_equiv(a, b);
    if (rep.any_undecided)
      ++undecided;
    else if (rep.agree)
      ++agree;
    else
      ++disagree;
  }
  bool ok = disagree == 0;
  std::ostringstream d;
  d << "agree=" << agree << " undecided=" << undecided << " disagree=" << disagree;
  report(6, ok, "factorization agrees with Choi-state majorization", d.str(), t.seconds());
}

void criterion7() {
  Timer t;
  Mat z = zeros(2);
  z(0, 0) = 1;
  z(1, 1) = -1;
  double dist = diamond_distance(identity_channel(2), unitary_channel(z));
  bool ok = std::abs(dist - 2.0) <= 1e-5;
  double worst = 0;
  for (int k = 0; k < 50; ++k) {
    Channel a = oracle::random_cptp(2, 2, 1 + k % 3, 7000 + k);
    Channel b = oracle::random_cptp(2, 2, 1 + (k / 3) % 3, 7500 + k);
    Mat jd = a.choi - b.choi;
    double primal = diamond_norm(jd, 2, 2);
    double sup = diamond_sup_form(jd, 2, 2);
    worst = std::max(worst, std::abs(primal - sup));
  }
  if (worst > 1e-6) ok = false;
  std::ostringstream d;
  d << "orthogonal-unitary distance=" << dist << ", worst primal-vs-sup=" << worst;
  report(7, ok, "diamond norm: pinned value and two-route agreement", d.str(), t.seconds());
}

void criterion8() {
  Timer t;
  const FactoredDims dims(2, 2);
  bool ok = true;
  double worst_feasible = 0, min_infeasible = std::numeric_limits<double>::infinity();
  int slack_checks = 0, slack_failures = 0;

  // Feasible side: delta_star vanishes exactly when the decision says so.
  for (int k = 0; k < 20; ++k) {
    Mat rho = oracle::random_density(4, 2 + k % 3, 8000 + k);
    Channel phi = oracle::random_cptp(2, 2, 1 + k % 3, 8200 + k);
    Mat sigma = hermitian_part(apply_to_factor(phi, rho, dims, Which::B));
    BipartiteState r(rho, dims), s(sigma, dims);
    auto dec = is_majorized(r, s);
    auto res = min_conversion_error(r, s);
    if (dec.verdict == Verdict::Majorized) {
      worst_feasible = std::max(worst_feasible, res.delta_star);
      if (res.delta_star > 1e-6) ok = false;
    }
  }

  // Infeasible side with equal untouched-factor marginals, so the slack
  // inequality applies; 100 random witnesses in total.
  for (int inst = 0; inst < 10; ++inst) {
    auto planted = plant_infeasible(8400 + inst, true);
    BipartiteState r(planted.rho, dims), s(planted.sigma, dims);
    auto res = min_conversion_error(r, s);
    min_infeasible = std::min(min_infeasible, res.delta_star);
    if (res.delta_star < 1e-3) ok = false;
    for (int w = 0; w < 10; ++w) {
      Channel psi = oracle::random_cptp(2, 2, 1 + w % 3, 8600 + 16 * inst + w);
      ++slack_checks;
      if (!check_conversion_slack(r, s, psi, res.delta_star)) {
        ++slack_failures;
        ok = false;
      }
    }
  }
  std::ostringstream d;
  d << "worst feasible delta=" << worst_feasible << ", min infeasible delta=" << min_infeasible
    << ", slack failures=" << slack_failures << "/" << slack_checks;
  report(8, ok, "approximate conversion consistency and slack inequality", d.str(), t.seconds());
}

void criterion9() {
  Timer t;
  bool ok = true;

  // Functional obstruction: identical inputs, distinct outputs.
  Mat p0 = zeros(2), p1 = zeros(2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  FamilyInstance bad;
  bad.dim = 2;
  bad.rhos = {Mat(identity(2) / 2.0), Mat(identity(2) / 2.0)};
  bad.sigmas = {p0, p1};
  auto neg = convert_family(bad);
  if (neg.verdict != Verdict::NotMajorized) ok = false;

  // Planted joint-feasible 3-families plus the subfamily consistency scan.
  int majorized = 0, undecided = 0, violations = 0;
  for (int k = 0; k < 50; ++k) {
    Channel phi = oracle::random_cptp(2, 2, 1 + k % 3, 9000 + k);
    FamilyInstance inst;
    inst.dim = 2;
    for (int i = 0; i < 3; ++i) {
      Mat rho = oracle::random_density(2, 1 + (k + i) % 2, 9300 + 4 * k + i);
      inst.rhos.push_back(rho);
      inst.sigmas.push_back(hermitian_part(qmaj::apply(phi, rho)));
    }
    auto dec = convert_family(inst);
    if (dec.verdict == Verdict::Majorized)
      ++majorized;
    else if (dec.verdict == Verdict::Undecided)
      ++undecided;
    else
      ok = false;
    auto rep = finite_subfamily_scan(inst, 2);
    violations += rep.consistency_violations;
    if (rep.full_verdict == Verdict::Majorized && !rep.first_infeasible.empty()) ok = false;
  }
  if (violations != 0) ok = false;
  std::ostringstream d;
  d << "obstruction verdict ok, planted majorized=" << majorized << " undecided=" << undecided
    << " scan violations=" << violations;
  report(9, ok, "family convertibility and subfamily consistency", d.str(), t.seconds());
}

void criterion10() {
  Timer t;
  std::string dir = tmpdir();
  std::string a = dir + "/acc10_a.json", b = dir + "/acc10_b.json";
  int c1 = run_command(std::string(QMAJ_CLI_PATH) + " selftest --seed 42 --out " + a);
  int c2 = run_command(std::string(QMAJ_CLI_PATH) + " selftest --seed 42 --out " + b);
  std::ifstream fa(a), fb(b);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  bool ok = c1 == 0 && c2 == 0 && !sa.str().empty() && sa.str() == sb.str();
  std::ostringstream d;
  d << "exit codes " << c1 << "/" << c2 << ", " << sa.str().size() << " bytes, byte-identical="
    << (sa.str() == sb.str() ? "yes" : "no");
  report(10, ok, "selftest determinism", d.str(), t.seconds());
}

}  // namespace

int main() {
  Timer total;
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::printf("%s: %d/10 criteria passed (%.1fs total)\n", g_failures == 0 ? "ACCEPT" : "REJECT",
              10 - g_failures, total.seconds());
  return g_failures == 0 ? 0 : 1;
}
