// Drives the installed CLI binary end to end: exit codes are the machine
// contract, VERDICT lines the stable grep target.
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef QMAJ_CLI_PATH
#define QMAJ_CLI_PATH "qmaj"
#endif
#ifndef QMAJ_FIXTURES
#define QMAJ_FIXTURES "."
#endif

namespace {

struct RunResult {
  int code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string out_path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                         "/qmaj_cli_out.txt";
  std::string cmd = std::string(QMAJ_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
  int raw = std::system(cmd.c_str());
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(raw), ss.str()};
}

std::string fixture(const std::string& name) { return std::string(QMAJ_FIXTURES) + "/" + name; }

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("hmin prints the pinned fixture values") {
  auto me = run_cli("hmin " + fixture("max_entangled_2.json"));
  CHECK(me.code == 0);
  CHECK(contains(me.out, "H_min = -1.000000 bits"));
  CHECK(contains(me.out, "VERDICT ok"));

  auto prod = run_cli("hmin " + fixture("pi_sigma_product_2.json"));
  CHECK(prod.code == 0);
  CHECK(contains(prod.out, "H_min = 1.000000 bits"));
}

TEST_CASE("majorize exit codes: 0 feasible, 1 infeasible, 2/3 reserved") {
  auto same = run_cli("majorize " + fixture("pi_pi_product_2.json") + " " +
                      fixture("pi_pi_product_2.json"));
  CHECK(same.code == 0);
  CHECK(contains(same.out, "VERDICT Majorized"));

  auto neg = run_cli("majorize " + fixture("pi_pi_product_2.json") + " " +
                     fixture("max_entangled_2.json"));
  CHECK(neg.code == 1);
  CHECK(contains(neg.out, "VERDICT NotMajorized"));

  auto bad = run_cli("majorize missing.json also-missing.json");
  CHECK(bad.code == 3);
  CHECK(contains(bad.out, "ERROR"));
}

TEST_CASE("certificate round trip through the CLI, tamper detection") {
  std::string tmp = std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp";
  std::string cert = tmp + "/qmaj_cert.json";
  auto neg = run_cli("majorize " + fixture("pi_pi_product_2.json") + " " +
                     fixture("max_entangled_2.json") + " --cert " + cert);
  REQUIRE(neg.code == 1);

  auto ver = run_cli("verify " + cert + " " + fixture("pi_pi_product_2.json") + " " +
                     fixture("max_entangled_2.json"));
  CHECK(ver.code == 0);
  CHECK(contains(ver.out, "VERDICT verified"));

  // Tamper with a witness entry by 1e-2 and re-verify: must fail.
  std::ifstream in(cert);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  auto pos = text.find("\"hmin_rho\"");
  REQUIRE(pos != std::string::npos);
  std::string tampered_path = tmp + "/qmaj_cert_tampered.json";
  {
    // Perturb the first witness channel entry instead of the scalar field:
    // rewrite via crude but robust JSON edit through the CLI-independent path.
    std::ofstream out(tampered_path);
    auto dpos = text.find("\"eb_channel\"");
    REQUIRE(dpos != std::string::npos);
    auto npos = text.find("0.", dpos);
    REQUIRE(npos != std::string::npos);
    text.insert(npos, "1");  // 0.x -> 10.x
    out << text;
  }
  auto bad = run_cli("verify " + tampered_path + " " + fixture("pi_pi_product_2.json") + " " +
                     fixture("max_entangled_2.json"));
  CHECK(bad.code != 0);
}

TEST_CASE("random generator and diamond distance through the CLI") {
  std::string tmp = std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp";
  std::string t_path = tmp + "/qmaj_t.json", s_path = tmp + "/qmaj_s.json";
  CHECK(run_cli("random channel --din 2 --dout 2 --env 2 --seed 7 --out " + t_path).code == 0);
  CHECK(run_cli("random channel --din 2 --dout 2 --env 2 --seed 8 --out " + s_path).code == 0);
  auto dia = run_cli("diamond " + t_path + " " + s_path);
  CHECK(dia.code == 0);
  CHECK(contains(dia.out, "diamond = "));

  auto fp = run_cli("factor-post " + t_path + " " + t_path);
  CHECK(fp.code == 0);
  CHECK(contains(fp.out, "VERDICT Factors"));

  // Deterministic generation: same seed, same bytes.
  std::string again = tmp + "/qmaj_t2.json";
  CHECK(run_cli("random channel --din 2 --dout 2 --env 2 --seed 7 --out " + again).code == 0);
  std::ifstream a(t_path), b(again);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
}

TEST_CASE("convert-family through the CLI with certificate round trip") {
  std::string tmp = std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp";
  std::string cert = tmp + "/qmaj_family_cert.json";
  auto neg = run_cli("convert-family " + fixture("family_obstruction.json") + " --cert " + cert);
  CHECK(neg.code == 1);
  CHECK(contains(neg.out, "VERDICT NotMajorized"));
  auto ver = run_cli("verify " + cert + " " + fixture("family_obstruction.json"));
  CHECK(ver.code == 0);
}

TEST_CASE("selftest is deterministic and passes") {
  std::string tmp = std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp";
  auto r1 = run_cli("selftest --n 6 --seed 42 --out " + tmp + "/st1.json");
  auto r2 = run_cli("selftest --n 6 --seed 42 --out " + tmp + "/st2.json");
  CHECK(r1.code == 0);
  CHECK(r2.code == 0);
  std::ifstream a(tmp + "/st1.json"), b(tmp + "/st2.json");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(!sa.str().empty());
}
