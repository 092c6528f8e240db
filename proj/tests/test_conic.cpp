#include <doctest.h>

#include <cstring>
#include <qmaj/conic.hpp>

#include "test_util.hpp"

using namespace qmaj;
using testutil::random_hermitian;

TEST_CASE("embed_complex basics") {
  CHECK((embed_complex(identity(2)) - RMat::Identity(4, 4)).norm() < 1e-14);

  Mat sy = zeros(2);
  sy(0, 1) = Complex(0, -1);
  sy(1, 0) = Complex(0, 1);
  Eigen::SelfAdjointEigenSolver<RMat> es(embed_complex(sy));
  RVec v = es.eigenvalues();
  CHECK(v(0) == doctest::Approx(-1.0));
  CHECK(v(1) == doctest::Approx(-1.0));
  CHECK(v(2) == doctest::Approx(1.0));
  CHECK(v(3) == doctest::Approx(1.0));

  Pcg32 rng(3);
  Mat h = random_hermitian(4, rng);
  Eigen::SelfAdjointEigenSolver<RMat> es2(embed_complex(h));
  CHECK(es2.eigenvalues()(0) == doctest::Approx(eig_min(h)).epsilon(1e-10));

  // The embedding adjoint reproduces complex pairings.
  Mat g = random_hermitian(4, rng);
  double lhs = (embed_complex(h).cwiseProduct(embed_complex(g))).sum();
  double rhs = frobenius_inner(h, unembed_dual(embed_complex(g))).real();
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("solve: largest eigenvalue as an SDP, with dual certificate") {
  Pcg32 rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    int d = 2 + trial % 3;
    Mat a = random_hermitian(d, rng);
    SdpProblem p;
    VarId t = p.add_var("t", 1);
    Mat one = identity(1);
    p.minimize({{t, one}});
    // t*I - A >= 0
    p.add_psd(MatExpr::mapped(p.var(t), d,
                              [d](const Mat& x) { return Mat(x(0, 0) * identity(d)); }) -
              MatExpr::constant(a));
    auto sol = solve(p);
    REQUIRE(sol.status == SdpStatus::Optimal);
    CHECK(sol.primal_value == doctest::Approx(eig_max(a)).epsilon(1e-6));
    CHECK(sol.primal_value >= sol.dual_value - 1e-6);
    CHECK(sol.gap <= tol::gap * (1 + std::abs(sol.primal_value)) * 20);
    // Dual optimizer is a state achieving lambda_max.
    const Mat& z = sol.psd_duals[0];
    CHECK(is_psd(z, 1e-7));
    CHECK(std::abs(z.trace().real() - 1.0) < 1e-5);
  }
}

TEST_CASE("solve: maximize Tr(A rho) over densities equals lambda_max") {
  Pcg32 rng(9);
  Mat a = random_hermitian(3, rng);
  SdpProblem p;
  VarId rho = p.add_var("rho", 3);
  p.maximize({{rho, a}});
  p.add_psd(p.var(rho));
  p.add_eq(MatExpr::trace_of(p.var(rho)) - MatExpr::constant(identity(1)));
  auto sol = solve(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.primal_value == doctest::Approx(eig_max(a)).epsilon(1e-6));
  CHECK(is_psd(sol.primal_vars[0], 1e-7));
  CHECK(std::abs(sol.primal_vars[0].trace().real() - 1) < 1e-7);
}

TEST_CASE("solve: density feasibility problem") {
  SdpProblem p;
  VarId x = p.add_var("x", 3);
  p.add_psd(p.var(x));
  p.add_eq(MatExpr::trace_of(p.var(x)) - MatExpr::constant(identity(1)));
  auto sol = solve(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(is_psd(sol.primal_vars[0], 1e-7));
  CHECK(std::abs(sol.primal_vars[0].trace().real() - 1) < 1e-6);
}

TEST_CASE("solve: infeasible trace sign returns verified Farkas certificate") {
  SdpProblem p;
  VarId x = p.add_var("x", 2);
  p.add_psd(p.var(x));
  Mat negone = -identity(1);
  p.add_eq(MatExpr::trace_of(p.var(x)) - MatExpr::constant(negone));
  auto sol = solve(p);
  REQUIRE(sol.status == SdpStatus::Infeasible);
  // Certificate contract: Z_j >= 0, the combined linear functional vanishes,
  // and the affine value sum_j <Z_j, C_j> + sum_i <Y_i, K_i> is negative
  // (C_j, K_i the constant parts of the PSD and equality expressions).
  REQUIRE(sol.psd_duals.size() == 1);
  REQUIRE(sol.eq_duals.size() == 1);
  CHECK(is_psd(sol.psd_duals[0], 1e-8));
  double y = sol.eq_duals[0](0, 0).real();
  // PSD constant is zero, equality constant is +1, so the value is y.
  CHECK(y < -1e-8);
  // Linear part: <Z, H> + y Tr H = 0 for every Hermitian H, i.e. Z = -y I.
  CHECK((sol.psd_duals[0] - (-y) * identity(2)).norm() < 1e-6);
}

TEST_CASE("solve: complex data (sigma_y objective coupling)") {
  // min t s.t. t I >= H for a genuinely complex Hermitian H.
  Mat h = zeros(2);
  h(0, 1) = Complex(0.3, -0.7);
  h(1, 0) = Complex(0.3, 0.7);
  h(0, 0) = 0.2;
  h(1, 1) = -0.4;
  SdpProblem p;
  VarId t = p.add_var("t", 1);
  p.minimize({{t, identity(1)}});
  p.add_psd(MatExpr::mapped(p.var(t), 2, [](const Mat& x) { return Mat(x(0, 0) * identity(2)); }) -
            MatExpr::constant(h));
  auto sol = solve(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.primal_value == doctest::Approx(eig_max(h)).epsilon(1e-7));
}

TEST_CASE("solve: unbounded objective returns an improving ray") {
  SdpProblem p;
  VarId x = p.add_var("x", 1);
  p.minimize({{x, identity(1)}});
  // x unconstrained below: x >= -10 only from... no constraint at all.
  auto sol = solve(p);
  CHECK(sol.status == SdpStatus::Unbounded);
}

TEST_CASE("solve: reproducibility is bit-for-bit") {
  Pcg32 rng(41);
  Mat a = random_hermitian(3, rng);
  auto run = [&]() {
    SdpProblem p;
    VarId t = p.add_var("t", 1);
    p.minimize({{t, identity(1)}});
    p.add_psd(MatExpr::mapped(p.var(t), 3, [](const Mat& x) { return Mat(x(0, 0) * identity(3)); }) -
              MatExpr::constant(a));
    return solve(p);
  };
  auto s1 = run();
  auto s2 = run();
  CHECK(std::memcmp(&s1.primal_value, &s2.primal_value, sizeof(double)) == 0);
  CHECK(std::memcmp(&s1.dual_value, &s2.dual_value, sizeof(double)) == 0);
  CHECK(s1.primal_vars[0] == s2.primal_vars[0]);
}

TEST_CASE("solver tolerance override via environment") {
  setenv("QMAJ_SOLVER_TOL", "1e-9", 1);
  CHECK(solver_gap_tol_from_env() == 1e-9);
  setenv("QMAJ_SOLVER_TOL", "not-a-number", 1);
  CHECK(solver_gap_tol_from_env() == tol::gap);
  unsetenv("QMAJ_SOLVER_TOL");
  CHECK(solver_gap_tol_from_env() == tol::gap);
}

TEST_CASE("solve: equality-constrained conditional-cover program") {
  // min Tr w  s.t.  I_2 (x) w >= rho, for the maximally entangled state:
  // the optimum is 2 (achieved by w = I).
  Mat me = testutil::max_entangled(2);
  SdpProblem p;
  VarId w = p.add_var("w", 2);
  p.minimize({{w, identity(2)}});
  p.add_psd(MatExpr::tensor_left(2, p.var(w)) - MatExpr::constant(me));
  auto sol = solve(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.primal_value == doctest::Approx(2.0).epsilon(1e-6));
  // Dual optimizer X satisfies Tr_A X = I within tolerance and <X, rho> ~ 2.
  const Mat& xd = sol.psd_duals[0];
  CHECK((partial_trace(xd, FactoredDims(2, 2), Which::A) - identity(2)).norm() < 1e-5);
  CHECK(frobenius_inner(xd, me).real() == doctest::Approx(2.0).epsilon(1e-5));
}
