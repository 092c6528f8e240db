#include <doctest.h>

#include <qmaj/factorize.hpp>
#include <qmaj/oracle.hpp>

#include "test_util.hpp"

using namespace qmaj;

namespace {
Channel dephasing2() {
  Mat p0 = zeros(2), p1 = zeros(2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  return eb_from_ensemble({p0, p1}, {p0, p1});
}
}  // namespace

TEST_CASE("post_factor: S = T factors through the identity") {
  Channel t = oracle::random_cptp(2, 2, 2, 50);
  auto dec = post_factor(t, t);
  REQUIRE(dec.verdict == FactorVerdict::Factors);
  CHECK(dec.residual <= tol::decision);
  CHECK(trace_norm(compose(*dec.middle, t).choi - t.choi) <= tol::decision);
}

TEST_CASE("post_factor: T = id factors any S with Phi = S") {
  Channel s = oracle::random_cptp(2, 2, 3, 51);
  auto dec = post_factor(identity_channel(2), s);
  REQUIRE(dec.verdict == FactorVerdict::Factors);
  CHECK(trace_norm(dec.middle->choi - s.choi) <= 1e-5);
}

TEST_CASE("post_factor: depolarized input cannot be undone") {
  auto dec = post_factor(depolarizing_channel(2, 1.0), identity_channel(2));
  REQUIRE(dec.verdict == FactorVerdict::NoFactor);
  REQUIRE(dec.witness.has_value());
  REQUIRE(dec.witness->kind == FactorWitness::Kind::SeparableState);
  const SeparableWitness& wit = *dec.witness->separable;
  CHECK(wit.lhs - wit.rhs >= tol::witness_min_gap);
  // The ensemble really is a separable density with the claimed violation.
  double total = 0;
  for (size_t k = 0; k < wit.weights.size(); ++k) {
    CHECK(wit.weights[k] >= 0);
    CHECK(is_psd(wit.on_input[k], 1e-9));
    CHECK(is_psd(wit.on_ref[k], 1e-9));
    CHECK(std::abs(wit.on_input[k].trace().real() - 1) < 1e-8);
    total += wit.weights[k];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  FactoredDims vdims(2, 2);
  Mat rho = wit.assemble(vdims);
  Channel t = depolarizing_channel(2, 1.0), s = identity_channel(2);
  double lhs = hmin(BipartiteState(hermitian_part(apply_to_factor(t, rho, vdims, Which::B)), vdims))
                   .value_bits;
  double rhs = hmin(BipartiteState(hermitian_part(apply_to_factor(s, rho, vdims, Which::B)), vdims))
                   .value_bits;
  CHECK(lhs == doctest::Approx(wit.lhs).epsilon(1e-7));
  CHECK(rhs == doctest::Approx(wit.rhs).epsilon(1e-7));
}

TEST_CASE("post_factor transitivity on planted factorizations") {
  Channel t = oracle::random_cptp(2, 2, 2, 52);
  Channel phi1 = oracle::random_cptp(2, 2, 2, 53);
  Channel phi2 = oracle::random_cptp(2, 2, 2, 54);
  Channel s = compose(phi1, t);
  Channel r = compose(phi2, s);
  CHECK(post_factor(t, s).verdict == FactorVerdict::Factors);
  CHECK(post_factor(s, r).verdict == FactorVerdict::Factors);
  CHECK(post_factor(t, r).verdict == FactorVerdict::Factors);
}

TEST_CASE("pre_factor: trivial and planted factorizations") {
  Channel t = oracle::random_cptp(2, 2, 2, 55);
  auto dec = pre_factor(t, t);
  REQUIRE(dec.verdict == FactorVerdict::Factors);
  CHECK(trace_norm(compose(t, *dec.middle).choi - t.choi) <= tol::decision);

  Mat u = oracle::random_unitary_mat(2, 56), v = oracle::random_unitary_mat(2, 57);
  Channel tu = unitary_channel(u);
  Channel su = compose(tu, unitary_channel(v));
  auto dec2 = pre_factor(tu, su);
  REQUIRE(dec2.verdict == FactorVerdict::Factors);
  CHECK(trace_norm(compose(tu, *dec2.middle).choi - su.choi) <= tol::decision);
}

TEST_CASE("pre_factor: dephasing is not left-invertible") {
  auto dec = pre_factor(dephasing2(), identity_channel(2));
  REQUIRE(dec.verdict == FactorVerdict::NoFactor);
  REQUIRE(dec.witness.has_value());
  REQUIRE(dec.witness->kind == FactorWitness::Kind::PositiveOperator);
  const PsdWitness& wit = *dec.witness->positive;
  CHECK(is_psd(wit.x, 1e-8));
  CHECK(wit.rhs - wit.lhs >= tol::witness_min_gap * std::max(1.0, wit.rhs));
  // Re-evaluate the two operator norms from scratch.
  FactoredDims xdims(2, 2);
  Channel tadj = adjoint(dephasing2()), sadj = adjoint(identity_channel(2));
  double lhs = operator_norm(hermitian_part(apply_to_factor(tadj, wit.x, xdims, Which::A)));
  double rhs = operator_norm(hermitian_part(apply_to_factor(sadj, wit.x, xdims, Which::A)));
  CHECK(lhs == doctest::Approx(wit.lhs).epsilon(1e-8));
  CHECK(rhs == doctest::Approx(wit.rhs).epsilon(1e-8));
}

TEST_CASE("choi_majorization_equiv agrees across planted instances") {
  Channel t = oracle::random_cptp(2, 2, 2, 58);
  auto same = choi_majorization_equiv(t, t);
  CHECK(same.agree);
  CHECK(same.factor_verdict == FactorVerdict::Factors);

  Channel s = compose(oracle::random_cptp(2, 2, 2, 59), t);
  auto planted = choi_majorization_equiv(t, s);
  CHECK(planted.agree);
  CHECK(planted.factor_verdict == FactorVerdict::Factors);

  auto neg = choi_majorization_equiv(depolarizing_channel(2, 1.0), identity_channel(2));
  CHECK(neg.agree);
  CHECK(neg.factor_verdict == FactorVerdict::NoFactor);
  CHECK(neg.majorization_verdict == Verdict::NotMajorized);
}
