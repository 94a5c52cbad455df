#include <doctest.h>

#include "qsd/series.hpp"

using namespace qsd;

namespace {
ScalarSeries q_power(int order, int d, Scalar c = Rat(1)) {
  ScalarSeries s = ScalarSeries::make(order);
  s.add_term(d, ZKey{}, c);
  return s;
}
ScalarSeries unit_series(int order) { return q_power(order, 0); }
}  // namespace

TEST_CASE("class series product truncates in H and in q") {
  // (1 + q H)(1 - q H) = 1 - q^2 H^2
  ClassSeries a = ClassSeries::make(3), b = ClassSeries::make(3);
  a.add_term(0, ZKey{}, CohClass::h_power(4, 0));
  a.add_term(1, ZKey{}, CohClass::h_power(4, 1));
  b.add_term(0, ZKey{}, CohClass::h_power(4, 0));
  b.add_term(1, ZKey{}, CohClass::h_power(4, 1, Rat(-1)));
  ClassSeries p = cup_mul(a, b);
  CHECK(p.layer[0].at(ZKey{}) == CohClass::h_power(4, 0));
  CHECK(p.layer[1].empty());
  CHECK(p.layer[2].at(ZKey{}) == CohClass::h_power(4, 2, Rat(-1)));
  CHECK(p.layer[3].empty());
}

TEST_CASE("z derivative with the log z chain rule") {
  // d/dz (z + log z) = 1 + 1/z
  ScalarSeries s = ScalarSeries::make(1);
  s.add_term(0, ZKey{1, 0, 0}, Scalar(Rat(1)));
  s.add_term(0, ZKey{0, 0, 1}, Scalar(Rat(1)));
  ScalarSeries d = d_z(s);
  CHECK(d.layer[0].at(ZKey{}) == Scalar(Rat(1)));
  CHECK(d.layer[0].at(ZKey{-1, 0, 0}) == Scalar(Rat(1)));
  CHECK(d.layer[0].size() == 2);
}

TEST_CASE("negate_z flips signs and shifts the log branch") {
  ScalarSeries s = ScalarSeries::make(0);
  s.add_term(0, ZKey{3, 0, 0}, Scalar(Rat(1)));
  ScalarSeries n = negate_z(s);
  CHECK(n.layer[0].at(ZKey{3, 0, 0}) == Scalar(Rat(-1)));

  // log z -> log z + i pi
  ScalarSeries l = ScalarSeries::make(0);
  l.add_term(0, ZKey{0, 0, 1}, Scalar(Rat(1)));
  ScalarSeries nl = negate_z(l);
  CHECK(nl.layer[0].at(ZKey{0, 0, 1}) == Scalar(Rat(1)));
  CHECK(nl.layer[0].at(ZKey{}) == pi_i_power(1));

  // (log z)^2 -> (log z)^2 + 2 i pi log z - pi^2
  ScalarSeries l2 = ScalarSeries::make(0);
  l2.add_term(0, ZKey{0, 0, 2}, Scalar(Rat(1)));
  ScalarSeries nl2 = negate_z(l2);
  CHECK(nl2.layer[0].at(ZKey{0, 0, 2}) == Scalar(Rat(1)));
  CHECK(nl2.layer[0].at(ZKey{0, 0, 1}) == Rat(2) * pi_i_power(1));
  CHECK(nl2.layer[0].at(ZKey{}) == Rat(-1) * Scalar::pi(2));
}

TEST_CASE("nonequivariant limit guards negative lambda powers") {
  ScalarSeries s = ScalarSeries::make(1);
  s.add_term(1, ZKey{0, -1, 0}, Scalar(Rat(1)));
  CHECK_THROWS_AS(nonequivariant_limit(s, "test"), NegativeLambdaPower);
  ScalarSeries ok = ScalarSeries::make(1);
  ok.add_term(1, ZKey{0, 2, 0}, Scalar(Rat(5)));
  ok.add_term(1, ZKey{}, Scalar(Rat(7)));
  ScalarSeries lim = nonequivariant_limit(ok, "test");
  CHECK(lim.layer[1].size() == 1);
  CHECK(lim.layer[1].at(ZKey{}) == Scalar(Rat(7)));
}

TEST_CASE("substitution q -> q u(q)") {
  ScalarSeries q = q_power(3, 1);
  ScalarSeries u = unit_series(3);
  u.add_term(1, ZKey{}, Scalar(Rat(1)));  // u = 1 + q
  ScalarSeries sub = substitute_q(q, u);
  CHECK(sub.layer[1].at(ZKey{}) == Scalar(Rat(1)));
  CHECK(sub.layer[2].at(ZKey{}) == Scalar(Rat(1)));
  CHECK(sub.layer[3].empty());

  // q^2 -> q^2 (1 + q)^2 = q^2 + 2 q^3
  ScalarSeries q2 = q_power(3, 2);
  ScalarSeries sub2 = substitute_q(q2, u);
  CHECK(sub2.layer[2].at(ZKey{}) == Scalar(Rat(1)));
  CHECK(sub2.layer[3].at(ZKey{}) == Scalar(Rat(2)));

  // sign flip through a -1 unit
  ScalarSeries mu = q_power(3, 0, Scalar(Rat(-1)));
  ScalarSeries sub3 = substitute_q(q2, mu);
  CHECK(sub3.layer[2].at(ZKey{}) == Scalar(Rat(1)));
  ScalarSeries sub4 = substitute_q(q, mu);
  CHECK(sub4.layer[1].at(ZKey{}) == Scalar(Rat(-1)));

  ScalarSeries bad = q_power(3, 1);  // u(0) = 0
  CHECK_THROWS_AS(substitute_q(q, bad), SubstitutionOverflow);
  ScalarSeries zfull = unit_series(3);
  zfull.add_term(1, ZKey{1, 0, 0}, Scalar(Rat(1)));
  CHECK_THROWS_AS(substitute_q(q, zfull), SubstitutionOverflow);
}

TEST_CASE("exp and inverse of scalar series") {
  ScalarSeries q = q_power(4, 1);
  ScalarSeries e = exp_series(q);
  CHECK(e.layer[2].at(ZKey{}) == Scalar(Rat(1, 2)));
  CHECK(e.layer[3].at(ZKey{}) == Scalar(Rat(1, 6)));
  ScalarSeries em = exp_series(-q);
  ScalarSeries prod = e * em;
  CHECK(prod == unit_series(4));

  ScalarSeries u = unit_series(4) + q;
  CHECK(invert_series(u) * u == unit_series(4));
  ScalarSeries mu = -unit_series(4) + q;
  CHECK(invert_series(mu) * mu == unit_series(4));
  CHECK_THROWS_AS(exp_series(u), QsdError);
}

TEST_CASE("truncation mismatch is rejected") {
  ScalarSeries a = unit_series(2), b = unit_series(3);
  CHECK_THROWS_AS(a + b, TruncationMismatch);
  CHECK_THROWS_AS(a * b, TruncationMismatch);
}

TEST_CASE("matrix inversion of unipotent operands") {
  SeriesMatrix m = SeriesMatrix::identity(2, 3);
  m.at(0, 1).add_term(1, ZKey{-1, 0, 0}, Scalar(Rat(5)));
  SeriesMatrix inv = invert_unipotent(m);
  CHECK(m * inv == SeriesMatrix::identity(2, 3));
  CHECK(inv * m == SeriesMatrix::identity(2, 3));

  // q^0 layer  Id + z^{-1} E_00 has unbounded Neumann powers
  SeriesMatrix bad = SeriesMatrix::identity(2, 3);
  bad.at(0, 0).add_term(0, ZKey{-1, 0, 0}, Scalar(Rat(1)));
  CHECK_THROWS_AS(invert_unipotent(bad), NotUnipotent);

  // but a nilpotent q^0 deviation is fine
  SeriesMatrix nil = SeriesMatrix::identity(2, 3);
  nil.at(0, 1).add_term(0, ZKey{-1, 0, 0}, Scalar(Rat(1)));
  SeriesMatrix ninv = invert_unipotent(nil);
  CHECK(nil * ninv == SeriesMatrix::identity(2, 3));
}

TEST_CASE("matrix exp of nilpotent plus q-positive input") {
  SeriesMatrix x = SeriesMatrix::make(2, 3);
  x.at(0, 1).add_term(0, ZKey{-1, 0, 0}, pi_i_power(1));
  x.at(0, 0).add_term(1, ZKey{}, Scalar(Rat(1)));
  SeriesMatrix e = exp_matrix(x);
  SeriesMatrix em = exp_matrix(Scalar(Rat(-1)) * x);
  CHECK(e * em == SeriesMatrix::identity(2, 3));
}

TEST_CASE("class series coordinates round trip through matrices") {
  ClassSeries v = ClassSeries::make(2);
  v.add_term(0, ZKey{}, CohClass::h_power(3, 1));
  v.add_term(1, ZKey{-2, 1, 0}, CohClass::h_power(3, 2, Rat(7)));
  CHECK(coords_to_class(class_to_coords(v, 3)) == v);
  SeriesMatrix id = SeriesMatrix::identity(3, 2);
  CHECK(apply_matrix(id, v) == v);
}

TEST_CASE("weighted homogeneity checker") {
  // weight(q) = kappa, weight(z) = weight(lambda) = 1, weight(H^k) = k
  ClassSeries v = ClassSeries::make(2);
  v.add_term(0, ZKey{}, CohClass::h_power(3, 0));
  v.add_term(1, ZKey{-2, 0, 0}, CohClass::h_power(3, 0));
  v.add_term(2, ZKey{-3, -1, 0}, CohClass::h_power(3, 0));
  CHECK(is_weighted_homogeneous(v, 2, 0));
  v.add_term(1, ZKey{}, CohClass::h_power(3, 1));
  CHECK(!is_weighted_homogeneous(v, 2, 0));
}
