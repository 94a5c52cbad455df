#include <doctest.h>

#include "qsd/charclass.hpp"

using namespace qsd;

namespace {
GeometryTriple make(int n, std::vector<int> degrees) {
  return GeometryTriple(SpaceModel{n}, BundleModel{std::move(degrees)});
}
}  // namespace

TEST_CASE("chern character of line bundles") {
  GeometryTriple g = make(2, {1});
  CohClass ch2 = ch_line(g, 2);
  CHECK(ch2.c[0] == Scalar(Rat(1)));
  CHECK(ch2.c[1] == Scalar(Rat(2)));
  CHECK(ch2.c[2] == Scalar(Rat(2)));
}

TEST_CASE("todd classes") {
  GeometryTriple p2 = make(2, {1});
  CohClass td = todd_tangent_x(p2);
  CHECK(td.c[0] == Scalar(Rat(1)));
  CHECK(td.c[1] == Scalar(Rat(3, 2)));
  CHECK(td.c[2] == Scalar(Rat(1)));

  CohClass tdm = todd_line(2, Rat(-1));  // O(-1) on P1
  CHECK(tdm.c[0] == Scalar(Rat(1)));
  CHECK(tdm.c[1] == Scalar(Rat(-1, 2)));
}

TEST_CASE("hirzebruch riemann roch on projective space") {
  for (int n = 1; n <= 3; ++n) {
    GeometryTriple g = make(n, {1});
    CohClass td = todd_tangent_x(g);
    for (int a = -2; a <= 2; ++a) {
      Scalar chi = cup(ch_line(g, a), td).integrate();
      CHECK(chi == Scalar(binomial(n + a, n)));
    }
  }
}

TEST_CASE("gamma classes") {
  CohClass g1 = gamma_line(2, Rat(1));  // O(1) on P1
  CHECK(g1.c[0] == Scalar(Rat(1)));
  CHECK(g1.c[1] == Rat(-1) * Scalar::euler_gamma());

  GeometryTriple p1 = make(1, {1});
  CohClass gx1 = gamma_hat_x(p1);
  CHECK(gx1.c[1] == Rat(-2) * Scalar::euler_gamma());

  GeometryTriple p2 = make(2, {1});
  CohClass gx2 = gamma_hat_x(p2);
  CHECK(gx2.c[1] == Rat(-3) * Scalar::euler_gamma());
  CHECK(gx2.c[2] == Rat(9, 2) * Scalar::euler_gamma().pow(2) +
                        Rat(1, 4) * Scalar::pi(2));
}

TEST_CASE("gamma class of the total space factors through the base") {
  GeometryTriple g = make(2, {3});
  CHECK(gamma_hat_y(g) ==
        cup(gamma_hat_x(g), gamma_hat_bundle(g, /*dual=*/true)));
  // adjunction route for Z: Gamma(T X)|_Z = Gamma(T Z) Gamma(E)|_Z
  auto gz = gamma_hat_z(g);
  CohClass on_x =
      cup(gamma_hat_x(g), invert_class(gamma_hat_bundle(g, false)));
  CHECK(gz == g.j_star(on_x));
}

TEST_CASE("gamma reflection at low order") {
  // Gamma(1+x) Gamma(1-x) (1 - e^{2 pi i x}) = 2 pi i e^{pi i x} (-x),
  // checked on a nilpotent x of square zero and of cube zero
  for (std::size_t len : {2u, 3u}) {
    CohClass lhs = cup(gamma_line(len, Rat(1)), gamma_line(len, Rat(-1)));
    Scalar two_pi_i = Rat(2) * pi_i_power(1);
    CohClass expo = exp_class(CohClass::h_power(len, 1, two_pi_i));
    CohClass one = CohClass::h_power(len, 0);
    lhs = cup(lhs, one - expo);
    CohClass rhs = cup(exp_class(CohClass::h_power(len, 1, pi_i_power(1))),
                       CohClass::h_power(len, 1, Rat(-1) * two_pi_i));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("equivariant euler classes") {
  GeometryTriple g = make(2, {3});
  LambdaClass e = euler_lambda(g, false);
  REQUIRE(e.c.count(1) == 1);
  CHECK(e.c.at(1) == CohClass::h_power(3, 0));
  CHECK(e.c.at(0) == CohClass::h_power(3, 1, Rat(3)));

  LambdaClass ed = euler_lambda(g, true);
  CHECK(ed.c.at(1) == CohClass::h_power(3, 0, Rat(-1)));
  CHECK(ed.c.at(0) == CohClass::h_power(3, 1, Rat(-3)));

  // Laurent inverse really inverts
  LambdaClass prod = e * e.invert(3);
  REQUIRE(prod.c.size() == 1);
  CHECK(prod.c.at(0) == CohClass::h_power(3, 0));

  GeometryTriple g2 = make(3, {2, 1});
  LambdaClass e2 = euler_lambda(g2, true);
  LambdaClass p2 = e2 * e2.invert(4);
  REQUIRE(p2.c.size() == 1);
  CHECK(p2.c.at(0) == CohClass::h_power(4, 0));
}

TEST_CASE("pushforward chern characters and the comparison map") {
  GeometryTriple g = make(2, {1});
  for (int a : {-1, 0, 1})
    CHECK(g.phi(ch_compact_pushforward_line(g, a)) ==
          ch_pushforward_line(g, a));
}

TEST_CASE("operator dressings") {
  CohClass h2 = CohClass::h_power(3, 2);
  CHECK(apply_two_pi_i_halfdeg(h2) ==
        CohClass::h_power(3, 2, Rat(-4) * Scalar::pi(2)));
  CHECK(apply_two_pi_i_halfdeg(apply_two_pi_i_halfdeg(h2), -1) == h2);

  // z^{-Gr} H = H / z
  ClassSeries v = ClassSeries::make(2);
  v.add_term(0, ZKey{}, CohClass::h_power(2, 1));
  ClassSeries dressed = apply_z_neg_grading(v);
  REQUIRE(dressed.layer[0].size() == 1);
  CHECK(dressed.layer[0].begin()->first == ZKey{-1, 0, 0});

  // z^{2H} 1 = 1 + 2 H log z on P1
  ClassSeries one = ClassSeries::make(2);
  one.add_term(0, ZKey{}, CohClass::h_power(2, 0));
  ClassSeries rho = apply_z_rho(one, Rat(2));
  CHECK(rho.layer[0].at(ZKey{}) == CohClass::h_power(2, 0));
  CHECK(rho.layer[0].at(ZKey{0, 0, 1}) == CohClass::h_power(2, 1, Rat(2)));
}
