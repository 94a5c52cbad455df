#include <doctest.h>

#include <qsd/qdm.hpp>

using namespace qsd;

namespace {
GeometryTriple make(int n, std::vector<int> degrees) {
  return GeometryTriple(SpaceModel{n}, BundleModel{std::move(degrees)});
}
ScalarSeries constant(int order, const Scalar& s) {
  ScalarSeries out = ScalarSeries::make(order);
  out.add_term(0, ZKey{}, s);
  return out;
}
}  // namespace

TEST_CASE("all six flavors of (P1, O(1)) carry flat connections") {
  GeometryTriple g = make(1, {1});
  for (QdmFlavor f :
       {QdmFlavor::PlainX, QdmFlavor::TwistedEuler, QdmFlavor::AmbientZ,
        QdmFlavor::PlainY, QdmFlavor::CompactY, QdmFlavor::NarrowY}) {
    QuantumDModule m = build_qdm(g, f, 3);
    FlatnessReport rep = flatness_report(m);
    INFO(flavor_name(f));
    CHECK(rep.divisor_flat);
    CHECK(rep.z_flat);
    CHECK(rep.commuting);
  }
}

TEST_CASE("cubic flavors with nontrivial mirror maps stay flat") {
  GeometryTriple g = make(2, {3});
  for (QdmFlavor f : {QdmFlavor::PlainY, QdmFlavor::CompactY,
                      QdmFlavor::NarrowY, QdmFlavor::AmbientZ}) {
    QuantumDModule m = build_qdm(g, f, 3);
    INFO(flavor_name(f));
    CHECK(flatness_report(m).ok());
  }
}

TEST_CASE("the ambient module of a line in P2 is the module of P1") {
  QuantumDModule az = build_qdm(make(2, {1}), QdmFlavor::AmbientZ, 3);
  QuantumDModule p1 = build_qdm(make(1, {}), QdmFlavor::PlainX, 3);
  CHECK(az.basis == std::vector<std::size_t>{0, 1});
  CHECK(az.w == p1.w);
  CHECK(az.solution == p1.solution);
  CHECK(az.a_product == p1.a_product);
  CHECK(*az.gram == *p1.gram);
}

TEST_CASE("narrow module of the cubic has the lifted pairing") {
  QuantumDModule m = build_qdm(make(2, {3}), QdmFlavor::NarrowY, 3);
  REQUIRE(m.basis == std::vector<std::size_t>{1, 2});
  CHECK(m.gram->at(0, 0).is_zero());
  CHECK(m.gram->at(1, 1).is_zero());
  ScalarSeries off = constant(3, Scalar(Rat(-1, 3)));
  CHECK(m.gram->at(0, 1) == off);
  CHECK(m.gram->at(1, 0) == off);
  CHECK(flatness_report(m).ok());
}

TEST_CASE("a summand of degree zero empties the narrow module") {
  QuantumDModule m = build_qdm(make(1, {0}), QdmFlavor::NarrowY, 2);
  CHECK(m.basis.empty());
  CHECK(flatness_report(m).ok());
}

TEST_CASE("solutions are unitary for the flavor pairings") {
  CHECK(unitarity_residual(build_qdm(make(2, {}), QdmFlavor::PlainX, 3))
            .is_zero());
  CHECK(unitarity_residual(build_qdm(make(2, {1}), QdmFlavor::AmbientZ, 3))
            .is_zero());
  CHECK(unitarity_residual(build_qdm(make(2, {3}), QdmFlavor::NarrowY, 3))
            .is_zero());
  GeometryTriple g = make(1, {1});
  QuantumDModule cy = build_qdm(g, QdmFlavor::CompactY, 3);
  QuantumDModule py = build_qdm(g, QdmFlavor::PlainY, 3);
  CHECK(dual_unitarity_residual(cy, py).is_zero());
  CHECK(cy.solution != py.solution);
  CHECK_THROWS_AS((void)unitarity_residual(py), FlavorMismatch);
}

TEST_CASE("lambda-kept twisted solutions are unitary") {
  GeometryTriple g = make(1, {1});
  CHECK(theory_unitarity_residual(build_theory(g, Twist::Euler, 3)).is_zero());
  CHECK(theory_unitarity_residual(build_theory(g, Twist::InverseEuler, 3))
            .is_zero());
  GeometryTriple cubic = make(2, {3});
  CHECK(theory_unitarity_residual(build_theory(cubic, Twist::InverseEuler, 2))
            .is_zero());
}

TEST_CASE("gamma sections reproduce the Euler pairing on X") {
  QuantumDModule p1 = build_qdm(make(1, {}), QdmFlavor::PlainX, 3);
  CHECK(euler_pairing_residual(p1, 0, 0).is_zero());
  CHECK(euler_pairing_residual(p1, 1, 0).is_zero());
  CHECK(euler_pairing_residual(p1, 0, 1).is_zero());
  QuantumDModule p2 = build_qdm(make(2, {}), QdmFlavor::PlainX, 3);
  CHECK(euler_pairing_residual(p2, 0, 0).is_zero());
  CHECK(euler_pairing_residual(p2, 1, -1).is_zero());
}

TEST_CASE("moving to the module's own parameter is the identity") {
  QuantumDModule y = build_qdm(make(2, {3}), QdmFlavor::PlainY, 3);
  ScalarSeries u;
  SeriesMatrix moved = solution_at_parameter(y, y.tau0, y.tau2, &u);
  CHECK(moved == y.solution);
  CHECK(u == constant(3, Scalar(Rat(1))));
}

TEST_CASE("a shifted parameter transports the connection") {
  QuantumDModule y = build_qdm(make(2, {3}), QdmFlavor::PlainY, 3);
  ScalarSeries t0 = ScalarSeries::make(3);
  ScalarSeries t2 = y.tau2 + constant(3, pi_i_power(1));
  ScalarSeries u;
  SeriesMatrix shat = solution_at_parameter(y, t0, t2, &u);
  // the unit starts at the sign forced by the i pi constant
  CHECK(u.layer[0].begin()->second == Scalar(Rat(-1)));
  // divisor flatness at the new parameter: theta_q + z^{-1} Bhat with
  // Bhat = theta(T0) Id + (1 + theta(T2)) A(qhat)
  SeriesMatrix ahat = substitute_q(y.a_product, u);
  ScalarSeries onep = constant(3, Scalar(Rat(1))) + theta_q(t2);
  SeriesMatrix bhat = map_entries(
      ahat, [&onep](const ScalarSeries& s) { return onep * s; });
  for (std::size_t d = 0; d < bhat.n; ++d)
    bhat.at(d, d) = bhat.at(d, d) + theta_q(t0);
  SeriesMatrix hmat = SeriesMatrix::from_rat(y.hcup, 3);
  SeriesMatrix resid = theta_q(shat) +
                       shift_key(bhat * shat, ZKey{-1, 0, 0}) -
                       shift_key(shat * hmat, ZKey{-1, 0, 0});
  CHECK(resid.is_zero());
}

TEST_CASE("gamma sections exist only on flavors with a gamma structure") {
  QuantumDModule y = build_qdm(make(1, {1}), QdmFlavor::PlainY, 2);
  CHECK_THROWS_AS((void)gamma_section(y, 0), FlavorMismatch);
}
