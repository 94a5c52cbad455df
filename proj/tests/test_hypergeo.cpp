#include <doctest.h>

#include "golden_values.hpp"
#include "qsd/hypergeo.hpp"

using namespace qsd;

namespace {
GeometryTriple make(int n, std::vector<int> degrees) {
  return GeometryTriple(SpaceModel{n}, BundleModel{std::move(degrees)});
}

// q^d coefficient of a scalar series expected to be free of z and lambda
Rat rat_at(const ScalarSeries& s, int d) {
  Rat out = 0;
  for (const auto& [k, v] : s.layer[static_cast<std::size_t>(d)]) {
    REQUIRE(k == ZKey{});
    REQUIRE(v.is_rational());
    out = v.rational_part();
  }
  return out;
}
}  // namespace

TEST_CASE("untwisted I-function on P1") {
  GeometryTriple g = make(1, {1});
  ClassSeries i = i_function(g, Twist::Untwisted, 2);
  // q^1 coefficient: 1/(H+z)^2 = z^{-2} - 2 H z^{-3}
  CHECK(i.layer[1].at(ZKey{-2, 0, 0}) == CohClass::h_power(2, 0));
  CHECK(i.layer[1].at(ZKey{-3, 0, 0}) == CohClass::h_power(2, 1, Rat(-2)));
  CHECK(i.layer[1].size() == 2);
}

TEST_CASE("euler-twisted I-function on (P2, O(3)) matches the closed form") {
  GeometryTriple g = make(2, {3});
  ClassSeries i = i_function(g, Twist::Euler, 1);

  ClassSeries expect = ClassSeries::make(0);
  expect.add_term(0, ZKey{}, CohClass::h_power(3, 0));
  for (int k = 1; k <= 3; ++k) {
    ClassSeries f = ClassSeries::make(0);
    f.add_term(0, ZKey{}, CohClass::h_power(3, 1, Rat(3)));
    f.add_term(0, ZKey{0, 1, 0}, CohClass::h_power(3, 0));
    f.add_term(0, ZKey{1, 0, 0}, CohClass::h_power(3, 0, Rat(k)));
    expect = cup_mul(expect, f);
  }
  ClassSeries inv = ClassSeries::make(0);
  for (std::size_t m = 0; m < 3; ++m)
    inv.add_term(0, ZKey{-(static_cast<int>(m) + 1), 0, 0},
                 CohClass::h_power(3, m, Rat(m % 2 ? -1 : 1)));
  for (int rep = 0; rep < 3; ++rep) expect = cup_mul(expect, inv);

  for (const auto& [k, v] : expect.layer[0]) {
    auto it = i.layer[1].find(k);
    REQUIRE(it != i.layer[1].end());
    CHECK(it->second == v);
  }
  CHECK(i.layer[1].size() == expect.layer[0].size());
}

TEST_CASE("I-functions are homogeneous of weight zero") {
  for (auto [n, ls, tw] :
       {std::tuple<int, std::vector<int>, Twist>{1, {1}, Twist::InverseEuler},
        {2, {3}, Twist::Euler},
        {2, {1}, Twist::Untwisted},
        {3, {2, 1}, Twist::InverseEuler}}) {
    GeometryTriple g = make(n, ls);
    int kappa =
        (tw == Twist::Untwisted) ? n + 1 : n + 1 - g.degree_sum();
    CHECK(is_weighted_homogeneous(i_function(g, tw, 3), kappa, 0));
  }
}

TEST_CASE("mirror maps of the cubic theories match the oracle") {
  GeometryTriple g = make(2, {3});

  Theory eu = build_theory(g, Twist::Euler, 3);
  ScalarSeries t0 = lambda_layer(eu.tau0, 1);
  CHECK(lambda_layer(eu.tau0, 0).is_zero());
  ScalarSeries t2 = eu.tau2;
  for (int d = 1; d <= 3; ++d) {
    CHECK(rat_at(t0, d) ==
          parse_rat(std::string(golden::cubic_tau0_over_lambda[d - 1])));
    CHECK(rat_at(t2, d) == parse_rat(std::string(golden::cubic_tau2[d - 1])));
  }

  Theory ie = build_theory(g, Twist::InverseEuler, 3);
  ScalarSeries s0 = lambda_layer(ie.tau0, 1);
  for (int d = 1; d <= 3; ++d) {
    CHECK(rat_at(s0, d) ==
          parse_rat(std::string(golden::local_p2_tau0_over_lambda[d - 1])));
    CHECK(rat_at(ie.tau2, d) ==
          parse_rat(std::string(golden::local_p2_tau2[d - 1])));
  }
}

TEST_CASE("fano theories have trivial mirror maps") {
  for (auto [n, ls, tw] :
       {std::tuple<int, std::vector<int>, Twist>{1, {1}, Twist::InverseEuler},
        {2, {1}, Twist::Untwisted},
        {2, {1}, Twist::Euler},
        {3, {2}, Twist::InverseEuler}}) {
    GeometryTriple g = make(n, ls);
    Theory th = build_theory(g, tw, 3);
    CHECK(th.tau0.is_zero());
    CHECK(th.tau2.is_zero());
    CHECK(th.i_norm == th.i_raw);
  }
}

TEST_CASE("mirror map leaves the chart when the weight is negative") {
  GeometryTriple g = make(1, {3});
  CHECK_THROWS_AS(build_theory(g, Twist::Euler, 2), MirrorMapOutOfRange);
}

TEST_CASE("solution normal form") {
  GeometryTriple g = make(1, {1});
  Theory th = build_theory(g, Twist::InverseEuler, 3);
  SeriesMatrix dev = th.solution - SeriesMatrix::identity(2, 3);
  for (const auto& entry : dev.e)
    for (int d = 0; d <= 3; ++d)
      for (const auto& [k, v] : entry.layer[static_cast<std::size_t>(d)]) {
        CHECK(d >= 1);
        CHECK(k.z < 0);
      }
  CHECK(th.solution * th.s_factor == SeriesMatrix::identity(2, 3));
}

TEST_CASE("small quantum products of projective space") {
  // H * H = q on P1
  Theory p1 = build_theory(make(1, {1, 0}), Twist::Untwisted, 2);
  // bundle content does not enter the untwisted product; plain P1
  CHECK(rat_at(p1.a_mon.at(0, 1), 1) == Rat(1));
  CHECK(rat_at(p1.a_mon.at(1, 1), 1) == Rat(0));
  CHECK(rat_at(p1.a_mon.at(1, 0), 0) == Rat(1));

  // H * H^2 = q on P2
  Theory p2 = build_theory(make(2, {1}), Twist::Untwisted, 2);
  CHECK(rat_at(p2.a_mon.at(0, 2), 1) == Rat(1));
  CHECK(rat_at(p2.a_mon.at(1, 2), 1) == Rat(0));
  CHECK(rat_at(p2.a_mon.at(2, 2), 1) == Rat(0));
}

TEST_CASE("two-point function of (P1, O(1)) is exact at all orders") {
  GeometryTriple g = make(1, {1});
  Theory th = build_theory(g, Twist::InverseEuler, 3);
  ClassSeries tp =
      two_point(th, LambdaClass::from_class(CohClass::h_power(2, 1)));
  // q (-lambda - H), nothing else
  CHECK(tp.layer[0].empty());
  CHECK(tp.layer[1].at(ZKey{0, 1, 0}) == CohClass::h_power(2, 0, Rat(-1)));
  CHECK(tp.layer[1].at(ZKey{}) == CohClass::h_power(2, 1, Rat(-1)));
  CHECK(tp.layer[1].size() == 2);
  CHECK(tp.layer[2].empty());
  CHECK(tp.layer[3].empty());
}

TEST_CASE("local invariants of the resolved conifold point") {
  GeometryTriple g = make(1, {1});
  auto inv = local_invariants(g, 3);
  REQUIRE(inv.size() == 3);
  for (int d = 1; d <= 3; ++d)
    CHECK(inv[d - 1] ==
          Scalar(parse_rat(std::string(golden::p1_o1_phi[d - 1]))));
}

TEST_CASE("local invariants of local P2 match the oracle") {
  GeometryTriple g = make(2, {3});
  auto inv = local_invariants(g, 4);
  REQUIRE(inv.size() == 4);
  for (int d = 1; d <= 4; ++d)
    CHECK(inv[d - 1] ==
          Scalar(parse_rat(std::string(golden::local_p2_invariants[d - 1]))));
}

TEST_CASE("quantum product carried from Y to X") {
  // CY weight: the limit exists, H * H is a multiple of H^2, H * H^2
  // vanishes in positive degree by the grading
  GeometryTriple g = make(2, {3});
  SeriesMatrix prod = ytox_product(g, 3);
  CHECK(rat_at(prod.at(2, 1), 0) == Rat(1));
  CHECK(prod.at(0, 1).is_zero());
  CHECK(prod.at(1, 1).is_zero());
  for (int d = 1; d <= 3; ++d) {
    for (const auto& [k, v] : prod.at(0, 2).layer[static_cast<std::size_t>(d)])
      CHECK(v.is_zero());
    for (const auto& [k, v] : prod.at(1, 2).layer[static_cast<std::size_t>(d)])
      CHECK(v.is_zero());
    for (const auto& [k, v] : prod.at(2, 2).layer[static_cast<std::size_t>(d)])
      CHECK(v.is_zero());
  }
  // the H * H coefficient series carries the degree-1 invariant: its
  // q^1 coefficient is 3 N_1 / 1 + mirror-map corrections; here just pin
  // the oracle-backed value through the local invariants instead
  auto inv = local_invariants(g, 1);
  CHECK(inv[0] == Scalar(parse_rat(std::string(golden::local_p2_invariants[0]))));
}
