// Twisted hypergeometric data for X = P^n and the split bundle E.  The
// I-function is
//
//   I = sum_d q^d N_d(H, lambda, z) / prod_{k=1}^{d} (H + k z)^{n+1}
//
// with numerator 1 (untwisted), prod_j prod_{k=1}^{l_j d} (l_j H + lambda
// + k z) (Euler twist), or prod_j prod_{k=0}^{l_j d - 1} (-lambda - l_j H
// - k z) (inverse Euler twist).  Degree weights: q carries 2(n+1-sum l),
// z and lambda carry 2, H^k carries 2k, so I is homogeneous of weight 0.
//
// The mirror map reads off the z^{-1} layer of I / I_0, which must lie in
// span{1, H}; the fundamental solution comes from the Birkhoff splitting
// of the column matrix M = [m_0 | ... | m_n], m_0 = I / I_0, m_{k+1} =
// (z q d/dq + H cup) m_k.  The stored solution SS = S^{-1} satisfies the
// master equation z q d/dq SS + B(q) SS = SS (H cup) with B free of z,
// B(0) = H cup, and B = (theta tau0) Id + (1 + theta tau2) A with A the
// quantum product matrix of the H direction.
#pragma once

#include <string>
#include <vector>

#include "qsd/charclass.hpp"
#include "qsd/cohomology.hpp"
#include "qsd/errors.hpp"
#include "qsd/series.hpp"

namespace qsd {

enum class Twist { Untwisted, Euler, InverseEuler };

inline std::string twist_name(Twist t) {
  switch (t) {
    case Twist::Untwisted: return "untwisted";
    case Twist::Euler: return "euler";
    case Twist::InverseEuler: return "inverse-euler";
  }
  return "?";
}

inline ClassSeries i_function(const GeometryTriple& g, Twist twist,
                              int order) {
  std::size_t len = g.len();
  ClassSeries out = ClassSeries::make(order);
  out.add_term(0, ZKey{}, CohClass::h_power(len, 0));
  for (int d = 1; d <= order; ++d) {
    // assemble the q^d coefficient in a one-layer workspace
    ClassSeries lay = ClassSeries::make(0);
    lay.add_term(0, ZKey{}, CohClass::h_power(len, 0));
    for (int l : g.bundle().degrees) {
      if (twist == Twist::Euler) {
        for (int k = 1; k <= l * d; ++k) {
          ClassSeries f = ClassSeries::make(0);
          f.add_term(0, ZKey{}, CohClass::h_power(len, 1, Rat(l)));
          f.add_term(0, ZKey{0, 1, 0}, CohClass::h_power(len, 0));
          f.add_term(0, ZKey{1, 0, 0}, CohClass::h_power(len, 0, Rat(k)));
          lay = cup_mul(lay, f);
        }
      } else if (twist == Twist::InverseEuler) {
        for (int k = 0; k < l * d; ++k) {
          ClassSeries f = ClassSeries::make(0);
          f.add_term(0, ZKey{}, CohClass::h_power(len, 1, Rat(-l)));
          f.add_term(0, ZKey{0, 1, 0}, CohClass::h_power(len, 0, Rat(-1)));
          f.add_term(0, ZKey{1, 0, 0}, CohClass::h_power(len, 0, Rat(-k)));
          lay = cup_mul(lay, f);
        }
      }
    }
    for (int k = 1; k <= d; ++k) {
      // (H + k z)^{-1} = sum_m (-1)^m H^m (k z)^{-(m+1)}, finite in H
      ClassSeries inv = ClassSeries::make(0);
      Rat kp = Rat(1) / Rat(k);
      for (std::size_t m = 0; m < len; ++m) {
        inv.add_term(0, ZKey{-(static_cast<int>(m) + 1), 0, 0},
                     CohClass::h_power(len, m, Rat(Rat(m % 2 ? -1 : 1) * kp)));
        kp /= Rat(k);
      }
      for (int rep = 0; rep <= g.dim_x(); ++rep) lay = cup_mul(lay, inv);
    }
    for (const auto& [k, v] : lay.layer[0]) out.add_term(d, k, v);
  }
  return out;
}

struct Theory {
  GeometryTriple geom;
  Twist twist;
  int order;
  ClassSeries i_raw;      // I
  ClassSeries i_norm;     // I / I_0
  ScalarSeries i0;        // z^0 H^0 layer of I, a q-series unit
  ScalarSeries tau0;      // H^0 part of the mirror map
  ScalarSeries tau2;      // H^1 part of the mirror map
  SeriesMatrix solution;  // SS = Id + O(q, 1/z)
  SeriesMatrix s_factor;  // S = SS^{-1}, Birkhoff negative factor
  SeriesMatrix bmat;      // z-free connection matrix B(q)
  SeriesMatrix a_mon;     // quantum product matrix of H at the mirror point
};

inline Theory build_theory(const GeometryTriple& g, Twist twist, int order) {
  std::size_t len = g.len();
  std::size_t n1 = len;
  Theory th{g, twist, order,
            i_function(g, twist, order),
            ClassSeries::make(order),
            ScalarSeries::make(order),
            ScalarSeries::make(order),
            ScalarSeries::make(order),
            SeriesMatrix::make(n1, order),
            SeriesMatrix::make(n1, order),
            SeriesMatrix::make(n1, order),
            SeriesMatrix::make(n1, order)};

  th.i0 = class_to_coords(z_layer(th.i_raw, 0), len)[0];
  th.i_norm = invert_series(th.i0) * th.i_raw;

  // the normalized series must have the shape 1 + O(1/z); any z^{>0}
  // layer or H^{>1} component of the z^{-1} layer leaves the chart
  for (int d = 0; d <= order; ++d)
    for (const auto& [k, v] : th.i_norm.layer[static_cast<std::size_t>(d)])
      if (k.z > 0)
        throw MirrorMapOutOfRange("z^" + std::to_string(k.z) + " at q^" +
                                  std::to_string(d));
  {
    auto tcoords = class_to_coords(z_layer(th.i_norm, -1), len);
    for (std::size_t h = 2; h < len; ++h)
      if (!tcoords[h].is_zero())
        throw MirrorMapOutOfRange("H^" + std::to_string(h) +
                                  " in the mirror layer");
    th.tau0 = tcoords[0];
    if (len > 1) th.tau2 = tcoords[1];
  }

  // column matrix M and its Birkhoff splitting M = S A, computed one q
  // degree at a time; S collects the strictly negative z part
  CohClass hcls = CohClass::h_power(len, 1);
  ClassSeries hser = ClassSeries::make(order);
  hser.add_term(0, ZKey{}, hcls);
  SeriesMatrix m = SeriesMatrix::make(n1, order);
  {
    ClassSeries col = th.i_norm;
    for (std::size_t j = 0; j < n1; ++j) {
      auto coords = class_to_coords(col, len);
      for (std::size_t i = 0; i < n1; ++i) m.at(i, j) = coords[i];
      if (j + 1 < n1)
        col = shift_key(theta_q(col), ZKey{1, 0, 0}) + cup_mul(hser, col);
    }
  }
  if (!(q_layer_only(m, 0) == SeriesMatrix::identity(n1, order)))
    throw QsdError("fundamental solution: q^0 frame is not the identity");

  SeriesMatrix s = SeriesMatrix::identity(n1, order);
  SeriesMatrix a = SeriesMatrix::identity(n1, order);
  for (int d = 1; d <= order; ++d) {
    SeriesMatrix rem = q_layer_only(m - s * a, d);
    auto [neg, pos] = split_z(rem);
    s = s + neg;
    a = a + pos;
  }
  if (!((s * a) == m))
    throw QsdError("fundamental solution: Birkhoff splitting failed");
  th.s_factor = s;
  th.solution = invert_unipotent(s);

  // master equation: B = (SS (H cup) - z theta SS) S must be z-free
  SeriesMatrix hcup = SeriesMatrix::from_rat(g.h_cup_matrix(), order);
  SeriesMatrix b =
      (th.solution * hcup - shift_key(theta_q(th.solution), ZKey{1, 0, 0})) *
      s;
  for (const auto& entry : b.e)
    for (const auto& l : entry.layer)
      for (const auto& [k, v] : l)
        if (k.z != 0 || k.lz != 0)
          throw QsdError("connection matrix carries z");
  if (!(q_layer_only(b, 0) == hcup))
    throw QsdError("connection matrix does not start at H cup");
  th.bmat = b;

  ScalarSeries unit = ScalarSeries::make(order);
  unit.add_term(0, ZKey{}, Scalar(Rat(1)));
  ScalarSeries scale = invert_series(unit + theta_q(th.tau2));
  SeriesMatrix shifted = b;
  ScalarSeries t0dot = theta_q(th.tau0);
  for (std::size_t k = 0; k < n1; ++k)
    shifted.at(k, k) = shifted.at(k, k) - t0dot;
  th.a_mon = map_entries(
      shifted, [&scale](const ScalarSeries& x) { return scale * x; });
  return th;
}

// two-point descendant generating function contracted against alpha:
// minus the z^{-1} layer of SS alpha; its q^0 layer vanishes
inline ClassSeries two_point(const Theory& th, const LambdaClass& alpha) {
  ClassSeries v = apply_matrix(th.solution, alpha.as_series(th.order));
  return -z_layer(v, -1);
}

// quantum product of the H direction after lambda -> 0;
// on the Y-model this is the small product carried back to X
inline SeriesMatrix ytox_product(const GeometryTriple& g, int order) {
  Theory th = build_theory(g, Twist::InverseEuler, order);
  return map_entries(th.a_mon, [](const ScalarSeries& s) {
    return nonequivariant_limit(s, "ytox_product");
  });
}

// local genus-zero invariants N_d of the total space of E dual: contract
// the two-point function with H against the equivariant volume, strip the
// classical three-point term <H, H, tau> at the mirror parameter, pass to
// lambda -> 0, and undo the mirror map Q = q exp(tau2)
inline std::vector<Scalar> local_invariants(const GeometryTriple& g,
                                            int order) {
  Theory th = build_theory(g, Twist::InverseEuler, order);
  std::size_t len = g.len();
  ClassSeries hser = ClassSeries::make(order);
  hser.add_term(0, ZKey{}, CohClass::h_power(len, 1));
  ClassSeries tp = two_point(th, LambdaClass::from_class(
                                     CohClass::h_power(len, 1)));
  ClassSeries prod = cup_mul(tp, hser);
  // degree-zero part of the double bracket at parameter tau0 + tau2 H;
  // the string equation removes every other classical contribution
  ClassSeries taucls = ClassSeries::make(order);
  for (int d = 1; d <= order; ++d) {
    for (const auto& [k, v] : th.tau0.layer[static_cast<std::size_t>(d)])
      taucls.add_term(d, k, CohClass::h_power(len, 0, v));
    for (const auto& [k, v] : th.tau2.layer[static_cast<std::size_t>(d)])
      taucls.add_term(d, k, CohClass::h_power(len, 1, v));
  }
  prod = prod - cup_mul(cup_mul(taucls, hser), hser);
  LambdaClass e_inv = euler_lambda(g, /*dual=*/true).invert(len);
  prod = mul_with<CohClass, CohClass, CohClass>(
      prod, e_inv.as_series(order),
      [](const CohClass& x, const CohClass& y) { return cup(x, y); });
  ScalarSeries phi = ScalarSeries::make(order);
  for (int d = 0; d <= order; ++d)
    for (const auto& [k, v] : prod.layer[static_cast<std::size_t>(d)])
      phi.add_term(d, k, v.integrate());
  phi = nonequivariant_limit(phi, "local_invariants");

  // invert Q = q exp(tau2): q = Q w(Q) with w = 1/exp(tau2(Q w(Q)))
  ScalarSeries u = exp_series(nonequivariant_limit(th.tau2, "mirror map"));
  ScalarSeries w = ScalarSeries::make(order);
  w.add_term(0, ZKey{}, Scalar(Rat(1)));
  for (int it = 0; it <= order; ++it)
    w = invert_series(substitute_q(u, w));
  ScalarSeries phi_q = substitute_q(phi, w);

  std::vector<Scalar> out;
  for (int d = 1; d <= order; ++d) {
    Scalar nd;
    for (const auto& [k, v] : phi_q.layer[static_cast<std::size_t>(d)]) {
      if (k != ZKey{}) throw QsdError("local_invariants: graded leak");
      nd = Rat(Rat(1) / Rat(static_cast<long>(d) * d)) * v;
    }
    out.push_back(nd);
  }
  return out;
}

}  // namespace qsd
