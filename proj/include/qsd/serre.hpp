/* Quantum Serre duality for the triple (X, E, Z): the transform chain that
   carries the inverse Euler theory of Y = Tot(E dual) to the Euler twisted
   theory of X at a shifted parameter, and the residual checks that compare
   the transported solutions, the reductions to Z, the gamma dressed flat
   sections of pushed forward sheaves, and the (anti)symplectic pairings.

   Conventions.  The two point transform is f^ = two_point(ie, e_lambda(E
   dual)); as a double bracket it already contains the classical three point
   term, so the mirror parameter tau^{ie} is part of it and is never added
   again.  Its base form f^x is the lambda -> 0 limit of f^ cup e_lambda(E
   dual)^{-1}; the dual parameter is T = f^x - i pi c1(E), split into its
   H^0 and H^1 components; with lambda kept the same recipe gives T^lambda.
   The divisor chart can only hold parameters of degree at most two, so any
   higher component of the base form is out of range.  Transport to T is
   solution_at_parameter; the residuals below are exact series identities
   and must vanish to the working order. */
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qsd/qdm.hpp"

namespace qsd {

// ---- rectangular coordinate maps ------------------------------------------
// SeriesMatrix is square; the restriction to Z and the compact lift are
// rectangular, so they act on coordinate vectors through small Scalar
// matrices and index picks.

using ScalarMat = std::vector<std::vector<Scalar>>;

// matrix of cupping with a fixed class on the monomial basis 1, H, ..., H^n
inline ScalarMat cup_map(const GeometryTriple& g, const CohClass& f) {
  std::size_t len = g.len();
  ScalarMat m(len, std::vector<Scalar>(len));
  for (std::size_t j = 0; j < len; ++j) {
    CohClass col = cup(f, CohClass::h_power(len, j));
    for (std::size_t i = 0; i < len; ++i) m[i][j] = col.c[i];
  }
  return m;
}

// compact lift on narrow monomial coordinates, one column per narrow
// monomial; the lift is any preimage under cup e(E dual), and the checks
// that use it only ever look at images where the ambiguity cancels
inline ScalarMat lift_map(const GeometryTriple& g) {
  const std::vector<int>& nar = g.narrow_monos();
  std::size_t len = g.len();
  ScalarMat m(len, std::vector<Scalar>(nar.size()));
  for (std::size_t k = 0; k < nar.size(); ++k) {
    CohClass lf =
        g.lift(CohClass::h_power(len, static_cast<std::size_t>(nar[k])));
    for (std::size_t i = 0; i < len; ++i) m[i][k] = lf.c[i];
  }
  return m;
}

inline std::vector<ScalarSeries> pick_coords(
    const std::vector<ScalarSeries>& v, const std::vector<int>& keep) {
  std::vector<ScalarSeries> out;
  out.reserve(keep.size());
  for (int k : keep) out.push_back(v[static_cast<std::size_t>(k)]);
  return out;
}

inline std::vector<ScalarSeries> apply_map(const ScalarMat& m,
                                           const std::vector<ScalarSeries>& v,
                                           int order) {
  std::vector<ScalarSeries> out;
  out.reserve(m.size());
  for (const auto& row : m) {
    if (row.size() != v.size()) throw QsdError("apply_map: size mismatch");
    ScalarSeries acc = ScalarSeries::make(order);
    for (std::size_t j = 0; j < v.size(); ++j)
      if (!row[j].is_zero()) acc = acc + row[j] * v[j];
    out.push_back(std::move(acc));
  }
  return out;
}

inline std::vector<ScalarSeries> column_of(const SeriesMatrix& m,
                                           std::size_t j) {
  std::vector<ScalarSeries> out;
  out.reserve(m.n);
  for (std::size_t i = 0; i < m.n; ++i) out.push_back(m.at(i, j));
  return out;
}

inline Scalar two_pi_i_power(int m) {
  return Scalar(pow_rat(Rat(2), m)) * pi_i_power(m);
}

// matrix of cupping with an equivariant class, lambda kept in the entries
inline SeriesMatrix lambda_cup_matrix(const GeometryTriple& g,
                                      const LambdaClass& f, int order) {
  std::size_t len = g.len();
  SeriesMatrix m = SeriesMatrix::make(len, order);
  for (const auto& [l, v] : f.c) {
    for (std::size_t j = 0; j < len; ++j) {
      CohClass col = cup(v, CohClass::h_power(len, j));
      for (std::size_t i = 0; i < len; ++i)
        if (!col.c[i].is_zero()) m.at(i, j).add_term(0, ZKey{0, l, 0}, col.c[i]);
    }
  }
  return m;
}

// exp(s (f cup) / z) for a class with no H^0 part; finite because cupping
// with f raises the degree
inline SeriesMatrix cup_exp_over_z(const GeometryTriple& g, const Scalar& s,
                                   const CohClass& f, int order) {
  if (!f.c.empty() && !f.c[0].is_zero())
    throw QsdError("cup_exp_over_z: H^0 part present");
  std::size_t len = g.len();
  ScalarMat cm = cup_map(g, f);
  SeriesMatrix x = SeriesMatrix::make(len, order);
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t j = 0; j < len; ++j)
      if (!cm[i][j].is_zero()) x.at(i, j).add_term(0, ZKey{-1, 0, 0}, s * cm[i][j]);
  return exp_matrix(x);
}

// ---- the duality transforms ------------------------------------------------

struct DualityTransforms {
  ScalarSeries fhatx0;  // H^0 part of the base form, lambda free
  ScalarSeries fhatx2;  // H^1 part of the base form, lambda free
  ScalarSeries t0, t2;  // dual parameter, lambda free
  // the base form with lambda kept stays in the divisor chart; only then
  // are the lambda kept parameters below meaningful
  bool lambda_chart_ok = false;
  ScalarSeries t0_lam, t2_lam;  // dual parameter, lambda kept
  // the pushforward route e(E dual) cup f^x, lifted and restricted, agrees
  // with the plain restriction of f^x
  bool pushforward_matches_restriction = false;
  // when the cone direction has weight zero the H^0 leg of the base form
  // must vanish identically
  bool cone_potential_vanishes = false;
};

inline DualityTransforms duality_transforms(const Theory& ie) {
  if (ie.twist != Twist::InverseEuler)
    throw FlavorMismatch(
        "duality_transforms: expected the inverse Euler theory");
  const GeometryTriple& g = ie.geom;
  int order = ie.order;
  std::size_t len = g.len();

  DualityTransforms tr;
  LambdaClass edual = euler_lambda(g, /*dual=*/true);

  // f^ cup e_lambda(E dual)^{-1}, lambda kept
  ClassSeries fb = mul_with<CohClass, CohClass, CohClass>(
      two_point(ie, edual), edual.invert(len).as_series(order),
      [](const CohClass& a, const CohClass& b) { return cup(a, b); });
  ScalarSeries shift =
      constant_series(order, pi_i_power(1) * Rat(g.degree_sum()));
  {
    auto fc = class_to_coords(fb, len);
    tr.lambda_chart_ok = true;
    for (std::size_t h = 2; h < len; ++h)
      if (!fc[h].is_zero()) tr.lambda_chart_ok = false;
    if (tr.lambda_chart_ok) {
      tr.t0_lam = fc[0];
      tr.t2_lam = ((len > 1) ? fc[1] : ScalarSeries::make(order)) - shift;
    }
  }

  // the base form is the lambda -> 0 limit; it must stay in the chart
  ClassSeries fx = nonequivariant_limit(fb, "duality transform on the base");
  {
    auto fc = class_to_coords(fx, len);
    for (std::size_t h = 2; h < len; ++h)
      if (!fc[h].is_zero())
        throw MirrorMapOutOfRange(
            "dual parameter leaves the divisor chart at H^" +
            std::to_string(h));
    tr.fhatx0 = fc[0];
    tr.fhatx2 = (len > 1) ? fc[1] : ScalarSeries::make(order);
  }

  // pushforward route against restriction route, per q layer of f^x
  tr.pushforward_matches_restriction = true;
  for (int d = 0; d <= order; ++d)
    for (const auto& [k, v] : fx.layer[static_cast<std::size_t>(d)]) {
      std::vector<Scalar> ra = g.j_star(v);
      std::vector<Scalar> rb = g.j_star(g.lift(g.phi(v)));
      for (std::size_t i = 0; i < ra.size(); ++i)
        if (!(ra[i] - rb[i]).is_zero())
          tr.pushforward_matches_restriction = false;
    }

  tr.cone_potential_vanishes =
      (g.fano_weight_y() != 0) || tr.fhatx0.is_zero();

  tr.t0 = tr.fhatx0;
  tr.t2 = tr.fhatx2 - shift;
  return tr;
}

// everything the residual checks need, built once per geometry and order
struct SerreContext {
  GeometryTriple geom;
  int order;
  Theory ie;          // inverse Euler theory of X, lambda kept
  Theory eu;          // Euler theory of X, lambda kept
  QuantumDModule py;  // plain Y
  QuantumDModule cy;  // compact Y
  QuantumDModule ny;  // narrow Y
  QuantumDModule az;  // ambient Z
  QuantumDModule ex;  // Euler twisted X
  DualityTransforms tr;
};

inline SerreContext make_serre_context(const GeometryTriple& g, int order) {
  Theory ie = build_theory(g, Twist::InverseEuler, order);
  DualityTransforms tr = duality_transforms(ie);
  return SerreContext{g,
                      order,
                      std::move(ie),
                      build_theory(g, Twist::Euler, order),
                      build_qdm(g, QdmFlavor::PlainY, order),
                      build_qdm(g, QdmFlavor::CompactY, order),
                      build_qdm(g, QdmFlavor::NarrowY, order),
                      build_qdm(g, QdmFlavor::AmbientZ, order),
                      build_qdm(g, QdmFlavor::TwistedEuler, order),
                      std::move(tr)};
}

// ---- residual checks -------------------------------------------------------
// Each residual is an exact series difference; the identity holds when the
// returned object is zero.

// the compact Y transport equals the Euler twisted transport moved to the
// dual parameter and dressed by exp(-i pi c1(E) cup / z)
inline SeriesMatrix compact_vs_euler_residual(const SerreContext& c) {
  SeriesMatrix rhs =
      solution_at_parameter(c.ex, c.tr.t0, c.tr.t2) *
      cup_exp_over_z(c.geom, Rat(-1) * pi_i_power(1), c.geom.c1_e(), c.order);
  return c.cy.solution - rhs;
}

// restriction to Z of the compact transport against the ambient transport
// at the dual parameter: (2 pi i z)^{rk} j* of each dressed column of the
// compact side equals the ambient solution applied to the same dressing of
// the restricted column
inline std::vector<std::vector<ScalarSeries>> ambient_reduction_residual(
    const SerreContext& c) {
  const GeometryTriple& g = c.geom;
  const std::vector<int>& amb = g.ambient_monos();
  int rk = g.rank_e();
  const SeriesMatrix& left = c.cy.solution;
  SeriesMatrix szt = solution_at_parameter(c.az, c.tr.t0, c.tr.t2);
  SeriesMatrix cdress =
      cup_exp_over_z(g, Rat(-1) * pi_i_power(1), g.c1_e(), c.order);
  Scalar front = two_pi_i_power(rk);
  ZKey zr{rk, 0, 0};
  std::vector<std::vector<ScalarSeries>> out;
  for (std::size_t j = 0; j < left.n; ++j) {
    std::vector<ScalarSeries> lcol = pick_coords(column_of(left, j), amb);
    for (ScalarSeries& s : lcol) s = front * shift_key(s, zr);
    std::vector<ScalarSeries> rin = pick_coords(column_of(cdress, j), amb);
    for (ScalarSeries& s : rin) s = front * shift_key(s, zr);
    std::vector<ScalarSeries> rcol = apply_matrix(szt, rin);
    std::vector<ScalarSeries> res;
    for (std::size_t i = 0; i < lcol.size(); ++i)
      res.push_back(lcol[i] - rcol[i]);
    out.push_back(std::move(res));
  }
  return out;
}

// the square through the plain Y model: push a monomial to Y with e(E dual),
// transport, lift, restrict; compare with the ambient transport of the
// plain restriction
inline std::vector<std::vector<ScalarSeries>> narrow_square_residual(
    const SerreContext& c) {
  const GeometryTriple& g = c.geom;
  const std::vector<int>& amb = g.ambient_monos();
  const std::vector<int>& nar = g.narrow_monos();
  std::size_t len = g.len();
  const SeriesMatrix& ytrans = c.py.solution;
  SeriesMatrix szt = solution_at_parameter(c.az, c.tr.t0, c.tr.t2);
  SeriesMatrix cdress =
      cup_exp_over_z(g, Rat(-1) * pi_i_power(1), g.c1_e(), c.order);
  ScalarMat lm = lift_map(g);
  ScalarMat pm = cup_map(g, g.euler_edual());
  std::vector<bool> narrow_index(len, false);
  for (int k : nar) narrow_index[static_cast<std::size_t>(k)] = true;
  std::vector<std::vector<ScalarSeries>> out;
  for (std::size_t j = 0; j < len; ++j) {
    std::vector<ScalarSeries> x(len, ScalarSeries::make(c.order));
    x[j].add_term(0, ZKey{}, Scalar(Rat(1)));
    std::vector<ScalarSeries> ycol =
        apply_matrix(ytrans, apply_map(pm, x, c.order));
    for (std::size_t i = 0; i < len; ++i)
      if (!narrow_index[i] && !ycol[i].is_zero())
        throw NarrowNotClosed("narrow_square_residual: transport leaks");
    std::vector<ScalarSeries> lcol =
        pick_coords(apply_map(lm, pick_coords(ycol, nar), c.order), amb);
    std::vector<ScalarSeries> rcol =
        apply_matrix(szt, pick_coords(column_of(cdress, j), amb));
    std::vector<ScalarSeries> res;
    for (std::size_t i = 0; i < lcol.size(); ++i)
      res.push_back(lcol[i] - rcol[i]);
    out.push_back(std::move(res));
  }
  return out;
}

// gamma dressed square on the pushforward of O(a) from Z to Y: the plain
// route transports the narrow gamma section and lifts, the compact route
// transports the compact gamma section and restricts directly; both reduce
// to the gamma section of O(a) on Z at the dual parameter
inline std::vector<ScalarSeries> gamma_square_residual(const SerreContext& c,
                                                       int a,
                                                       bool compact_route) {
  const GeometryTriple& g = c.geom;
  std::size_t len = g.len();
  const std::vector<int>& amb = g.ambient_monos();
  int rk = g.rank_e();

  CohClass chy = compact_route ? ch_compact_pushforward_line(g, a)
                               : ch_pushforward_line(g, a);
  CohClass cls = cup(gamma_hat_y(g), apply_two_pi_i_halfdeg(chy));
  const QuantumDModule& m = compact_route ? c.cy : c.py;
  std::vector<ScalarSeries> sec = dressed_column(m, cls.c);

  std::vector<ScalarSeries> reduced;
  if (compact_route) {
    // compactly supported degrees sit 2 rk above the base coordinates, so
    // the grading operators contribute a global z^{-rk} (2 pi i)^{rk} that
    // closes against the (2 pi i z)^{rk} of the restriction with no z shift
    reduced = pick_coords(sec, amb);
    Scalar front = two_pi_i_power(2 * rk - g.dim_y());
    for (ScalarSeries& s : reduced) s = front * s;
  } else {
    const std::vector<int>& nar = g.narrow_monos();
    std::vector<bool> narrow_index(len, false);
    for (int k : nar) narrow_index[static_cast<std::size_t>(k)] = true;
    for (std::size_t i = 0; i < len; ++i)
      if (!narrow_index[i] && !sec[i].is_zero())
        throw NarrowNotClosed("gamma_square_residual: section leaks");
    reduced =
        pick_coords(apply_map(lift_map(g), pick_coords(sec, nar), c.order), amb);
    Scalar front = two_pi_i_power(rk - g.dim_y());
    ZKey zr{rk, 0, 0};
    for (ScalarSeries& s : reduced) s = front * shift_key(s, zr);
  }

  CohClass onx = cup(cup(gamma_hat_x(g), invert_class(gamma_hat_bundle(g, false))),
                     apply_two_pi_i_halfdeg(ch_line(g, a)));
  SeriesMatrix szt = solution_at_parameter(c.az, c.tr.t0, c.tr.t2);
  std::vector<ScalarSeries> rsec =
      apply_matrix(szt, u_dressing(c.az, g.j_star(onx)));
  Scalar zfront = two_pi_i_power(-g.dim_z());
  std::vector<ScalarSeries> out;
  for (std::size_t i = 0; i < reduced.size(); ++i)
    out.push_back(reduced[i] - zfront * rsec[i]);
  return out;
}

// the compact restriction (2 pi i z)^{rk} j* lift preserves the sesquilinear
// pairings: pairing on Z of the restricted sections against the narrow
// pairing on Y, over narrow basis vectors with small z twists
inline std::vector<ScalarSeries> narrow_pairing_residuals(
    const SerreContext& c) {
  const GeometryTriple& g = c.geom;
  const std::vector<int>& nar = g.narrow_monos();
  const std::vector<int>& amb = g.ambient_monos();
  int rk = g.rank_e();
  ScalarMat lm = lift_map(g);
  Scalar front = two_pi_i_power(rk);
  ZKey zr{rk, 0, 0};

  auto basis_vec = [&](std::size_t i, int ztwist) {
    std::vector<ScalarSeries> v(nar.size(), ScalarSeries::make(c.order));
    v[i].add_term(0, ZKey{ztwist, 0, 0}, Scalar(Rat(1)));
    return v;
  };
  auto restricted = [&](const std::vector<ScalarSeries>& v) {
    std::vector<ScalarSeries> full = apply_map(lm, v, c.order);
    // lift_map lands in monomial coordinates of X; on the ambient quotient
    // the monomial indices of Z pick the coordinates directly
    std::vector<ScalarSeries> ambc = pick_coords(full, amb);
    for (ScalarSeries& s : ambc) s = front * shift_key(s, zr);
    return ambc;
  };

  std::vector<ScalarSeries> out;
  for (std::size_t i = 0; i < nar.size(); ++i)
    for (int mi : {0, 1})
      for (std::size_t j = 0; j < nar.size(); ++j)
        for (int mj : {0, 1}) {
          std::vector<ScalarSeries> u = basis_vec(i, mi);
          std::vector<ScalarSeries> v = basis_vec(j, mj);
          ScalarSeries lhs = s_pairing(c.az, restricted(u), restricted(v));
          ScalarSeries rhs = s_pairing(c.ny, u, v);
          out.push_back(lhs - rhs);
        }
  return out;
}

// with lambda kept, cupping with e_lambda(E dual) carries the inverse Euler
// transport to the Euler transport at the dual parameter dressed by
// exp(-i pi c1(E) cup / z); requires the lambda-kept dual parameter to stay
// in the divisor chart
inline SeriesMatrix equivariant_intertwining_residual(const SerreContext& c) {
  const GeometryTriple& g = c.geom;
  if (!c.tr.lambda_chart_ok)
    throw MirrorMapOutOfRange(
        "equivariant intertwining needs the lambda-kept dual parameter inside "
        "the divisor chart");
  SeriesMatrix emat = lambda_cup_matrix(g, euler_lambda(g, true), c.order);
  SeriesMatrix lhs = c.ie.solution * emat;
  SeriesMatrix rhs =
      emat * solution_at_parameter(c.eu, c.tr.t0_lam, c.tr.t2_lam) *
      cup_exp_over_z(g, Rat(-1) * pi_i_power(1), g.c1_e(), c.order);
  return lhs - rhs;
}

// symplectic pairing [z^{-1}] sum f_i(-z) G_ij g_j(z) against the twisted
// Poincare pairing G
inline ScalarSeries omega_pairing(const SeriesMatrix& gram,
                                  const std::vector<ScalarSeries>& f,
                                  const std::vector<ScalarSeries>& g) {
  ScalarSeries acc = ScalarSeries::make(gram.order);
  for (std::size_t i = 0; i < gram.n; ++i)
    for (std::size_t j = 0; j < gram.n; ++j) {
      if (gram.at(i, j).is_zero()) continue;
      acc = acc + negate_z(f[i]) * gram.at(i, j) * g[j];
    }
  return z_layer(acc, -1);
}

// the transform exp(i pi c1(E)/z) e_lambda(E dual)^{-1} cup carries the
// inverse Euler symplectic form to the Euler one up to the parity of the
// rank; checked on a spanning family of z monomial sections
inline std::vector<ScalarSeries> symplectic_residuals(const SerreContext& c) {
  const GeometryTriple& g = c.geom;
  std::size_t len = g.len();
  int rk = g.rank_e();
  SeriesMatrix ge = twisted_gram(g, Twist::Euler, c.order);
  SeriesMatrix gie = twisted_gram(g, Twist::InverseEuler, c.order);
  SeriesMatrix dmat =
      cup_exp_over_z(g, pi_i_power(1), g.c1_e(), c.order) *
      lambda_cup_matrix(g, euler_lambda(g, true).invert(len), c.order);
  Rat sign = (rk % 2) ? Rat(-1) : Rat(1);

  auto basis_vec = [&](std::size_t i, int ztwist) {
    std::vector<ScalarSeries> v(len, ScalarSeries::make(c.order));
    v[i].add_term(0, ZKey{ztwist, 0, 0}, Scalar(Rat(1)));
    return v;
  };

  std::vector<ScalarSeries> out;
  for (std::size_t i = 0; i < len; ++i)
    for (int mi : {-1, 0, 1})
      for (std::size_t j = 0; j < len; ++j)
        for (int mj : {-1, 0, 1}) {
          std::vector<ScalarSeries> f = basis_vec(i, mi);
          std::vector<ScalarSeries> gv = basis_vec(j, mj);
          ScalarSeries lhs = omega_pairing(ge, apply_matrix(dmat, f),
                                           apply_matrix(dmat, gv));
          ScalarSeries rhs = sign * omega_pairing(gie, f, gv);
          out.push_back(lhs - rhs);
        }
  return out;
}

}  // namespace qsd
