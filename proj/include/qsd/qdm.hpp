// Quantum D-modules over the geometry triple, in a fixed q-frame.
//
// Conventions:
//  - A module stores the fundamental solution SS = Id + O(q, 1/z) acting on
//    coordinates in a monomial basis, the z-free connection matrix B with
//    theta_q SS + z^{-1} B SS = z^{-1} SS (H cup), the quantum product
//    matrix A of H at the mirror point, and the mirror parameters tau0,
//    tau2.  theta_q is q d/dq.
//  - Grading: Gr = diag of the basis exponents, rho = w H with the Euler
//    weight w.  The dressing U = z^{-Gr} z^{rho} makes SS U v flat for both
//    connections: (theta_q + z^{-1} B) s = SS U (H cup v) in the divisor
//    direction, (d/dz - z^{-2} E + z^{-1} Gr) s = 0 with E = w A + tau0 Id.
//  - Every flavor lives at lambda -> 0; equivariant data stays in Theory.
//    The ambient flavor is the quotient of the Euler-twisted module by the
//    kernel of cup with e(E); the narrow flavor is the submodule of the
//    plain Y module spanned by the narrow monomials; the compact flavor is
//    the dual of the plain Y module across the pairing of X.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qsd/charclass.hpp"
#include "qsd/cohomology.hpp"
#include "qsd/errors.hpp"
#include "qsd/hypergeo.hpp"
#include "qsd/linalg.hpp"
#include "qsd/rational.hpp"
#include "qsd/scalar.hpp"
#include "qsd/series.hpp"

namespace qsd {

enum class QdmFlavor {
  PlainX,        // untwisted theory of the projective space
  TwistedEuler,  // Euler-twisted theory of X at lambda -> 0
  AmbientZ,      // ambient theory of the hypersurface cut, quotient by ker e(E)
  PlainY,        // inverse-Euler twisted theory of X at lambda -> 0, on Y
  CompactY,      // compactly supported dual of the plain Y module
  NarrowY        // narrow submodule of the plain Y module
};

inline const char* flavor_name(QdmFlavor f) {
  switch (f) {
    case QdmFlavor::PlainX: return "plain-x";
    case QdmFlavor::TwistedEuler: return "twisted-euler";
    case QdmFlavor::AmbientZ: return "ambient-z";
    case QdmFlavor::PlainY: return "plain-y";
    case QdmFlavor::CompactY: return "compact-y";
    default: return "narrow-y";
  }
}

struct QuantumDModule {
  QdmFlavor flavor;
  GeometryTriple geom;
  int order;
  std::vector<std::size_t> basis;    // H exponents of the coordinate monomials
  RatMat hcup;                       // cup with H in the flavor basis
  SeriesMatrix solution;             // SS = Id + O(q, 1/z)
  SeriesMatrix connection;           // B(q), z-free
  SeriesMatrix a_product;            // quantum product matrix of H
  ScalarSeries tau0, tau2;           // mirror parameters
  std::optional<SeriesMatrix> gram;  // self pairing when the flavor has one
  int w = 0;                         // Euler weight: E = w A + tau0 Id
  int dim = 0;                       // dimension entering (2 pi i z)^dim
};

// ---- projections between monomial frames ---------------------------------

// quotient by the dropped monomial span: the dropped columns must have no
// component along the kept rows, so that the matrix descends
inline SeriesMatrix project_quotient(const SeriesMatrix& a,
                                     const std::vector<int>& keep,
                                     const char* where) {
  std::vector<char> kept(a.n, 0);
  for (int k : keep) kept[static_cast<std::size_t>(k)] = 1;
  for (std::size_t j = 0; j < a.n; ++j) {
    if (kept[j]) continue;
    for (std::size_t i = 0; i < a.n; ++i)
      if (kept[i] && !a.at(i, j).is_zero())
        throw QsdError(std::string(where) +
                       ": dropped directions are not invariant");
  }
  SeriesMatrix out = SeriesMatrix::make(keep.size(), a.order);
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j)
      out.at(i, j) = a.at(static_cast<std::size_t>(keep[i]),
                          static_cast<std::size_t>(keep[j]));
  return out;
}

// restriction to the kept monomial span: the kept columns must have no
// component along the dropped rows, so that the span is preserved
inline SeriesMatrix restrict_subspace(const SeriesMatrix& a,
                                      const std::vector<int>& keep,
                                      const char* where) {
  std::vector<char> kept(a.n, 0);
  for (int k : keep) kept[static_cast<std::size_t>(k)] = 1;
  for (std::size_t j = 0; j < a.n; ++j) {
    if (!kept[j]) continue;
    for (std::size_t i = 0; i < a.n; ++i)
      if (!kept[i] && !a.at(i, j).is_zero())
        throw NarrowNotClosed(std::string(where) +
                              ": kept directions leak out of the span");
  }
  SeriesMatrix out = SeriesMatrix::make(keep.size(), a.order);
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j)
      out.at(i, j) = a.at(static_cast<std::size_t>(keep[i]),
                          static_cast<std::size_t>(keep[j]));
  return out;
}

// cup with H on a (possibly partial) monomial basis; a product that falls
// outside the basis is zero, which matches both the quotient and the
// submodule multiplication
inline RatMat basis_h_cup(const std::vector<std::size_t>& basis,
                          std::size_t full_len) {
  std::size_t k = basis.size();
  RatMat m(k, RatVec(k, 0));
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t target = basis[j] + 1;
    if (target >= full_len) continue;
    for (std::size_t i = 0; i < k; ++i)
      if (basis[i] == target) m[i][j] = 1;
  }
  return m;
}

inline SeriesMatrix limit_matrix(const SeriesMatrix& a, const char* where) {
  return map_entries(a, [where](const ScalarSeries& s) {
    return nonequivariant_limit(s, where);
  });
}

// ---- pairings -------------------------------------------------------------

inline RatMat poincare_gram_x(const GeometryTriple& g) {
  std::size_t n1 = g.len();
  RatMat m(n1, RatVec(n1, 0));
  for (std::size_t i = 0; i < n1; ++i) m[i][n1 - 1 - i] = 1;
  return m;
}

// q^0 gram of the lambda-kept twisted pairing int_X a b c(E) in the
// monomial basis; untwisted theories pair against 1
inline SeriesMatrix twisted_gram(const GeometryTriple& g, Twist tw,
                                 int order) {
  std::size_t n1 = g.len();
  LambdaClass c = LambdaClass::from_class(CohClass::h_power(n1, 0));
  if (tw == Twist::Euler) c = euler_lambda(g, false);
  if (tw == Twist::InverseEuler) c = euler_lambda(g, true).invert(n1);
  SeriesMatrix gram = SeriesMatrix::make(n1, order);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n1; ++j)
      for (const auto& [l, v] : c.c) {
        Scalar s = cup(cup(CohClass::h_power(n1, i), CohClass::h_power(n1, j)),
                       v)
                       .integrate();
        if (!s.is_zero()) gram.at(i, j).add_term(0, ZKey{0, l, 0}, s);
      }
  return gram;
}

// residual of S_a(-z)^T G S_b(z) = G
inline SeriesMatrix pairing_residual(const SeriesMatrix& sa,
                                     const SeriesMatrix& sb,
                                     const SeriesMatrix& gram) {
  return transpose(negate_z(sa)) * gram * sb - gram;
}

// ---- module builders ------------------------------------------------------

inline QuantumDModule build_qdm(const GeometryTriple& g, QdmFlavor f,
                                int order) {
  std::size_t n1 = g.len();
  QuantumDModule m{.flavor = f,
                   .geom = g,
                   .order = order,
                   .basis = {},
                   .hcup = {},
                   .solution = SeriesMatrix::make(0, order),
                   .connection = SeriesMatrix::make(0, order),
                   .a_product = SeriesMatrix::make(0, order),
                   .tau0 = ScalarSeries::make(order),
                   .tau2 = ScalarSeries::make(order),
                   .gram = std::nullopt,
                   .w = 0,
                   .dim = 0};

  auto full_basis = [n1] {
    std::vector<std::size_t> b(n1);
    for (std::size_t k = 0; k < n1; ++k) b[k] = k;
    return b;
  };
  auto class_gram = [&](const CohClass& weight) {
    SeriesMatrix gram = SeriesMatrix::make(n1, order);
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n1; ++j) {
        Scalar s =
            cup(cup(CohClass::h_power(n1, i), CohClass::h_power(n1, j)),
                weight)
                .integrate();
        if (!s.is_zero()) gram.at(i, j).add_term(0, ZKey{}, s);
      }
    return gram;
  };

  switch (f) {
    case QdmFlavor::PlainX: {
      Theory th = build_theory(g, Twist::Untwisted, order);
      m.basis = full_basis();
      m.hcup = g.h_cup_matrix();
      m.solution = th.solution;
      m.connection = th.bmat;
      m.a_product = th.a_mon;
      m.tau0 = th.tau0;
      m.tau2 = th.tau2;
      m.w = g.fano_weight_x();
      m.dim = g.dim_x();
      m.gram = class_gram(CohClass::h_power(n1, 0));
      break;
    }
    case QdmFlavor::TwistedEuler: {
      Theory th = build_theory(g, Twist::Euler, order);
      const char* where = "twisted euler reduction";
      m.basis = full_basis();
      m.hcup = g.h_cup_matrix();
      m.solution = limit_matrix(th.solution, where);
      m.connection = limit_matrix(th.bmat, where);
      m.a_product = limit_matrix(th.a_mon, where);
      m.tau0 = nonequivariant_limit(th.tau0, where);
      m.tau2 = nonequivariant_limit(th.tau2, where);
      m.w = g.fano_weight_y();
      m.dim = g.dim_x();
      m.gram = class_gram(g.euler_e());
      break;
    }
    case QdmFlavor::AmbientZ: {
      QuantumDModule base = build_qdm(g, QdmFlavor::TwistedEuler, order);
      const std::vector<int>& keep = g.ambient_monos();
      const char* where = "ambient reduction";
      m.basis.assign(keep.begin(), keep.end());
      m.hcup = basis_h_cup(m.basis, n1);
      m.solution = project_quotient(base.solution, keep, where);
      m.connection = project_quotient(base.connection, keep, where);
      m.a_product = project_quotient(base.a_product, keep, where);
      m.tau0 = base.tau0;
      m.tau2 = base.tau2;
      m.w = g.fano_weight_y();
      m.dim = g.dim_z();
      m.gram = SeriesMatrix::from_rat(g.ambient_gram(), order);
      break;
    }
    case QdmFlavor::PlainY: {
      Theory th = build_theory(g, Twist::InverseEuler, order);
      const char* where = "plain Y reduction";
      m.basis = full_basis();
      m.hcup = g.h_cup_matrix();
      m.solution = limit_matrix(th.solution, where);
      m.connection = limit_matrix(th.bmat, where);
      m.a_product = limit_matrix(th.a_mon, where);
      m.tau0 = nonequivariant_limit(th.tau0, where);
      m.tau2 = nonequivariant_limit(th.tau2, where);
      m.w = g.fano_weight_y();
      m.dim = g.dim_y();
      break;
    }
    case QdmFlavor::CompactY: {
      QuantumDModule y = build_qdm(g, QdmFlavor::PlainY, order);
      RatMat gx = poincare_gram_x(g);
      SeriesMatrix gmat = SeriesMatrix::from_rat(gx, order);
      SeriesMatrix ginv = SeriesMatrix::from_rat(inverse(gx), order);
      m.basis = full_basis();
      m.hcup = g.h_cup_matrix();
      m.solution =
          ginv * invert_unipotent(transpose(negate_z(y.solution))) * gmat;
      m.connection = ginv * transpose(y.connection) * gmat;
      m.a_product = ginv * transpose(y.a_product) * gmat;
      m.tau0 = y.tau0;
      m.tau2 = y.tau2;
      m.w = g.fano_weight_y();
      m.dim = g.dim_y();
      break;
    }
    default: {  // NarrowY
      QuantumDModule y = build_qdm(g, QdmFlavor::PlainY, order);
      const std::vector<int>& keep = g.narrow_monos();
      const char* where = "narrow restriction";
      m.basis.assign(keep.begin(), keep.end());
      m.hcup = basis_h_cup(m.basis, n1);
      m.solution = restrict_subspace(y.solution, keep, where);
      m.connection = restrict_subspace(y.connection, keep, where);
      m.a_product = restrict_subspace(y.a_product, keep, where);
      m.tau0 = y.tau0;
      m.tau2 = y.tau2;
      m.w = g.fano_weight_y();
      m.dim = g.dim_y();
      SeriesMatrix gram = SeriesMatrix::make(keep.size(), order);
      for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j) {
          Scalar s = g.narrow_pairing(
              CohClass::h_power(n1, static_cast<std::size_t>(keep[i])),
              CohClass::h_power(n1, static_cast<std::size_t>(keep[j])));
          if (!s.is_zero()) gram.at(i, j).add_term(0, ZKey{}, s);
        }
      m.gram = gram;
      break;
    }
  }
  return m;
}

// ---- flat sections --------------------------------------------------------

// U c = z^{-Gr} z^{w H} c for a constant coordinate vector c
inline std::vector<ScalarSeries> u_dressing(const QuantumDModule& m,
                                            const std::vector<Scalar>& c) {
  if (c.size() != m.basis.size())
    throw QsdError("u_dressing: coordinate size mismatch");
  std::size_t k = m.basis.size();
  std::vector<ScalarSeries> out(k, ScalarSeries::make(m.order));
  std::vector<Scalar> cur = c;
  Rat coef = 1;
  for (int p = 0; p <= static_cast<int>(k); ++p) {
    bool any = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (cur[i].is_zero()) continue;
      any = true;
      out[i].add_term(0, ZKey{0, 0, p}, cur[i] * coef);
    }
    if (!any) break;
    std::vector<Scalar> next(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (m.hcup[i][j] != 0 && !cur[j].is_zero())
          next[i] += cur[j] * Rat(m.hcup[i][j]);
    cur = std::move(next);
    coef = Rat(coef * m.w) / Rat(p + 1);
  }
  for (std::size_t i = 0; i < k; ++i)
    out[i] = shift_key(out[i], ZKey{-static_cast<int>(m.basis[i]), 0, 0});
  return out;
}

// SS U c, the flat frame evaluated on a constant coordinate vector
inline std::vector<ScalarSeries> dressed_column(const QuantumDModule& m,
                                                const std::vector<Scalar>& c) {
  return apply_matrix(m.solution, u_dressing(m, c));
}

// ---- flatness -------------------------------------------------------------

struct FlatnessReport {
  bool divisor_flat = true;  // (theta_q + z^{-1} B)(SS U v) = SS U (H cup v)
  bool z_flat = true;        // (d/dz - z^{-2} E + z^{-1} Gr)(SS U v) = 0
  bool commuting = true;     // [B, E] = 0 and theta_q E = B + [B, Gr]
  bool ok() const { return divisor_flat && z_flat && commuting; }
};

inline FlatnessReport flatness_report(const QuantumDModule& m) {
  FlatnessReport rep;
  std::size_t k = m.basis.size();
  SeriesMatrix emat = Scalar(Rat(m.w)) * m.a_product;
  for (std::size_t d = 0; d < k; ++d)
    emat.at(d, d) = emat.at(d, d) + m.tau0;
  RatMat grd(k, RatVec(k, 0));
  for (std::size_t d = 0; d < k; ++d)
    grd[d][d] = static_cast<long>(m.basis[d]);
  SeriesMatrix grm = SeriesMatrix::from_rat(grd, m.order);

  for (std::size_t j = 0; j < k; ++j) {
    std::vector<Scalar> ej(k);
    ej[j] = Rat(1);
    std::vector<ScalarSeries> s = dressed_column(m, ej);
    std::vector<Scalar> hj(k);
    for (std::size_t i = 0; i < k; ++i)
      if (m.hcup[i][j] != 0) hj[i] = Rat(m.hcup[i][j]);
    std::vector<ScalarSeries> sh = dressed_column(m, hj);
    std::vector<ScalarSeries> bs = apply_matrix(m.connection, s);
    std::vector<ScalarSeries> es = apply_matrix(emat, s);
    for (std::size_t i = 0; i < k; ++i) {
      ScalarSeries r1 = theta_q(s[i]) + shift_key(bs[i], ZKey{-1, 0, 0}) -
                        sh[i];
      if (!r1.is_zero()) rep.divisor_flat = false;
      ScalarSeries rz = d_z(s[i]) - shift_key(es[i], ZKey{-2, 0, 0}) +
                        Scalar(Rat(static_cast<long>(m.basis[i]))) *
                            shift_key(s[i], ZKey{-1, 0, 0});
      if (!rz.is_zero()) rep.z_flat = false;
    }
  }

  SeriesMatrix c1 = m.connection * emat - emat * m.connection;
  SeriesMatrix c2 = theta_q(emat) - m.connection -
                    (m.connection * grm - grm * m.connection);
  rep.commuting = c1.is_zero() && c2.is_zero();
  return rep;
}

// ---- unitarity ------------------------------------------------------------

// residual of SS(-z)^T G SS(z) = G against the module's own pairing
inline SeriesMatrix unitarity_residual(const QuantumDModule& m) {
  if (!m.gram)
    throw FlavorMismatch(std::string("unitarity: no self pairing for ") +
                         flavor_name(m.flavor));
  return pairing_residual(m.solution, m.solution, *m.gram);
}

// residual of the compact against plain duality across the pairing of X
inline SeriesMatrix dual_unitarity_residual(const QuantumDModule& compact,
                                            const QuantumDModule& plain) {
  if (compact.flavor != QdmFlavor::CompactY ||
      plain.flavor != QdmFlavor::PlainY)
    throw FlavorMismatch("dual unitarity wants the compact and plain pair");
  SeriesMatrix gmat =
      SeriesMatrix::from_rat(poincare_gram_x(compact.geom), compact.order);
  return pairing_residual(compact.solution, plain.solution, gmat);
}

// lambda-kept unitarity of a twisted theory against its twisted pairing
inline SeriesMatrix theory_unitarity_residual(const Theory& th) {
  SeriesMatrix gram = twisted_gram(th.geom, th.twist, th.order);
  return pairing_residual(th.solution, th.solution, gram);
}

// ---- sesquilinear pairing and gamma sections ------------------------------

// (2 pi i z)^dim <u(-z), v(z)> against the module gram
inline ScalarSeries s_pairing(const QuantumDModule& m,
                              const std::vector<ScalarSeries>& u,
                              const std::vector<ScalarSeries>& v) {
  if (!m.gram)
    throw FlavorMismatch(std::string("s_pairing: no self pairing for ") +
                         flavor_name(m.flavor));
  ScalarSeries acc = ScalarSeries::make(m.order);
  for (std::size_t i = 0; i < m.basis.size(); ++i)
    for (std::size_t j = 0; j < m.basis.size(); ++j) {
      if (m.gram->at(i, j).is_zero()) continue;
      acc = acc + negate_z(u[i]) * m.gram->at(i, j) * v[j];
    }
  Scalar front = pi_i_power(m.dim) * Rat(pow_rat(Rat(2), m.dim));
  return front * shift_key(acc, ZKey{m.dim, 0, 0});
}

// gamma-dressed flat section attached to the structure sheaf twist O(a):
// (2 pi i)^{-dim} SS U (Gamma-hat cup (2 pi i)^{deg/2} ch)
inline std::vector<ScalarSeries> gamma_section(const QuantumDModule& m,
                                               int a) {
  const GeometryTriple& g = m.geom;
  std::size_t n1 = g.len();
  std::vector<Scalar> coords;
  switch (m.flavor) {
    case QdmFlavor::PlainX: {
      CohClass c = cup(gamma_hat_x(g), apply_two_pi_i_halfdeg(ch_line(g, a)));
      coords = c.c;
      break;
    }
    case QdmFlavor::CompactY: {
      CohClass c = cup(gamma_hat_y(g),
                       apply_two_pi_i_halfdeg(
                           ch_compact_pushforward_line(g, a)));
      coords = c.c;
      break;
    }
    case QdmFlavor::NarrowY: {
      CohClass c = cup(gamma_hat_y(g),
                       apply_two_pi_i_halfdeg(ch_pushforward_line(g, a)));
      if (!g.is_narrow(c))
        throw NotNarrow("gamma_section: pushforward class is not narrow");
      for (std::size_t b : m.basis) coords.push_back(c.c[b]);
      break;
    }
    case QdmFlavor::AmbientZ: {
      CohClass up = cup(
          cup(gamma_hat_x(g), invert_class(gamma_hat_bundle(g, false))),
          apply_two_pi_i_halfdeg(ch_line(g, a)));
      coords = g.j_star(up);
      break;
    }
    default:
      throw FlavorMismatch(
          std::string("gamma_section: no gamma structure for ") +
          flavor_name(m.flavor));
  }
  (void)n1;
  std::vector<ScalarSeries> s = dressed_column(m, coords);
  Scalar front = pi_i_power(-m.dim) * pow_rat(Rat(1, 2), m.dim);
  for (auto& comp : s) comp = front * comp;
  return s;
}

// residual of the Euler pairing identity for gamma sections on X:
// S(s(O(a)), s(O(b))) = e^{i pi dim} binom(dim + a - b, dim)
inline ScalarSeries euler_pairing_residual(const QuantumDModule& m, int a,
                                           int b) {
  if (m.flavor != QdmFlavor::PlainX)
    throw FlavorMismatch("euler_pairing_residual: stated on the plain X flavor");
  std::vector<ScalarSeries> u = gamma_section(m, a);
  std::vector<ScalarSeries> v = gamma_section(m, b);
  ScalarSeries p = s_pairing(m, u, v);
  Rat expected = Rat(m.dim % 2 ? -1 : 1) * binomial(m.dim + a - b, m.dim);
  ScalarSeries e = ScalarSeries::make(m.order);
  e.add_term(0, ZKey{}, Scalar(expected));
  return p - e;
}

// ---- parameter shifts -----------------------------------------------------

// fundamental solution moved to the parameter (T0, T2): substitute the
// curve qhat(q) solving log qhat + tau2(qhat) = log q + T2(q), then dress by
// exp(-((T0 - tau0(qhat)) + (T2 - tau2(qhat)) H)/z).  The q^0 constant of
// T2 must be an integer multiple of i pi so that it exponentiates to a sign.
inline SeriesMatrix solution_at_parameter(const SeriesMatrix& sol,
                                          const ScalarSeries& tau0,
                                          const ScalarSeries& tau2,
                                          const RatMat& hcup,
                                          const ScalarSeries& t0,
                                          const ScalarSeries& t2,
                                          ScalarSeries* unit_out = nullptr) {
  int order = sol.order;
  if (!t0.layer[0].empty())
    throw QsdError("solution_at_parameter: T0 must vanish at q = 0");
  Rat sgn = 1;
  if (!t2.layer[0].empty()) {
    if (t2.layer[0].size() != 1 || t2.layer[0].begin()->first != ZKey{})
      throw QsdError("solution_at_parameter: bad constant in T2");
    Scalar c = t2.layer[0].begin()->second;
    Scalar ratio = c * pi_i_power(-1);
    if (!ratio.is_rational() ||
        ratio.rational_part().get_den() != 1)
      throw QsdError(
          "solution_at_parameter: T2 constant is not an integer multiple of "
          "i pi");
    if (ratio.rational_part().get_num() % 2 != 0) sgn = -1;
  }
  ScalarSeries t2pos = t2;
  t2pos.layer[0].clear();

  ScalarSeries u = ScalarSeries::make(order);
  u.add_term(0, ZKey{}, Scalar(sgn));
  for (int it = 0; it <= order; ++it)
    u = Scalar(sgn) * exp_series(t2pos - substitute_q(tau2, u));
  if (unit_out) *unit_out = u;

  SeriesMatrix shat = substitute_q(sol, u);
  ScalarSeries a = t0 - substitute_q(tau0, u);
  ScalarSeries b = t2 - substitute_q(tau2, u);
  SeriesMatrix x = SeriesMatrix::make(sol.n, order);
  for (std::size_t i = 0; i < sol.n; ++i) {
    x.at(i, i) = x.at(i, i) - a;
    for (std::size_t j = 0; j < sol.n; ++j)
      if (hcup[i][j] != 0)
        x.at(i, j) = x.at(i, j) - Scalar(Rat(hcup[i][j])) * b;
  }
  return shat * exp_matrix(shift_key(x, ZKey{-1, 0, 0}));
}

inline SeriesMatrix solution_at_parameter(const QuantumDModule& m,
                                          const ScalarSeries& t0,
                                          const ScalarSeries& t2,
                                          ScalarSeries* unit_out = nullptr) {
  return solution_at_parameter(m.solution, m.tau0, m.tau2, m.hcup, t0, t2,
                               unit_out);
}

inline SeriesMatrix solution_at_parameter(const Theory& th,
                                          const ScalarSeries& t0,
                                          const ScalarSeries& t2,
                                          ScalarSeries* unit_out = nullptr) {
  return solution_at_parameter(th.solution, th.tau0, th.tau2,
                               th.geom.h_cup_matrix(), t0, t2, unit_out);
}

}  // namespace qsd
