// Characteristic classes on the P^n model, equivariant Euler classes as
// finite Laurent polynomials in lambda, and the operator dressings that
// turn characteristic data into flat-section inputs: z^{-Gr}, z^{rho}
// (through the formal log z), and (2 pi i)^{deg/2}.
//
// Conventions: the fiberwise torus weight on E is +1, so the summand
// O(l) contributes lambda + l H to e_lambda(E) and -lambda - l H to
// e_lambda(E dual).  Gamma classes come from log Gamma(1 + x) =
// -g x + sum_{k >= 2} (-1)^k zeta(k) x^k / k, with even zeta values
// reduced to powers of pi at construction.
#pragma once

#include <map>
#include <vector>

#include "qsd/cohomology.hpp"
#include "qsd/series.hpp"

namespace qsd {

// finite Laurent polynomial in lambda with class coefficients
struct LambdaClass {
  std::map<int, CohClass> c;

  static LambdaClass from_class(const CohClass& x, int lambda_exp = 0) {
    LambdaClass out;
    if (!x.is_zero()) out.c.emplace(lambda_exp, x);
    return out;
  }

  bool is_zero() const { return c.empty(); }

  void add_term(int lam, const CohClass& v) {
    if (v.is_zero()) return;
    auto it = c.find(lam);
    if (it == c.end()) {
      c.emplace(lam, v);
    } else {
      it->second = it->second + v;
      if (it->second.is_zero()) c.erase(it);
    }
  }

  friend LambdaClass operator+(const LambdaClass& a, const LambdaClass& b) {
    LambdaClass out = a;
    for (const auto& [l, v] : b.c) out.add_term(l, v);
    return out;
  }
  friend LambdaClass operator*(const LambdaClass& a, const LambdaClass& b) {
    LambdaClass out;
    for (const auto& [la, va] : a.c)
      for (const auto& [lb, vb] : b.c) out.add_term(la + lb, cup(va, vb));
    return out;
  }
  friend LambdaClass operator*(const Scalar& s, const LambdaClass& a) {
    LambdaClass out;
    for (const auto& [l, v] : a.c) out.add_term(l, s * v);
    return out;
  }

  // Laurent inverse: the top lambda term must have invertible H^0 part
  // (true for equivariant Euler classes, whose top term is a rational
  // multiple of 1); lower terms are nilpotent in H, so the expansion in
  // 1/lambda is finite.
  LambdaClass invert(std::size_t len) const {
    if (c.empty()) throw QsdError("LambdaClass: inverting zero");
    auto top = c.rbegin();
    const CohClass& lead = top->second;
    if (lead.c.empty() || lead.c[0].is_zero())
      throw QsdError("LambdaClass: top lambda term not a unit");
    CohClass lead_inv = invert_class(lead);
    // rest = lead_inv * (this) / lambda^top - 1, strictly lower in lambda
    LambdaClass rest;
    for (const auto& [l, v] : c) {
      if (l == top->first) continue;
      rest.add_term(l - top->first, cup(lead_inv, v));
    }
    LambdaClass unit = from_class(CohClass::h_power(len, 0));
    LambdaClass acc = unit, pw = unit;
    for (std::size_t k = 1; k <= len; ++k) {
      pw = pw * rest;
      if (pw.is_zero()) break;
      acc = (k % 2 ? acc + (Rat(-1) * pw) : acc + pw);
    }
    LambdaClass out;
    for (const auto& [l, v] : (acc * from_class(lead_inv)).c)
      out.add_term(l - top->first, v);
    return out;
  }

  ClassSeries as_series(int order) const {
    ClassSeries out = ClassSeries::make(order);
    for (const auto& [l, v] : c) out.add_term(0, ZKey{0, l, 0}, v);
    return out;
  }
};

inline LambdaClass euler_lambda(const GeometryTriple& g, bool dual) {
  std::size_t len = g.len();
  LambdaClass out = LambdaClass::from_class(CohClass::h_power(len, 0));
  for (int l : g.bundle().degrees) {
    LambdaClass f;
    Rat sign = dual ? -1 : 1;
    f.add_term(1, CohClass::h_power(len, 0, sign));
    f.add_term(0, CohClass::h_power(len, 1, Rat(sign * Rat(l))));
    out = out * f;
  }
  return out;
}

// ---- multiplicative classes from line-bundle roots ----------------------

// Todd factor x/(1 - e^{-x}) at x = l H, i.e. 1 + x/2 + sum B_k x^k / k!
inline CohClass todd_line(std::size_t len, const Rat& l) {
  CohClass out = CohClass::h_power(len, 0);
  Rat fact = 1, lp = 1;
  for (std::size_t k = 1; k < len; ++k) {
    fact *= Rat(static_cast<long>(k));
    lp *= l;
    Rat b = (k == 1) ? Rat(1, 2) : bernoulli(static_cast<unsigned>(k));
    out.c[k] = Scalar(Rat(b * lp / fact));
  }
  return out;
}

inline CohClass todd_bundle(const GeometryTriple& g, bool dual) {
  CohClass out = CohClass::h_power(g.len(), 0);
  for (int l : g.bundle().degrees)
    out = cup(out, todd_line(g.len(), dual ? Rat(-l) : Rat(l)));
  return out;
}

// Td(T P^n) through the Euler sequence
inline CohClass todd_tangent_x(const GeometryTriple& g) {
  CohClass out = CohClass::h_power(g.len(), 0);
  for (int k = 0; k <= g.dim_x(); ++k) out = cup(out, todd_line(g.len(), 1));
  return out;
}

// Gamma factor exp(log Gamma(1 + l H))
inline CohClass gamma_line(std::size_t len, const Rat& l) {
  CohClass logpart = CohClass::zero(len);
  Rat lp = 1;
  for (std::size_t k = 1; k < len; ++k) {
    lp *= l;
    Scalar coeff = (k == 1)
                       ? Rat(-1) * Scalar::euler_gamma()
                       : Rat(Rat(k % 2 ? -1 : 1) / Rat(static_cast<long>(k))) *
                             Scalar::zeta(static_cast<unsigned>(k));
    logpart.c[k] = coeff * Scalar(lp);
  }
  return exp_class(logpart);
}

inline CohClass gamma_hat_x(const GeometryTriple& g) {
  CohClass out = CohClass::h_power(g.len(), 0);
  for (int k = 0; k <= g.dim_x(); ++k) out = cup(out, gamma_line(g.len(), 1));
  return out;
}

inline CohClass gamma_hat_bundle(const GeometryTriple& g, bool dual) {
  CohClass out = CohClass::h_power(g.len(), 0);
  for (int l : g.bundle().degrees)
    out = cup(out, gamma_line(g.len(), dual ? Rat(-l) : Rat(l)));
  return out;
}

inline CohClass gamma_hat_y(const GeometryTriple& g) {
  return cup(gamma_hat_x(g), gamma_hat_bundle(g, /*dual=*/true));
}

// ambient coordinates of the Gamma class of Z, via the adjunction
// Gamma(T X) = Gamma(T Z) Gamma(E) restricted to Z
inline std::vector<Scalar> gamma_hat_z(const GeometryTriple& g) {
  CohClass on_x = cup(gamma_hat_x(g), invert_class(gamma_hat_bundle(g, false)));
  return g.j_star(on_x);
}

// ---- sheaf classes ------------------------------------------------------

inline CohClass ch_line(const GeometryTriple& g, int a) {
  return exp_class(CohClass::h_power(g.len(), 1, Rat(a)));
}

// ch of the pushforward to Y of O(a) on the zero section, and its
// compactly supported counterpart; phi carries one to the other
inline CohClass ch_pushforward_line(const GeometryTriple& g, int a) {
  return cup(g.euler_edual(),
             cup(ch_line(g, a), invert_class(todd_bundle(g, /*dual=*/true))));
}
inline CohClass ch_compact_pushforward_line(const GeometryTriple& g, int a) {
  return cup(ch_line(g, a), invert_class(todd_bundle(g, /*dual=*/true)));
}

// ---- operator dressings -------------------------------------------------

// (2 pi i)^{deg/2}, e.g. H^2 -> -4 pi^2 H^2
inline CohClass apply_two_pi_i_halfdeg(const CohClass& x, int sign = 1) {
  CohClass out = x;
  for (std::size_t k = 0; k < out.c.size(); ++k) {
    int m = sign * static_cast<int>(k);
    out.c[k] = (pow_rat(2, m) * pi_i_power(m)) * out.c[k];
  }
  return out;
}

// z^{-Gr}: the H^k component picks up z^{-k}
inline ClassSeries apply_z_neg_grading(const ClassSeries& v) {
  ClassSeries out = ClassSeries::make(v.order);
  for (int d = 0; d <= v.order; ++d)
    for (const auto& [k, val] : v.layer[static_cast<std::size_t>(d)])
      for (std::size_t h = 0; h < val.c.size(); ++h)
        if (!val.c[h].is_zero())
          out.add_term(d, ZKey{k.z - static_cast<int>(h), k.lam, k.lz},
                       CohClass::h_power(val.c.size(), h, val.c[h]));
  return out;
}

// z^{w H} = exp(w log z (H cup -)), nilpotent in H
inline ClassSeries apply_z_rho(const ClassSeries& v, const Rat& w) {
  ClassSeries out = ClassSeries::make(v.order);
  for (int d = 0; d <= v.order; ++d)
    for (const auto& [k, val] : v.layer[static_cast<std::size_t>(d)]) {
      CohClass pw = val;
      Rat fact = 1, wp = 1;
      out.add_term(d, k, val);
      for (std::size_t m = 1; m < val.c.size(); ++m) {
        pw = cup(CohClass::h_power(val.c.size(), 1), pw);
        if (pw.is_zero()) break;
        fact *= Rat(static_cast<long>(m));
        wp *= w;
        out.add_term(d, ZKey{k.z, k.lam, k.lz + static_cast<int>(m)},
                     Rat(wp / fact) * pw);
      }
    }
  return out;
}

// the full dressing U = z^{-Gr} z^{w H} applied to a constant class
inline ClassSeries apply_u_dressing(const CohClass& x, const Rat& w,
                                    int order) {
  ClassSeries v = ClassSeries::make(order);
  v.add_term(0, ZKey{}, x);
  return apply_z_neg_grading(apply_z_rho(v, w));
}

}  // namespace qsd
