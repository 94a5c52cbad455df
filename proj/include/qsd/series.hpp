// Truncated formal series in q with exact layered coefficients.  A term
// lives at a key (z exponent, lambda exponent, log z exponent): z and
// lambda range over the integers, log z is formal with d/dz log z = 1/z
// and exponent >= 0.  Values are either bare ring scalars or cohomology
// classes; matrices hold scalar-valued entries acting on monomial-basis
// coordinates.  All binary operations insist on equal truncation orders.
//
// Under z -> -z a term picks up (-1)^{z exponent} and log z shifts by
// i pi (the branch the pairing conventions fix once and for all).
#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "qsd/cohomology.hpp"
#include "qsd/errors.hpp"
#include "qsd/scalar.hpp"

namespace qsd {

struct ZKey {
  int z = 0;
  int lam = 0;
  int lz = 0;
  auto operator<=>(const ZKey&) const = default;
};

// (i pi)^m as a ring scalar
inline Scalar pi_i_power(int m) {
  Scalar out = Scalar::monomial(Mono{.pi = m}, 1);
  switch (((m % 4) + 4) % 4) {
    case 1: out = out * Scalar::i(); break;
    case 2: out = Rat(-1) * out; break;
    case 3: out = Rat(-1) * (out * Scalar::i()); break;
    default: break;
  }
  return out;
}

template <class V>
struct Layered {
  int order = 0;                          // layers q^0 .. q^order
  std::vector<std::map<ZKey, V>> layer;   // size order + 1

  static Layered make(int order) {
    Layered s;
    s.order = order;
    s.layer.resize(static_cast<std::size_t>(order) + 1);
    return s;
  }

  void add_term(int d, ZKey k, const V& v) {
    if (d < 0 || d > order || v.is_zero()) return;
    auto& slot = layer[static_cast<std::size_t>(d)];
    auto it = slot.find(k);
    if (it == slot.end()) {
      slot.emplace(k, v);
    } else {
      it->second = it->second + v;
      if (it->second.is_zero()) slot.erase(it);
    }
  }

  bool is_zero() const {
    for (const auto& l : layer)
      if (!l.empty()) return false;
    return true;
  }

  friend bool operator==(const Layered& a, const Layered& b) {
    return a.order == b.order && a.layer == b.layer;
  }
};

using ScalarSeries = Layered<Scalar>;
using ClassSeries = Layered<CohClass>;

namespace series_detail {
inline bool vzero(const Scalar& s) { return s.is_zero(); }
inline bool vzero(const CohClass& c) { return c.is_zero(); }
}  // namespace series_detail

template <class V>
void check_orders(const Layered<V>& a, int order) {
  if (a.order != order)
    throw TruncationMismatch("series orders " + std::to_string(a.order) +
                             " vs " + std::to_string(order));
}

template <class V>
Layered<V> operator+(const Layered<V>& a, const Layered<V>& b) {
  check_orders(b, a.order);
  Layered<V> out = a;
  for (int d = 0; d <= a.order; ++d)
    for (const auto& [k, v] : b.layer[static_cast<std::size_t>(d)])
      out.add_term(d, k, v);
  return out;
}

template <class V>
Layered<V> operator-(const Layered<V>& a) {
  Layered<V> out = a;
  for (auto& l : out.layer)
    for (auto& [k, v] : l) v = Rat(-1) * v;
  return out;
}

template <class V>
Layered<V> operator-(const Layered<V>& a, const Layered<V>& b) {
  return a + (-b);
}

template <class V>
Layered<V> operator*(const Scalar& s, const Layered<V>& a) {
  Layered<V> out = Layered<V>::make(a.order);
  for (int d = 0; d <= a.order; ++d)
    for (const auto& [k, v] : a.layer[static_cast<std::size_t>(d)])
      out.add_term(d, k, s * v);
  return out;
}

template <class V>
Layered<V> operator*(const Rat& c, const Layered<V>& a) {
  return Scalar(c) * a;
}

// product with a custom value combiner (scalar*scalar, scalar*class, cup)
template <class A, class B, class R, class F>
Layered<R> mul_with(const Layered<A>& a, const Layered<B>& b, F&& combine) {
  check_orders(b, a.order);
  Layered<R> out = Layered<R>::make(a.order);
  for (int da = 0; da <= a.order; ++da)
    for (const auto& [ka, va] : a.layer[static_cast<std::size_t>(da)])
      for (int db = 0; da + db <= a.order; ++db)
        for (const auto& [kb, vb] : b.layer[static_cast<std::size_t>(db)])
          out.add_term(da + db,
                       ZKey{ka.z + kb.z, ka.lam + kb.lam, ka.lz + kb.lz},
                       combine(va, vb));
  return out;
}

inline ScalarSeries operator*(const ScalarSeries& a, const ScalarSeries& b) {
  return mul_with<Scalar, Scalar, Scalar>(
      a, b, [](const Scalar& x, const Scalar& y) { return x * y; });
}
inline ClassSeries operator*(const ScalarSeries& a, const ClassSeries& b) {
  return mul_with<Scalar, CohClass, CohClass>(
      a, b, [](const Scalar& x, const CohClass& y) { return x * y; });
}
// cup product of class-valued series
inline ClassSeries cup_mul(const ClassSeries& a, const ClassSeries& b) {
  return mul_with<CohClass, CohClass, CohClass>(
      a, b, [](const CohClass& x, const CohClass& y) { return cup(x, y); });
}

// q d/dq
template <class V>
Layered<V> theta_q(const Layered<V>& a) {
  Layered<V> out = Layered<V>::make(a.order);
  for (int d = 1; d <= a.order; ++d)
    for (const auto& [k, v] : a.layer[static_cast<std::size_t>(d)])
      out.add_term(d, k, Rat(d) * v);
  return out;
}

// d/dz, with the log z chain rule
template <class V>
Layered<V> d_z(const Layered<V>& a) {
  Layered<V> out = Layered<V>::make(a.order);
  for (int d = 0; d <= a.order; ++d)
    for (const auto& [k, v] : a.layer[static_cast<std::size_t>(d)]) {
      if (k.z != 0) out.add_term(d, ZKey{k.z - 1, k.lam, k.lz}, Rat(k.z) * v);
      if (k.lz != 0)
        out.add_term(d, ZKey{k.z - 1, k.lam, k.lz - 1}, Rat(k.lz) * v);
    }
  return out;
}

template <class V>
Layered<V> negate_z(const Layered<V>& a) {
  Layered<V> out = Layered<V>::make(a.order);
  for (int d = 0; d <= a.order; ++d)
    for (const auto& [k, v] : a.layer[static_cast<std::size_t>(d)]) {
      Rat sign = (k.z % 2 == 0) ? 1 : -1;
      for (int j = 0; j <= k.lz; ++j) {
        Scalar c = binomial(k.lz, k.lz - j) * pi_i_power(k.lz - j);
        out.add_term(d, ZKey{k.z, k.lam, j}, (Scalar(sign) * c) * v);
      }
    }
  return out;
}

// lambda -> 0; negative lambda powers obstruct the limit
template <class V>
Layered<V> nonequivariant_limit(const Layered<V>& a, const char* where) {
  Layered<V> out = Layered<V>::make(a.order);
  for (int d = 0; d <= a.order; ++d)
    for (const auto& [k, v] : a.layer[static_cast<std::size_t>(d)]) {
      if (k.lam < 0)
        throw NegativeLambdaPower(std::string(where) + ": lambda^" +
                                  std::to_string(k.lam) + " at q^" +
                                  std::to_string(d));
      if (k.lam == 0) out.add_term(d, k, v);
    }
  return out;
}

template <class V>
bool has_negative_lambda(const Layered<V>& a) {
  for (const auto& l : a.layer)
    for (const auto& [k, v] : l)
      if (k.lam < 0) return true;
  return false;
}

template <class V>
Layered<V> lambda_layer(const Layered<V>& a, int b) {
  Layered<V> out = Layered<V>::make(a.order);
  for (int d = 0; d <= a.order; ++d)
    for (const auto& [k, v] : a.layer[static_cast<std::size_t>(d)])
      if (k.lam == b) out.add_term(d, ZKey{k.z, 0, k.lz}, v);
  return out;
}

// terms with z exponent exactly a, re-keyed to z^0
template <class V>
Layered<V> z_layer(const Layered<V>& a, int zexp) {
  Layered<V> out = Layered<V>::make(a.order);
  for (int d = 0; d <= a.order; ++d)
    for (const auto& [k, v] : a.layer[static_cast<std::size_t>(d)])
      if (k.z == zexp) out.add_term(d, ZKey{0, k.lam, k.lz}, v);
  return out;
}

// split into the strictly negative and the nonnegative z parts
template <class V>
std::pair<Layered<V>, Layered<V>> split_z(const Layered<V>& a) {
  Layered<V> neg = Layered<V>::make(a.order), pos = Layered<V>::make(a.order);
  for (int d = 0; d <= a.order; ++d)
    for (const auto& [k, v] : a.layer[static_cast<std::size_t>(d)])
      (k.z < 0 ? neg : pos).add_term(d, k, v);
  return {neg, pos};
}

template <class V>
Layered<V> shift_key(const Layered<V>& a, ZKey by) {
  Layered<V> out = Layered<V>::make(a.order);
  for (int d = 0; d <= a.order; ++d)
    for (const auto& [k, v] : a.layer[static_cast<std::size_t>(d)])
      out.add_term(d, ZKey{k.z + by.z, k.lam + by.lam, k.lz + by.lz}, v);
  return out;
}

template <class V>
Layered<V> q_layer_only(const Layered<V>& a, int d) {
  Layered<V> out = Layered<V>::make(a.order);
  for (const auto& [k, v] : a.layer[static_cast<std::size_t>(d)])
    out.add_term(d, k, v);
  return out;
}

// constant scalar series (single q^0 term, no z or lambda)
inline ScalarSeries constant_series(int order, const Scalar& c) {
  ScalarSeries out = ScalarSeries::make(order);
  out.add_term(0, ZKey{}, c);
  return out;
}

// exp of a scalar series that vanishes at q^0 (finite by truncation)
inline ScalarSeries exp_series(const ScalarSeries& x) {
  if (!x.layer[0].empty()) throw QsdError("exp_series: nonzero q^0 layer");
  ScalarSeries out = ScalarSeries::make(x.order);
  out.add_term(0, ZKey{}, Scalar(Rat(1)));
  ScalarSeries pw = out;
  Rat fact = 1;
  for (int k = 1; k <= x.order; ++k) {
    pw = pw * x;
    fact *= k;
    out = out + Rat(Rat(1) / fact) * pw;
  }
  return out;
}

// multiplicative inverse of a scalar series whose q^0 layer is a single
// invertible term (all uses have q^0 layer 1 or -1)
inline ScalarSeries invert_series(const ScalarSeries& u) {
  if (u.layer[0].size() != 1 || u.layer[0].begin()->first != ZKey{})
    throw QsdError("invert_series: q^0 layer not a plain unit");
  Scalar u0 = u.layer[0].begin()->second;
  Scalar u0inv = u0.invert();
  ScalarSeries rest = u0inv * u;  // 1 + positive q part
  rest.layer[0].clear();
  ScalarSeries out = ScalarSeries::make(u.order);
  out.add_term(0, ZKey{}, Scalar(Rat(1)));
  ScalarSeries pw = out;
  for (int k = 1; k <= u.order; ++k) {
    pw = pw * rest;
    out = (k % 2 ? out - pw : out + pw);
  }
  return u0inv * out;
}

// substitution q -> q u(q) for a unit u free of z and log z (lambda may
// appear); the q^0 layer of u must be a single invertible term
template <class V>
Layered<V> substitute_q(const Layered<V>& a, const ScalarSeries& u) {
  check_orders(u, a.order);
  if (u.layer[0].size() != 1 || u.layer[0].begin()->first.z != 0 ||
      u.layer[0].begin()->first.lz != 0 || u.layer[0].begin()->first.lam != 0)
    throw SubstitutionOverflow("substitute_q: u(0) not a plain unit");
  for (const auto& l : u.layer)
    for (const auto& [k, v] : l)
      if (k.z != 0 || k.lz != 0)
        throw SubstitutionOverflow("substitute_q: u carries z or log z");
  Layered<V> out = Layered<V>::make(a.order);
  // powers u^d, each truncated at the shared order
  ScalarSeries upow = ScalarSeries::make(a.order);
  upow.add_term(0, ZKey{}, Scalar(Rat(1)));
  for (int d = 0; d <= a.order; ++d) {
    for (const auto& [ka, va] : a.layer[static_cast<std::size_t>(d)])
      for (int e = 0; d + e <= a.order; ++e)
        for (const auto& [ku, vu] : upow.layer[static_cast<std::size_t>(e)])
          out.add_term(d + e, ZKey{ka.z, ka.lam + ku.lam, ka.lz}, vu * va);
    if (d < a.order) upow = upow * u;
  }
  return out;
}

// every H^k component must satisfy kappa d + (z exp) + (lambda exp) + k =
// shift; log z carries weight zero
inline bool is_weighted_homogeneous(const ClassSeries& a, int kappa,
                                    int shift) {
  for (int d = 0; d <= a.order; ++d)
    for (const auto& [k, v] : a.layer[static_cast<std::size_t>(d)])
      for (std::size_t h = 0; h < v.c.size(); ++h)
        if (!v.c[h].is_zero() &&
            kappa * d + k.z + k.lam + static_cast<int>(h) != shift)
          return false;
  return true;
}

// ---- matrices -----------------------------------------------------------

struct SeriesMatrix {
  int order = 0;
  std::size_t n = 0;
  std::vector<ScalarSeries> e;  // row-major, n*n entries

  static SeriesMatrix make(std::size_t n, int order) {
    SeriesMatrix m;
    m.order = order;
    m.n = n;
    m.e.assign(n * n, ScalarSeries::make(order));
    return m;
  }
  static SeriesMatrix identity(std::size_t n, int order) {
    SeriesMatrix m = make(n, order);
    for (std::size_t k = 0; k < n; ++k)
      m.at(k, k).add_term(0, ZKey{}, Scalar(Rat(1)));
    return m;
  }
  static SeriesMatrix from_rat(const RatMat& a, int order) {
    SeriesMatrix m = make(a.size(), order);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a.size(); ++j)
        m.at(i, j).add_term(0, ZKey{}, Scalar(a[i][j]));
    return m;
  }

  ScalarSeries& at(std::size_t i, std::size_t j) { return e[i * n + j]; }
  const ScalarSeries& at(std::size_t i, std::size_t j) const {
    return e[i * n + j];
  }

  bool is_zero() const {
    for (const auto& s : e)
      if (!s.is_zero()) return false;
    return true;
  }
  friend bool operator==(const SeriesMatrix& a, const SeriesMatrix& b) {
    return a.n == b.n && a.order == b.order && a.e == b.e;
  }
};

inline SeriesMatrix operator+(const SeriesMatrix& a, const SeriesMatrix& b) {
  if (a.n != b.n) throw QsdError("matrix add: size mismatch");
  SeriesMatrix out = a;
  for (std::size_t k = 0; k < a.e.size(); ++k) out.e[k] = out.e[k] + b.e[k];
  return out;
}
inline SeriesMatrix operator-(const SeriesMatrix& a, const SeriesMatrix& b) {
  if (a.n != b.n) throw QsdError("matrix sub: size mismatch");
  SeriesMatrix out = a;
  for (std::size_t k = 0; k < a.e.size(); ++k) out.e[k] = out.e[k] - b.e[k];
  return out;
}
inline SeriesMatrix operator*(const Scalar& s, const SeriesMatrix& a) {
  SeriesMatrix out = a;
  for (auto& x : out.e) x = s * x;
  return out;
}
inline SeriesMatrix operator*(const SeriesMatrix& a, const SeriesMatrix& b) {
  if (a.n != b.n) throw QsdError("matrix mul: size mismatch");
  SeriesMatrix out = SeriesMatrix::make(a.n, a.order);
  for (std::size_t i = 0; i < a.n; ++i)
    for (std::size_t k = 0; k < a.n; ++k) {
      if (a.at(i, k).is_zero()) continue;
      for (std::size_t j = 0; j < a.n; ++j) {
        if (b.at(k, j).is_zero()) continue;
        out.at(i, j) = out.at(i, j) + a.at(i, k) * b.at(k, j);
      }
    }
  return out;
}

inline SeriesMatrix transpose(const SeriesMatrix& a) {
  SeriesMatrix out = SeriesMatrix::make(a.n, a.order);
  for (std::size_t i = 0; i < a.n; ++i)
    for (std::size_t j = 0; j < a.n; ++j) out.at(i, j) = a.at(j, i);
  return out;
}

template <class F>
SeriesMatrix map_entries(const SeriesMatrix& a, F&& f) {
  SeriesMatrix out = a;
  for (auto& x : out.e) x = f(x);
  return out;
}

inline SeriesMatrix theta_q(const SeriesMatrix& a) {
  return map_entries(a, [](const ScalarSeries& s) { return theta_q(s); });
}
inline SeriesMatrix d_z(const SeriesMatrix& a) {
  return map_entries(a, [](const ScalarSeries& s) { return d_z(s); });
}
inline SeriesMatrix negate_z(const SeriesMatrix& a) {
  return map_entries(a, [](const ScalarSeries& s) { return negate_z(s); });
}
inline SeriesMatrix substitute_q(const SeriesMatrix& a,
                                 const ScalarSeries& u) {
  return map_entries(
      a, [&u](const ScalarSeries& s) { return substitute_q(s, u); });
}
inline SeriesMatrix shift_key(const SeriesMatrix& a, ZKey by) {
  return map_entries(a, [by](const ScalarSeries& s) { return shift_key(s, by); });
}
inline std::pair<SeriesMatrix, SeriesMatrix> split_z(const SeriesMatrix& a) {
  SeriesMatrix neg = SeriesMatrix::make(a.n, a.order);
  SeriesMatrix pos = SeriesMatrix::make(a.n, a.order);
  for (std::size_t k = 0; k < a.e.size(); ++k) {
    auto [nn, pp] = split_z(a.e[k]);
    neg.e[k] = nn;
    pos.e[k] = pp;
  }
  return {neg, pos};
}
inline SeriesMatrix q_layer_only(const SeriesMatrix& a, int d) {
  return map_entries(
      a, [d](const ScalarSeries& s) { return q_layer_only(s, d); });
}

// coordinates of a class-valued series in the monomial basis
inline std::vector<ScalarSeries> class_to_coords(const ClassSeries& a,
                                                 std::size_t len) {
  std::vector<ScalarSeries> out(len, ScalarSeries::make(a.order));
  for (int d = 0; d <= a.order; ++d)
    for (const auto& [k, v] : a.layer[static_cast<std::size_t>(d)])
      for (std::size_t h = 0; h < v.c.size() && h < len; ++h)
        if (!v.c[h].is_zero()) out[h].add_term(d, k, v.c[h]);
  return out;
}

inline ClassSeries coords_to_class(const std::vector<ScalarSeries>& coords) {
  int order = coords.empty() ? 0 : coords[0].order;
  ClassSeries out = ClassSeries::make(order);
  for (std::size_t h = 0; h < coords.size(); ++h)
    for (int d = 0; d <= order; ++d)
      for (const auto& [k, v] : coords[h].layer[static_cast<std::size_t>(d)])
        out.add_term(d, k, CohClass::h_power(coords.size(), h, v));
  return out;
}

inline std::vector<ScalarSeries> apply_matrix(
    const SeriesMatrix& m, const std::vector<ScalarSeries>& v) {
  if (v.size() != m.n) throw QsdError("apply_matrix: size mismatch");
  std::vector<ScalarSeries> out(m.n, ScalarSeries::make(m.order));
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) {
      if (m.at(i, j).is_zero() || v[j].is_zero()) continue;
      out[i] = out[i] + m.at(i, j) * v[j];
    }
  return out;
}

inline ClassSeries apply_matrix(const SeriesMatrix& m, const ClassSeries& v) {
  return coords_to_class(apply_matrix(m, class_to_coords(v, m.n)));
}

// Neumann inverse of Id + U where every power of U eventually dies (U has
// strictly positive q degree, or is nilpotent in its q^0 layer).  The
// power bound certifies failure.
inline SeriesMatrix invert_unipotent(const SeriesMatrix& m) {
  SeriesMatrix u = m - SeriesMatrix::identity(m.n, m.order);
  SeriesMatrix acc = SeriesMatrix::identity(m.n, m.order);
  SeriesMatrix pw = SeriesMatrix::identity(m.n, m.order);
  int bound = (m.order + 1) * (static_cast<int>(m.n) + 1) + 2;
  for (int k = 1; k <= bound; ++k) {
    pw = pw * u;
    if (pw.is_zero()) return acc;
    acc = (k % 2 ? acc - pw : acc + pw);
  }
  throw NotUnipotent("invert_unipotent: Neumann series does not terminate");
}

// exp of a matrix whose powers eventually die (same certificate)
inline SeriesMatrix exp_matrix(const SeriesMatrix& x) {
  SeriesMatrix acc = SeriesMatrix::identity(x.n, x.order);
  SeriesMatrix pw = acc;
  Rat fact = 1;
  int bound = (x.order + 1) * (static_cast<int>(x.n) + 1) + 2;
  for (int k = 1; k <= bound; ++k) {
    pw = pw * x;
    if (pw.is_zero()) return acc;
    fact *= k;
    acc = acc + Rat(Rat(1) / fact) * pw;
  }
  throw QsdError("exp_matrix: series does not terminate");
}

}  // namespace qsd
