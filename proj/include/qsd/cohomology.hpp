// Cohomology model for the triple Z = {s = 0} in X = P^n cut out by a
// generic section of the split convex bundle E = O(l_1) + ... + O(l_r),
// with Y the total space of the dual bundle.  Everything is carried on
// H*(X) = Q[H]/(H^{n+1}):
//
//   pullback along Y -> X and compact pushforward X -> Y are the identity,
//   the comparison map phi from compact to plain classes on Y is cup with
//   e(E dual) = prod(-l_j H), the zero-section pushforward is i_* = phi,
//   and the narrow subspace is the image of phi.
//
// The model pairing <pi* a, i^c_* b> on Y is int_X a b, so the narrow
// pairing of alpha and beta is int_X lift(alpha) beta where phi(lift) =
// alpha.  Ambient classes on Z are the quotient of H*(X) by K = ker(e(E)
// cup -), paired by int_X a b e(E); representatives keep the monomial
// coordinates outside K, which is a monomial span for split bundles.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qsd/errors.hpp"
#include "qsd/linalg.hpp"
#include "qsd/rational.hpp"
#include "qsd/scalar.hpp"

namespace qsd {

struct CohClass {
  std::vector<Scalar> c;  // index k holds the coefficient of H^k

  static CohClass zero(std::size_t len) { return {std::vector<Scalar>(len)}; }
  static CohClass h_power(std::size_t len, std::size_t k, Scalar coeff = Rat(1)) {
    CohClass out = zero(len);
    if (k < len) out.c[k] = coeff;
    return out;
  }

  std::size_t len() const { return c.size(); }
  bool is_zero() const {
    for (const auto& s : c)
      if (!s.is_zero()) return false;
    return true;
  }
  Scalar integrate() const { return c.empty() ? Scalar() : c.back(); }

  friend CohClass operator+(const CohClass& a, const CohClass& b) {
    CohClass out = a;
    for (std::size_t k = 0; k < out.c.size(); ++k) out.c[k] += b.c[k];
    return out;
  }
  friend CohClass operator-(const CohClass& a, const CohClass& b) {
    CohClass out = a;
    for (std::size_t k = 0; k < out.c.size(); ++k) out.c[k] -= b.c[k];
    return out;
  }
  friend CohClass operator*(const Scalar& s, const CohClass& a) {
    CohClass out = a;
    for (auto& x : out.c) x = s * x;
    return out;
  }
  friend bool operator==(const CohClass& a, const CohClass& b) {
    return a.c == b.c;
  }
};

// cup product mod H^{n+1}; both classes must live on the same space
inline CohClass cup(const CohClass& a, const CohClass& b) {
  if (a.len() != b.len()) throw QsdError("cup: mismatched spaces");
  CohClass out = CohClass::zero(a.len());
  for (std::size_t i = 0; i < a.len(); ++i) {
    if (a.c[i].is_zero()) continue;
    for (std::size_t j = 0; i + j < b.len(); ++j)
      out.c[i + j] += a.c[i] * b.c[j];
  }
  return out;
}

// exp of a class with no H^0 part (nilpotent, so the sum is finite)
inline CohClass exp_class(const CohClass& x) {
  if (!x.c.empty() && !x.c[0].is_zero())
    throw QsdError("exp_class: nonzero H^0 part");
  CohClass out = CohClass::h_power(x.len(), 0);
  CohClass pw = out;
  Rat fact = 1;
  for (std::size_t k = 1; k < x.len(); ++k) {
    pw = cup(pw, x);
    fact *= Rat(static_cast<long>(k));
    out = out + Rat(Rat(1) / fact) * pw;
  }
  return out;
}

// multiplicative inverse of a class with invertible H^0 part
inline CohClass invert_class(const CohClass& x) {
  if (x.c.empty() || x.c[0].is_zero())
    throw QsdError("invert_class: H^0 part is zero");
  Scalar u = x.c[0].invert();
  CohClass nil = u * x;  // 1 + nilpotent
  nil.c[0] = Scalar();
  CohClass out = CohClass::h_power(x.len(), 0);
  CohClass pw = out;
  for (std::size_t k = 1; k < x.len(); ++k) {
    pw = cup(pw, nil);
    out = (k % 2 ? out - pw : out + pw);
  }
  return u * out;
}

struct SpaceModel {
  int n;  // X = P^n
};

struct BundleModel {
  std::vector<int> degrees;  // splitting degrees l_j
  int rank() const { return static_cast<int>(degrees.size()); }
  int degree_sum() const {
    int s = 0;
    for (int l : degrees) s += l;
    return s;
  }
};

class GeometryTriple {
 public:
  GeometryTriple(SpaceModel x, BundleModel e) : x_(x), e_(e) {
    if (x_.n < 0) throw QsdError("geometry: negative dimension");
    for (int l : e_.degrees)
      if (l < 0) throw NonConvex("splitting degree " + std::to_string(l));
    std::size_t len = static_cast<std::size_t>(x_.n) + 1;
    euler_e_ = CohClass::h_power(len, 0);
    euler_edual_ = CohClass::h_power(len, 0);
    for (int l : e_.degrees) {
      euler_e_ = cup(euler_e_, CohClass::h_power(len, 1, Rat(l)));
      euler_edual_ = cup(euler_edual_, CohClass::h_power(len, 1, Rat(-l)));
    }
    phi_mat_ = mult_matrix(euler_edual_);
    // kernel of phi equals kernel of e(E) cup -, and for split bundles it
    // is spanned by monomials; assert that while extracting the exponents
    for (const auto& v : kernel_basis(phi_mat_)) {
      int mono = -1;
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k] == 0) continue;
        if (mono >= 0 || v[k] != 1)
          throw QsdError("geometry: kernel not a monomial span");
        mono = static_cast<int>(k);
      }
      kernel_monos_.push_back(mono);
    }
    std::vector<bool> in_kernel(len, false);
    for (int k : kernel_monos_) in_kernel[static_cast<std::size_t>(k)] = true;
    for (std::size_t k = 0; k < len; ++k)
      if (!in_kernel[k]) ambient_monos_.push_back(static_cast<int>(k));
    // narrow subspace = image of phi; again a monomial span here
    {
      RatMat rows;
      for (std::size_t j = 0; j < len; ++j) {
        RatVec row(len, 0);
        for (std::size_t i = 0; i < len; ++i) row[i] = phi_mat_[i][j];
        rows.push_back(row);
      }
      row_reduce<Rat>(rows, nullptr);
      for (const auto& v : rows) {
        int mono = -1;
        bool nonzero = false;
        for (std::size_t k = 0; k < v.size(); ++k) {
          if (v[k] == 0) continue;
          nonzero = true;
          if (mono >= 0 || v[k] != 1)
            throw QsdError("geometry: narrow image not a monomial span");
          mono = static_cast<int>(k);
        }
        if (nonzero) narrow_monos_.push_back(mono);
      }
    }
    // ambient pairing int_X a b e(E) on the representatives
    std::size_t adim = ambient_monos_.size();
    ambient_gram_ = RatMat(adim, RatVec(adim, 0));
    for (std::size_t i = 0; i < adim; ++i)
      for (std::size_t j = 0; j < adim; ++j) {
        int d = ambient_monos_[i] + ambient_monos_[j] + e_.rank();
        if (d == x_.n) {
          Rat v = 1;
          for (int l : e_.degrees) v *= l;
          ambient_gram_[i][j] = v;
        }
      }
    if (adim > 0 && rank(ambient_gram_) != adim)
      throw AmbientDegenerate("ambient pairing singular");
  }

  const SpaceModel& space() const { return x_; }
  const BundleModel& bundle() const { return e_; }
  int dim_x() const { return x_.n; }
  int dim_y() const { return x_.n + e_.rank(); }
  int dim_z() const { return x_.n - e_.rank(); }
  std::size_t len() const { return static_cast<std::size_t>(x_.n) + 1; }
  int rank_e() const { return e_.rank(); }
  int degree_sum() const { return e_.degree_sum(); }
  // weight of the flat-section dressing z^{rho}: n+1 on plain X, first
  // Chern class of the total space otherwise
  int fano_weight_x() const { return x_.n + 1; }
  int fano_weight_y() const { return x_.n + 1 - e_.degree_sum(); }

  const CohClass& euler_e() const { return euler_e_; }
  const CohClass& euler_edual() const { return euler_edual_; }
  CohClass c1_tangent_x() const {
    return CohClass::h_power(len(), 1, Rat(x_.n + 1));
  }
  CohClass c1_e() const {
    return CohClass::h_power(len(), 1, Rat(e_.degree_sum()));
  }

  CohClass monomial_of_degree(int degree) const {
    if (degree % 2 != 0) throw OddDegree("degree " + std::to_string(degree));
    return CohClass::h_power(len(), static_cast<std::size_t>(degree / 2));
  }

  // comparison map compact -> plain on Y, also the zero-section pushforward
  CohClass phi(const CohClass& a) const { return cup(euler_edual_, a); }
  CohClass i_star(const CohClass& a) const { return phi(a); }
  CohClass pi_star(const CohClass& a) const { return a; }
  CohClass i_star_c(const CohClass& a) const { return a; }

  // preimage under phi with free coordinates zero
  CohClass lift(const CohClass& alpha) const {
    auto sol = solve_linear(
        phi_mat_, alpha.c, [](const Scalar& s) { return s.is_zero(); });
    if (!sol) throw NotNarrow("class has no compact preimage");
    return CohClass{*sol};
  }

  bool is_narrow(const CohClass& alpha) const {
    auto sol = solve_linear(
        phi_mat_, alpha.c, [](const Scalar& s) { return s.is_zero(); });
    return sol.has_value();
  }

  // plain classes with narrow image rewrite compactly through lift; the
  // mixed cup of a plain class against a compact class is then the plain
  // cup in the X model
  CohClass compact_of_plain(const CohClass& a) const { return lift(a); }
  CohClass cup_compact(const CohClass& plain_a,
                       const CohClass& compact_b) const {
    return cup(plain_a, compact_b);
  }

  Scalar pairing_x(const CohClass& a, const CohClass& b) const {
    return cup(a, b).integrate();
  }
  // <pi* a, i^c_* b> on Y in the model identification
  Scalar pairing_y(const CohClass& plain_a, const CohClass& compact_b) const {
    return cup(plain_a, compact_b).integrate();
  }
  Scalar narrow_pairing(const CohClass& alpha, const CohClass& beta) const {
    return cup(lift(alpha), beta).integrate();
  }

  std::vector<CohClass> narrow_basis() const {
    std::vector<CohClass> out;
    for (int k : narrow_monos_)
      out.push_back(CohClass::h_power(len(), static_cast<std::size_t>(k)));
    return out;
  }
  std::vector<CohClass> kernel_phi() const {
    std::vector<CohClass> out;
    for (int k : kernel_monos_)
      out.push_back(CohClass::h_power(len(), static_cast<std::size_t>(k)));
    return out;
  }
  const std::vector<int>& narrow_monos() const { return narrow_monos_; }
  const std::vector<int>& kernel_monos() const { return kernel_monos_; }
  const std::vector<int>& ambient_monos() const { return ambient_monos_; }
  const RatMat& ambient_gram() const { return ambient_gram_; }
  std::size_t ambient_dim() const { return ambient_monos_.size(); }

  // restriction to Z in ambient coordinates: drop the K monomials
  std::vector<Scalar> j_star(const CohClass& a) const {
    std::vector<Scalar> out;
    for (int k : ambient_monos_) out.push_back(a.c[static_cast<std::size_t>(k)]);
    return out;
  }
  // monomial representative of an ambient class, back on X
  CohClass ambient_include(const std::vector<Scalar>& coords) const {
    CohClass out = CohClass::zero(len());
    for (std::size_t j = 0; j < ambient_monos_.size(); ++j)
      out.c[static_cast<std::size_t>(ambient_monos_[j])] = coords[j];
    return out;
  }
  Scalar ambient_pairing(const std::vector<Scalar>& a,
                         const std::vector<Scalar>& b) const {
    Scalar acc;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        acc += Rat(ambient_gram_[i][j]) * (a[i] * b[j]);
    return acc;
  }

  // matrix of cup with H in the monomial basis
  RatMat h_cup_matrix() const {
    RatMat m(len(), RatVec(len(), 0));
    for (std::size_t k = 0; k + 1 < len(); ++k) m[k + 1][k] = 1;
    return m;
  }

 private:
  RatMat mult_matrix(const CohClass& f) const {
    std::size_t n1 = len();
    RatMat m(n1, RatVec(n1, 0));
    for (std::size_t j = 0; j < n1; ++j)
      for (std::size_t i = j; i < n1; ++i) {
        const Scalar& s = f.c[i - j];
        if (!s.is_rational()) throw QsdError("mult_matrix: irrational class");
        m[i][j] = s.rational_part();
      }
    return m;
  }

  SpaceModel x_;
  BundleModel e_;
  CohClass euler_e_, euler_edual_;
  RatMat phi_mat_;
  std::vector<int> narrow_monos_, kernel_monos_, ambient_monos_;
  RatMat ambient_gram_;
};

}  // namespace qsd
