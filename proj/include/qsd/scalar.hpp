// The exact coefficient ring: finite Q-linear combinations of monomials in
// the symbols i, pi, g (Euler-Mascheroni) and the odd zeta values zeta3,
// zeta5, ..., zeta13.  Relations applied eagerly at construction time:
// i^2 = -1, and even zeta values reduce to rational multiples of powers of
// pi, so neither ever appears in stored data.  The pi exponent is signed
// (pairing normalizations divide by (2 pi i)^dim); all other exponents are
// nonnegative.  Terms are kept sorted by total degree descending, ties
// broken lexicographically on the exponent tuple (i, pi, g, zeta3, ...),
// which fixes the canonical text form, e.g. "3/2*pi^2*zeta3 + i*g".
#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qsd/errors.hpp"
#include "qsd/rational.hpp"

namespace qsd {

inline constexpr int kZetaSlots = 6;  // zeta3 .. zeta13

struct Mono {
  std::int32_t i = 0;      // 0 or 1
  std::int32_t pi = 0;     // signed
  std::int32_t gamma = 0;  // >= 0
  std::array<std::int32_t, kZetaSlots> zeta{};

  friend bool operator==(const Mono&, const Mono&) = default;

  long total_degree() const {
    long t = i + pi + gamma;
    for (int e : zeta) t += e;
    return t;
  }

  // higher total degree first, then ascending lexicographic
  friend bool operator<(const Mono& a, const Mono& b) {
    long ta = a.total_degree(), tb = b.total_degree();
    if (ta != tb) return ta > tb;
    if (a.i != b.i) return a.i < b.i;
    if (a.pi != b.pi) return a.pi < b.pi;
    if (a.gamma != b.gamma) return a.gamma < b.gamma;
    return a.zeta < b.zeta;
  }
};

class Scalar {
 public:
  Scalar() = default;
  Scalar(const Rat& r) {
    if (r != 0) terms_.emplace_back(Mono{}, r);
  }
  Scalar(long v) : Scalar(Rat(v)) {}

  static Scalar i() { return monomial(Mono{.i = 1}, 1); }
  static Scalar pi(int e = 1) { return monomial(Mono{.pi = e}, 1); }
  static Scalar euler_gamma() { return monomial(Mono{.gamma = 1}, 1); }

  // zeta(k) for k >= 2; even k reduce to rational multiples of pi^k via
  // zeta(2m) = (-1)^{m+1} B_{2m} (2 pi)^{2m} / (2 (2m)!)
  static Scalar zeta(unsigned k) {
    if (k < 2) throw QsdError("zeta: argument must be >= 2");
    if (k % 2 == 0) {
      unsigned m = k / 2;
      Rat fact = 1;
      for (unsigned j = 2; j <= k; ++j) fact *= j;
      Rat c = Rat(bernoulli(k) * pow_rat(2, k)) / Rat(2 * fact);
      if (m % 2 == 0) c = -c;
      return monomial(Mono{.pi = static_cast<std::int32_t>(k)}, c);
    }
    if (k > 3 + 2 * (kZetaSlots - 1))
      throw QsdError("zeta: odd index beyond tracked range");
    Mono m;
    m.zeta[(k - 3) / 2] = 1;
    return monomial(m, 1);
  }

  static Scalar monomial(const Mono& m, const Rat& c) {
    Scalar s;
    if (c != 0) s.terms_.emplace_back(m, c);
    return s;
  }

  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].first == Mono{});
  }

  // coefficient of the empty monomial
  Rat rational_part() const {
    for (const auto& [m, c] : terms_)
      if (m == Mono{}) return c;
    return 0;
  }

  const std::vector<std::pair<Mono, Rat>>& terms() const { return terms_; }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    Scalar out;
    auto ia = a.terms_.begin(), ib = b.terms_.begin();
    while (ia != a.terms_.end() || ib != b.terms_.end()) {
      if (ib == b.terms_.end() ||
          (ia != a.terms_.end() && ia->first < ib->first)) {
        out.terms_.push_back(*ia++);
      } else if (ia == a.terms_.end() || ib->first < ia->first) {
        out.terms_.push_back(*ib++);
      } else {
        Rat c = ia->second + ib->second;
        if (c != 0) out.terms_.emplace_back(ia->first, c);
        ++ia, ++ib;
      }
    }
    return out;
  }

  friend Scalar operator-(const Scalar& a) {
    Scalar out = a;
    for (auto& [m, c] : out.terms_) c = -c;
    return out;
  }

  friend Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    Scalar out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Mono m;
        Rat c = ca * cb;
        m.i = ma.i + mb.i;
        if (m.i >= 2) {  // i^2 = -1
          m.i -= 2;
          c = -c;
        }
        m.pi = ma.pi + mb.pi;
        m.gamma = ma.gamma + mb.gamma;
        for (int k = 0; k < kZetaSlots; ++k) m.zeta[k] = ma.zeta[k] + mb.zeta[k];
        out = out + monomial(m, c);
      }
    return out;
  }

  friend Scalar operator*(const Rat& c, const Scalar& a) {
    Scalar out = a;
    if (c == 0) return Scalar();
    for (auto& [m, v] : out.terms_) v *= c;
    return out;
  }
  friend Scalar operator*(const Scalar& a, const Rat& c) { return c * a; }

  Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
  Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
  Scalar& operator*=(const Scalar& b) { return *this = *this * b; }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    return a.terms_ == b.terms_;
  }

  Scalar pow(unsigned e) const {
    Scalar acc(Rat(1)), b = *this;
    for (; e > 0; e >>= 1) {
      if (e & 1) acc = acc * b;
      b = b * b;
    }
    return acc;
  }

  // Inverse of a single term c * i^a * pi^b (no g, no zeta); this is the
  // only shape the pairing normalizations ever need to invert.
  Scalar invert() const {
    if (terms_.size() != 1) throw QsdError("invert: not a single term");
    const auto& [m, c] = terms_[0];
    if (m.gamma != 0 || m.zeta != std::array<std::int32_t, kZetaSlots>{})
      throw QsdError("invert: transcendental monomial");
    Mono inv;
    Rat ic = Rat(1) / c;
    inv.pi = -m.pi;
    inv.i = m.i;        // 1/i = -i
    if (m.i) ic = -ic;  //
    return monomial(inv, ic);
  }

  std::string to_text() const;
  static Scalar parse(const std::string& text);

 private:
  std::vector<std::pair<Mono, Rat>> terms_;  // sorted by Mono order
};

namespace detail {

inline const std::array<std::string, kZetaSlots>& zeta_names() {
  static const std::array<std::string, kZetaSlots> names = {
      "zeta3", "zeta5", "zeta7", "zeta9", "zeta11", "zeta13"};
  return names;
}

inline std::string mono_text(const Mono& m) {
  std::string out;
  auto emit = [&out](const std::string& sym, int e) {
    if (e == 0) return;
    if (!out.empty()) out += "*";
    out += sym;
    if (e != 1) out += "^" + std::to_string(e);
  };
  emit("i", m.i);
  emit("pi", m.pi);
  emit("g", m.gamma);
  for (int k = 0; k < kZetaSlots; ++k) emit(zeta_names()[k], m.zeta[k]);
  return out;
}

}  // namespace detail

inline std::string Scalar::to_text() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rat a = c < 0 ? Rat(-c) : c;
    if (first) {
      if (c < 0) out += "-";
      first = false;
    } else {
      out += c < 0 ? " - " : " + ";
    }
    std::string mono = detail::mono_text(m);
    if (mono.empty()) {
      out += to_string(a);
    } else {
      if (a != 1) out += to_string(a) + "*";
      out += mono;
    }
  }
  return out;
}

inline Scalar Scalar::parse(const std::string& text) {
  // grammar: term (('+'|'-') term)*, term = factor ('*' factor)*,
  // factor = rational | symbol ['^' int]; whitespace free-form
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && text[pos] == ' ') ++pos;
  };
  auto parse_int = [&]() -> long {
    skip();
    std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == start || (pos == start + 1 && !(text[start] >= '0')))
      throw ParseError("scalar: expected integer at " + std::to_string(start));
    return std::stol(text.substr(start, pos - start));
  };
  auto parse_factor = [&]() -> Scalar {
    skip();
    if (pos >= text.size()) throw ParseError("scalar: truncated factor");
    char c = text[pos];
    if ((c >= '0' && c <= '9')) {
      std::size_t start = pos;
      while (pos < text.size() &&
             ((text[pos] >= '0' && text[pos] <= '9') || text[pos] == '/'))
        ++pos;
      return Scalar(parse_rat(text.substr(start, pos - start)));
    }
    std::size_t start = pos;
    while (pos < text.size() &&
           ((text[pos] >= 'a' && text[pos] <= 'z') ||
            (text[pos] >= '0' && text[pos] <= '9')))
      ++pos;
    std::string name = text.substr(start, pos - start);
    Scalar base;
    if (name == "i") {
      base = Scalar::i();
    } else if (name == "pi") {
      base = Scalar::pi();
    } else if (name == "g") {
      base = Scalar::euler_gamma();
    } else {
      const auto& zs = detail::zeta_names();
      auto it = std::find(zs.begin(), zs.end(), name);
      if (it == zs.end()) throw ParseError("scalar: unknown symbol " + name);
      base = Scalar::zeta(3 + 2 * static_cast<unsigned>(it - zs.begin()));
    }
    skip();
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      long e = parse_int();
      if (e >= 0) return base.pow(static_cast<unsigned>(e));
      if (name != "pi") throw ParseError("scalar: negative power of " + name);
      return Scalar::monomial(Mono{.pi = static_cast<std::int32_t>(e)}, 1);
    }
    return base;
  };
  auto parse_term = [&]() -> Scalar {
    Scalar acc = parse_factor();
    skip();
    while (pos < text.size() && text[pos] == '*') {
      ++pos;
      acc = acc * parse_factor();
      skip();
    }
    return acc;
  };

  skip();
  bool neg = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    neg = text[pos] == '-';
    ++pos;
  }
  Scalar out = parse_term();
  if (neg) out = -out;
  skip();
  while (pos < text.size()) {
    if (text[pos] != '+' && text[pos] != '-')
      throw ParseError("scalar: expected '+' or '-' at " + std::to_string(pos));
    neg = text[pos] == '-';
    ++pos;
    Scalar t = parse_term();
    out = neg ? out - t : out + t;
    skip();
  }
  return out;
}

}  // namespace qsd
