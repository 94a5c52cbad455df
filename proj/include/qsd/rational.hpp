// Exact rational arithmetic.  Thin veneer over GMP's mpq_class: canonical
// text form "p/q" (or "p" for integers), a checked parser, binomials with
// arbitrary integer upper argument, and Bernoulli numbers in the B1 = -1/2
// convention.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "qsd/errors.hpp"

namespace qsd {

using Rat = mpq_class;

inline std::string to_string(const Rat& r) { return r.get_str(); }

// Accepts an optional sign, digits, and an optional "/digits" part.
inline Rat parse_rat(const std::string& text) {
  if (text.empty()) throw ParseError("empty rational literal");
  std::size_t i = (text[0] == '+' || text[0] == '-') ? 1 : 0;
  bool digits = false, slash = false;
  for (; i < text.size(); ++i) {
    if (text[i] == '/') {
      if (slash || !digits) throw ParseError("bad rational literal: " + text);
      slash = true;
      digits = false;
    } else if (text[i] >= '0' && text[i] <= '9') {
      digits = true;
    } else {
      throw ParseError("bad rational literal: " + text);
    }
  }
  if (!digits) throw ParseError("bad rational literal: " + text);
  Rat r(text);
  if (slash && Rat(text.substr(text.find('/') + 1)) == 0)
    throw ParseError("zero denominator: " + text);
  r.canonicalize();
  return r;
}

// Generalized binomial C(m, k) = m(m-1)...(m-k+1)/k! for integer m of any
// sign and k >= 0.
inline Rat binomial(long m, long k) {
  if (k < 0) return 0;
  Rat acc = 1;
  for (long j = 0; j < k; ++j) {
    acc *= Rat(m - j);
    acc /= Rat(j + 1);
  }
  return acc;
}

// Bernoulli numbers B_0, B_1, ... with B_1 = -1/2, via the defining
// recurrence sum_{j<=m} C(m+1, j) B_j = 0 for m >= 1.
inline Rat bernoulli(unsigned m) {
  std::vector<Rat> b(m + 1);
  b[0] = 1;
  for (unsigned k = 1; k <= m; ++k) {
    Rat acc = 0;
    for (unsigned j = 0; j < k; ++j) acc += binomial(k + 1, j) * b[j];
    b[k] = -acc / binomial(k + 1, k);
  }
  return b[m];
}

inline Rat pow_rat(const Rat& base, long e) {
  if (e < 0) {
    if (base == 0) throw QsdError("pow_rat: negative power of zero");
    return pow_rat(Rat(1) / base, -e);
  }
  Rat acc = 1, b = base;
  for (long k = e; k > 0; k >>= 1) {
    if (k & 1) acc *= b;
    b *= b;
  }
  return acc;
}

}  // namespace qsd
