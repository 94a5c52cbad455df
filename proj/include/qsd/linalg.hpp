// Dense exact linear algebra over the rationals, at the tiny sizes this
// project needs (matrices never exceed a dozen rows).  The solver is
// templated on the right-hand-side entry type so the same elimination
// serves rational vectors, coefficient-ring vectors, and q-series vectors;
// only the coefficient matrix must be rational.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qsd/errors.hpp"
#include "qsd/rational.hpp"

namespace qsd {

using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;

inline RatMat identity_mat(std::size_t n) {
  RatMat m(n, RatVec(n, 0));
  for (std::size_t k = 0; k < n; ++k) m[k][k] = 1;
  return m;
}

inline RatMat mat_mul(const RatMat& a, const RatMat& b) {
  std::size_t n = a.size(), p = b.empty() ? 0 : b[0].size(), m = b.size();
  RatMat out(n, RatVec(p, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < p; ++j) out[i][j] += a[i][k] * b[k][j];
    }
  return out;
}

inline RatVec mat_apply(const RatMat& a, const RatVec& v) {
  RatVec out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
  return out;
}

// Row echelon form in place; returns pivot columns.  Rows of `rhs`, when
// provided, undergo the same row operations.
template <class T>
std::vector<std::size_t> row_reduce(RatMat& a, std::vector<T>* rhs) {
  std::vector<std::size_t> pivots;
  std::size_t rows = a.size(), cols = rows ? a[0].size() : 0, r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    if (rhs) std::swap((*rhs)[p], (*rhs)[r]);
    Rat inv = Rat(1) / a[r][c];
    for (std::size_t j = c; j < cols; ++j) a[r][j] *= inv;
    if (rhs) (*rhs)[r] = (*rhs)[r] * inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rat f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
      if (rhs) (*rhs)[i] = (*rhs)[i] + (*rhs)[r] * Rat(-f);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rank(RatMat a) {
  return row_reduce<Rat>(a, nullptr).size();
}

// Basis of the right kernel, one vector per free column.
inline std::vector<RatVec> kernel_basis(RatMat a) {
  std::size_t cols = a.empty() ? 0 : a[0].size();
  auto pivots = row_reduce<Rat>(a, nullptr);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<RatVec> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    RatVec v(cols, 0);
    v[f] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -a[r][f];
    basis.push_back(v);
  }
  return basis;
}

inline RatMat inverse(RatMat a) {
  std::size_t n = a.size();
  std::vector<RatVec> id;
  for (std::size_t k = 0; k < n; ++k) {
    RatVec e(n, 0);
    e[k] = 1;
    id.push_back(e);
  }
  // rhs rows are rows of the identity; RatVec supports the needed ops via
  // the helpers below
  struct Row {
    RatVec v;
    Row operator*(const Rat& c) const {
      Row out = *this;
      for (auto& x : out.v) x *= c;
      return out;
    }
    Row operator+(const Row& o) const {
      Row out = *this;
      for (std::size_t j = 0; j < v.size(); ++j) out.v[j] += o.v[j];
      return out;
    }
  };
  std::vector<Row> rhs(n);
  for (std::size_t k = 0; k < n; ++k) rhs[k] = Row{id[k]};
  auto pivots = row_reduce(a, &rhs);
  if (pivots.size() != n) throw QsdError("inverse: singular matrix");
  RatMat out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = rhs[k].v;
  return out;
}

// Solve A x = b with rational A and entries of b in any module over the
// rationals (T needs T(), T + T, T * Rat and a zero test).  Returns nullopt
// when inconsistent; free coordinates are set to T().
template <class T, class IsZero>
std::optional<std::vector<T>> solve_linear(RatMat a, std::vector<T> b,
                                           IsZero is_zero) {
  std::size_t cols = a.empty() ? 0 : a[0].size();
  auto pivots = row_reduce(a, &b);
  for (std::size_t r = pivots.size(); r < b.size(); ++r)
    if (!is_zero(b[r])) return std::nullopt;
  std::vector<T> x(cols);
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = b[r];
  return x;
}

}  // namespace qsd
