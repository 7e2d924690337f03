#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toricdk/error.hpp"

namespace toricdk {

using Int = mpz_class;
using Rat = mpq_class;
using IntVec = std::vector<Int>;
using RatVec = std::vector<Rat>;
using RatMatrix = std::vector<RatVec>;  // row-major

inline Rat make_rat(const Int& num, const Int& den) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

inline Int floor_of(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline Int ceil_of(const Rat& q) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline Int floor_div(const Int& a, const Int& b) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int ceil_div(const Int& a, const Int& b) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int gcd(const Int& a, const Int& b) {
  Int r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int lcm(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

/// Exact "p/q" rendering; integers still carry the "/1".
inline std::string to_pq(const Rat& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline std::int64_t to_i64(const Int& v) {
  if (!v.fits_slong_p()) throw Error(ErrorCode::BadInput, "integer exceeds 64-bit scan range: " + v.get_str());
  return v.get_si();
}

inline IntVec to_intvec(const std::vector<long>& v) {
  IntVec out;
  out.reserve(v.size());
  for (long x : v) out.emplace_back(x);
  return out;
}

inline RatVec to_ratvec(const IntVec& v) {
  RatVec out;
  out.reserve(v.size());
  for (const auto& x : v) out.emplace_back(x);
  return out;
}

inline std::optional<IntVec> as_intvec(const RatVec& v) {
  IntVec out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!is_integer(x)) return std::nullopt;
    out.push_back(x.get_num());
  }
  return out;
}

inline Int content(const IntVec& v) {
  Int g = 0;
  for (const auto& x : v) g = gcd(g, x);
  return g;
}

inline bool is_primitive(const IntVec& v) { return content(v) == 1; }

inline Int dot(const IntVec& a, const IntVec& b) {
  Int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Rat dot(const RatVec& a, const IntVec& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Rat dot(const RatVec& a, const RatVec& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline RatVec operator-(const RatVec& a, const RatVec& b) {
  RatVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline RatVec operator+(const RatVec& a, const RatVec& b) {
  RatVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

/// Least common multiple of the denominators, so that den * v is integral.
inline Int common_denominator(const RatVec& v) {
  Int d = 1;
  for (const auto& x : v) d = lcm(d, x.get_den());
  return d;
}

inline RatMatrix to_ratmatrix(const std::vector<IntVec>& rows) {
  RatMatrix m;
  m.reserve(rows.size());
  for (const auto& r : rows) m.push_back(to_ratvec(r));
  return m;
}

inline RatMatrix transpose(const RatMatrix& m) {
  if (m.empty()) return {};
  RatMatrix t(m[0].size(), RatVec(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  return t;
}

inline RatVec mat_vec(const RatMatrix& m, const RatVec& v) {
  RatVec out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = dot(m[i], v);
  return out;
}

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(RatMatrix& a) {
  std::vector<std::size_t> pivots;
  if (a.empty()) return pivots;
  const std::size_t rows = a.size(), cols = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    Rat inv = 1 / a[r][c];
    for (auto& x : a[r]) x *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rat f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rank(RatMatrix a) { return rref(a).size(); }

inline std::optional<RatMatrix> inverse(const RatMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return RatMatrix{};
  RatMatrix aug(n, RatVec(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = m[i][j];
    aug[i][n + i] = 1;
  }
  auto piv = rref(aug);
  if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
  RatMatrix inv(n, RatVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
  return inv;
}

/// Solves m x = b for square nonsingular m.
inline std::optional<RatVec> solve(const RatMatrix& m, const RatVec& b) {
  auto inv = inverse(m);
  if (!inv) return std::nullopt;
  return mat_vec(*inv, b);
}

/// Basis of the right kernel {x : m x = 0} over Q.
inline RatMatrix kernel(RatMatrix m, std::size_t cols) {
  auto piv = rref(m);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : piv) is_pivot[c] = true;
  RatMatrix basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    RatVec x(cols, 0);
    x[f] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = -m[r][f];
    basis.push_back(std::move(x));
  }
  return basis;
}

}  // namespace toricdk
