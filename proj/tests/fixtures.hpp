#pragma once

#include "testutil.hpp"
#include "toricdk/fm.hpp"
#include "toricdk/stacky.hpp"

namespace fixtures {

using namespace toricdk;
using testutil::iv;

inline BirationalConfig flop() { return build_config(Case::Flip, 3, 2, 2, iv({1, 1, -1}), iv({1, 1, 1, 1})); }
inline BirationalConfig stacky_flip() { return build_config(Case::Flip, 3, 2, 2, iv({1, 1, -1}), iv({1, 1, 1, 2})); }
inline BirationalConfig plane_blowup() { return build_config(Case::Contraction, 2, 2, 2, iv({1, 1}), iv({1, 1, 1})); }

inline BirationalConfig random_reweight(testutil::Gen& g, std::size_t max_n = 3, long max_r = 8) {
  const std::size_t n = g.range(1, max_n);
  IntVec r(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = g.range(1, max_r);
    s[i] = g.range(1, r[i].get_si());
  }
  return build_config(Case::Reweight, n, 0, 0, {}, r, s);
}

/// Contraction with nonnegative crepancy sum.
inline BirationalConfig random_contraction(testutil::Gen& g, std::size_t max_n = 4, long max_a = 5, long max_r = 6) {
  for (;;) {
    const std::size_t n = g.range(2, max_n);
    const std::size_t n1 = g.range(2, n);
    IntVec a(n, 0);
    for (std::size_t i = 0; i < n1; ++i) a[i] = g.range(1, max_a);
    if (!is_primitive(a)) continue;
    auto c = build_config(Case::Contraction, n, n1, n1, a, g.ivec(n + 1, 1, max_r));
    if (crepancy_compare(c).value >= 0) return c;
  }
}

/// Flip with nonnegative crepancy sum.
inline BirationalConfig random_flip(testutil::Gen& g, std::size_t max_n = 4, long max_a = 4, long max_r = 4) {
  for (;;) {
    const std::size_t n = g.range(3, max_n);
    const std::size_t n1 = g.range(2, n - 1);
    const std::size_t n2 = g.range(n1, n - 1);
    IntVec a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = i < n1 ? g.range(1, max_a) : (i < n2 ? 0 : -g.range(1, max_a));
    if (!is_primitive(a)) continue;
    auto c = build_config(Case::Flip, n, n1, n2, a, g.ivec(n + 1, 1, max_r));
    if (crepancy_compare(c).value >= 0) return c;
  }
}

inline BirationalConfig random_inverse(testutil::Gen& g, std::size_t max_n = 3, long max_a = 3, long max_r = 6) {
  for (;;) {
    const std::size_t n = g.range(2, max_n);
    const std::size_t n1 = g.range(2, n);
    IntVec a(n, 0);
    for (std::size_t i = 0; i < n1; ++i) a[i] = g.range(1, max_a);
    if (!is_primitive(a)) continue;
    IntVec r = g.ivec(n + 1, 1, max_r);
    try {
      return build_config(Case::InverseContraction, n, n1, n1, a, r);
    } catch (const Error&) {
    }
  }
}

/// Random exponents moved into the range window by shifting one exponent
/// whose ray has a coefficient of the right sign.
inline IntVec random_in_range(testutil::Gen& g, const BirationalConfig& c, long spread = 4) {
  IntVec k = g.ivec(c.n + 1, -spread, spread);
  std::size_t i0;
  Rat step;
  if (c.kind == Case::Flip) {
    i0 = g.range(c.n2, c.n);
    step = make_rat(-c.a_full(i0), c.r[i0]);
  } else {
    i0 = g.range(0, c.n1 - 1);
    step = make_rat(c.a[i0], c.r[i0]);
  }
  Rat stat = range_statistic(k, c);
  k[i0] += floor_of(stat / step);
  return k;
}

}  // namespace fixtures
