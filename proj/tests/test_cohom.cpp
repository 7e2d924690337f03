#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "testutil.hpp"
#include "toricdk/cohom.hpp"

using namespace toricdk;
using testutil::iv;

namespace {

StackyFan projective_line() {
  StackyFan f;
  f.n = 1;
  f.ambient = Lattice::standard(1);
  f.rays = {iv({1}), iv({-1})};
  f.mults = iv({1, 1});
  f.cones = {{0}, {1}};
  return f;
}

// Brute-force dims by building the full Cech complex for one degree without
// the pattern cache.
std::vector<std::int64_t> direct_dims(const StackyFan& fan, const IntVec& d, const IntVec& m) {
  const std::size_t nc = fan.cones.size();
  auto ok_face = [&](std::uint32_t s) {
    for (std::size_t i = 0; i < fan.rays.size(); ++i) {
      bool in_all = true;
      for (std::size_t j = 0; j < nc; ++j)
        if (s >> j & 1) in_all = in_all && std::find(fan.cones[j].begin(), fan.cones[j].end(), i) != fan.cones[j].end();
      if (in_all && dot(m, fan.rays[i]) < -d[i]) return false;
    }
    return true;
  };
  std::vector<std::vector<std::uint32_t>> terms(nc);
  for (std::uint32_t s = 1; s < (1u << nc); ++s)
    if (ok_face(s)) terms[__builtin_popcount(s) - 1].push_back(s);
  std::vector<std::int64_t> rk(nc, 0);
  for (std::size_t p = 0; p + 1 < nc; ++p) {
    if (terms[p].empty() || terms[p + 1].empty()) continue;
    RatMatrix mat(terms[p + 1].size(), RatVec(terms[p].size(), 0));
    for (std::size_t a = 0; a < terms[p].size(); ++a)
      for (std::size_t b = 0; b < terms[p + 1].size(); ++b) {
        auto s = terms[p][a], t = terms[p + 1][b];
        if ((s & t) != s) continue;
        int pos = 0;
        for (std::size_t j = 0; j < nc; ++j) {
          if (!(t >> j & 1)) continue;
          if (!(s >> j & 1)) break;
          ++pos;
        }
        mat[b][a] = pos % 2 ? -1 : 1;
      }
    rk[p] = static_cast<std::int64_t>(rank(mat));
  }
  std::vector<std::int64_t> out(nc);
  for (std::size_t p = 0; p < nc; ++p) out[p] = static_cast<std::int64_t>(terms[p].size()) - rk[p] - (p ? rk[p - 1] : 0);
  return out;
}

}  // namespace

TEST(RoundedHomSheaf, Examples) {
  auto c = fixtures::flop();
  EXPECT_EQ(rounded_hom_sheaf(iv({1, 2, 0, 3}), iv({1, 2, 0, 3}), Side::Y, c), iv({0, 0, 0, 0}));
  EXPECT_EQ(rounded_divisor(iv({1, 1, 1}), iv({2, 3, 5}), true), iv({-1, -1, -1}));
  EXPECT_EQ(rounded_hom_sheaf(iv({0, 0, 0, 0}), iv({1, 0, 0, 0}), Side::Y, c), iv({1, 0, 0, 0}));
  EXPECT_EQ(rounded_divisor(iv({-3, 5}), iv({2, 2}), false), iv({-2, 2}));
}

TEST(CechGradedDim, ProjectiveLine) {
  auto p1 = projective_line();
  // O(-2 D_1), D_1 the divisor of the ray (1): H^1 lives in degree u = 1.
  EXPECT_EQ(cech_graded_dim(p1, iv({-2, 0}), iv({1})), (std::vector<std::int64_t>{0, 1}));
  EXPECT_EQ(cech_graded_dim(p1, iv({-2, 0}), iv({-1})), (std::vector<std::int64_t>{0, 0}));
  auto rep = verify_vanishing(p1, iv({-2, 0}), 10);
  EXPECT_EQ(rep.totals[1], 1);
  EXPECT_EQ(rep.totals[0], 0);
  ASSERT_EQ(rep.witnesses.size(), 1u);
  EXPECT_EQ(rep.witnesses[0].degree, (std::vector<std::int64_t>{1}));
  // Serre: h^0(O(d)) = d + 1, h^1(O(-d)) = d - 1.
  for (long deg = -6; deg <= 6; ++deg) {
    auto r = verify_vanishing(p1, iv({deg, 0}), 20);
    EXPECT_EQ(r.totals[0], std::max(0L, deg + 1));
    EXPECT_EQ(r.totals[1], std::max(0L, -deg - 1));
  }
}

TEST(CechGradedDim, AffineVanishing) {
  testutil::Gen g(41);
  for (int trial = 0; trial < 200; ++trial) {
    auto c = fixtures::random_contraction(g, 3);
    auto y = fans_of(c).y;
    IntVec d = g.ivec(c.n, -5, 5), m = g.ivec(c.n, -6, 6);
    auto dims = cech_graded_dim(y, d, m);
    ASSERT_EQ(dims.size(), 1u);
  }
  auto y = fans_of(fixtures::plane_blowup()).y;
  auto rep = verify_vanishing(y, iv({3, -2}), 15);
  EXPECT_TRUE(rep.vanishing());
}

TEST(CechGradedDim, BlowupTwoE) {
  auto x = fans_of(fixtures::plane_blowup()).x;
  auto rep = verify_vanishing(x, iv({0, 0, 2}), 20);
  EXPECT_EQ(rep.totals[1], 1);
  ASSERT_EQ(rep.witnesses.size(), 1u);
  EXPECT_EQ(rep.witnesses[0].degree, (std::vector<std::int64_t>{-1, -1}));
  EXPECT_EQ(rep.witnesses[0].p, 1u);
}

TEST(CechGradedDim, MatchesDirectComplex) {
  testutil::Gen g(42);
  for (int trial = 0; trial < 40; ++trial) {
    auto c = fixtures::random_flip(g, 4, 3, 2);
    auto t = fans_of(c);
    for (const StackyFan* f : {&t.x, &t.y, &t.w}) {
      IntVec d = g.ivec(f->rays.size(), -3, 3);
      IntVec m = g.ivec(c.n, -4, 4);
      EXPECT_EQ(cech_graded_dim(*f, d, m), direct_dims(*f, d, m));
    }
  }
}

TEST(CechGradedDim, EulerCharacteristic) {
  testutil::Gen g(43);
  for (int trial = 0; trial < 60; ++trial) {
    auto c = fixtures::random_flip(g, 4, 3, 2);
    auto w = fans_of(c).w;
    CechComplex cx(w);
    IntVec d = g.ivec(w.rays.size(), -3, 3);
    IntVec m = g.ivec(c.n, -4, 4);
    auto pat = cx.pattern(d, m);
    auto dims = cx.dims(pat);
    std::int64_t chi = 0;
    for (std::size_t p = 0; p < dims.size(); ++p) chi += p % 2 ? -dims[p] : dims[p];
    EXPECT_EQ(chi, cx.euler_terms(pat));
    for (auto x : dims) EXPECT_GE(x, 0);
  }
}

TEST(VerifyVanishing, ScanMatchesPointwise) {
  auto x = fans_of(fixtures::flop()).x;
  IntVec d = iv({-2, 1, 0, -1});
  const std::int64_t box = 4;
  auto rep = verify_vanishing(x, d, box, 1, 1, 100000);
  std::vector<std::int64_t> totals(x.cones.size(), 0);
  for (long a = -box; a <= box; ++a)
    for (long b = -box; b <= box; ++b)
      for (long e = -box; e <= box; ++e) {
        auto dims = cech_graded_dim(x, d, iv({a, b, e}));
        for (std::size_t p = 0; p < dims.size(); ++p) totals[p] += dims[p];
      }
  EXPECT_EQ(rep.totals, totals);
  std::int64_t wit = 0;
  for (const auto& w : rep.witnesses) wit += w.dim;
  EXPECT_EQ(wit, totals[1]);
}

TEST(VerifyVanishing, WorkersDoNotChangeReport) {
  auto x = fans_of(fixtures::plane_blowup()).x;
  auto one = verify_vanishing(x, iv({0, 0, 3}), 12, 1, 1);
  auto many = verify_vanishing(x, iv({0, 0, 3}), 12, 1, 4);
  EXPECT_EQ(one.totals, many.totals);
  ASSERT_EQ(one.witnesses.size(), many.witnesses.size());
  for (std::size_t i = 0; i < one.witnesses.size(); ++i) EXPECT_EQ(one.witnesses[i].degree, many.witnesses[i].degree);
}

TEST(VerifyVanishing, InRangeImpliesVanishing) {
  testutil::Gen g(44);
  for (int trial = 0; trial < 25; ++trial) {
    auto c = fixtures::random_flip(g, 4, 3, 3);
    auto t = fans_of(c);
    IntVec k = fixtures::random_in_range(g, c), kp = fixtures::random_in_range(g, c);
    for (Side side : {Side::X, Side::Y}) {
      const auto& fan = side == Side::X ? t.x : t.y;
      auto rep = verify_vanishing(fan, rounded_hom_sheaf(kp, k, side, c), 10);
      EXPECT_TRUE(rep.vanishing());
    }
  }
  for (int trial = 0; trial < 25; ++trial) {
    auto c = fixtures::random_contraction(g, 3);
    auto x = fans_of(c).x;
    IntVec k = g.ivec(c.n, -4, 4), kp = g.ivec(c.n, -4, 4);
    EXPECT_TRUE(verify_vanishing(x, rounded_hom_sheaf(kp, k, Side::X, c), 16).vanishing());
  }
  for (int trial = 0; trial < 25; ++trial) {
    auto c = fixtures::random_inverse(g);
    auto x = fans_of(c).x;
    IntVec k = fixtures::random_in_range(g, c), kp = fixtures::random_in_range(g, c);
    EXPECT_TRUE(verify_vanishing(x, rounded_hom_sheaf(kp, k, Side::X, c), 16).vanishing());
  }
}
