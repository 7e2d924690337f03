#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "toricdk/fm.hpp"
#include "toricdk/scan.hpp"
#include "toricdk/stacky.hpp"

namespace toricdk {

/// Coarse divisor coefficients of the reflexive Hom sheaf: -ceil(d_i/r_i) in
/// the monomial convention, floor(d_i/r_i) in the divisor convention.
inline IntVec rounded_divisor(const IntVec& diff, const IntVec& mults, bool monomial) {
  IntVec out(diff.size());
  for (std::size_t i = 0; i < diff.size(); ++i)
    out[i] = monomial ? Int(-ceil_div(diff[i], mults[i])) : floor_div(diff[i], mults[i]);
  return out;
}

/// Hom(L', L) on the given side of the configuration, as an integer divisor
/// on that side's coarse space. Exponents are those of the functor's source;
/// the other side is reached through the functor.
inline IntVec rounded_hom_sheaf(const IntVec& kp, const IntVec& k, Side side, const BirationalConfig& c) {
  auto diff = [](const IntVec& a, const IntVec& b) {
    IntVec d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
  };
  auto t = fans_of(c);
  switch (c.kind) {
    case Case::Reweight:
      if (side == Side::Y) return rounded_divisor(diff(k, kp), c.s, true);
      return rounded_divisor(diff(fm_case1(k, c).target.k, fm_case1(kp, c).target.k), c.r, true);
    case Case::Contraction:
      if (side == Side::Y) return rounded_divisor(diff(k, kp), t.y.mults, true);
      return rounded_divisor(diff(fm_case2(k, c).target.k, fm_case2(kp, c).target.k), t.x.mults, true);
    case Case::Flip:
      return rounded_divisor(diff(k, kp), c.r, false);
    case Case::InverseContraction: {
      IntVec d = diff(k, kp);
      if (side == Side::X) return rounded_divisor(d, t.x.mults, false);
      d.resize(c.n);
      return rounded_divisor(d, t.y.mults, false);
    }
  }
  return {};
}

/// Cech complex of a torus-invariant divisor on the cover by maximal cones.
/// The graded piece in degree m only depends on which rays satisfy
/// <m, v_i> >= -c_i, so cohomology is cached per such pattern.
class CechComplex {
 public:
  explicit CechComplex(const StackyFan& fan) : fan_(fan) {
    if (fan.rays.size() > 63 || fan.cones.size() > 20) throw Error(ErrorCode::BadInput, "fan too large for the Cech scanner");
    for (const auto& cone : fan.cones) {
      std::uint64_t mask = 0;
      for (auto i : cone) mask |= std::uint64_t(1) << i;
      cone_mask_.push_back(mask);
    }
    const std::size_t nc = fan.cones.size();
    by_size_.assign(nc + 1, {});
    for (std::uint32_t s = 1; s < (std::uint32_t(1) << nc); ++s) {
      std::uint64_t face = ~std::uint64_t(0);
      for (std::size_t j = 0; j < nc; ++j)
        if (s >> j & 1) face &= cone_mask_[j];
      face_of_[s] = face;
      by_size_[static_cast<std::size_t>(__builtin_popcount(s))].push_back(s);
    }
  }

  std::size_t max_p() const { return fan_.cones.size() - 1; }

  /// dim H^p for p = 0..#cones-1, given the set of rays whose condition holds.
  const std::vector<std::int64_t>& dims(std::uint64_t pattern) {
    auto it = cache_.find(pattern);
    if (it != cache_.end()) return it->second;
    const std::size_t nc = fan_.cones.size();
    // present[p]: subsets of size p+1 whose face term is nonzero
    std::vector<std::vector<std::uint32_t>> present(nc);
    for (std::size_t p = 0; p < nc; ++p)
      for (auto s : by_size_[p + 1])
        if ((face_of_.at(s) & ~pattern) == 0) present[p].push_back(s);
    std::vector<std::int64_t> rk(nc, 0);  // rank of d^p : C^p -> C^{p+1}
    for (std::size_t p = 0; p + 1 < nc; ++p) {
      if (present[p].empty() || present[p + 1].empty()) continue;
      RatMatrix d(present[p + 1].size(), RatVec(present[p].size(), 0));
      for (std::size_t col = 0; col < present[p].size(); ++col) {
        const auto s = present[p][col];
        for (std::size_t row = 0; row < present[p + 1].size(); ++row) {
          const auto t = present[p + 1][row];
          if ((s & t) != s) continue;
          const std::uint32_t extra = t & ~s;
          const int pos = __builtin_popcount(t & (extra - 1));
          d[row][col] = pos % 2 ? -1 : 1;
        }
      }
      rk[p] = static_cast<std::int64_t>(rank(d));
    }
    std::vector<std::int64_t> out(nc, 0);
    for (std::size_t p = 0; p < nc; ++p)
      out[p] = static_cast<std::int64_t>(present[p].size()) - rk[p] - (p > 0 ? rk[p - 1] : 0);
    return cache_.emplace(pattern, std::move(out)).first->second;
  }

  /// Alternating count of nonzero Cech terms.
  std::int64_t euler_terms(std::uint64_t pattern) const {
    std::int64_t e = 0;
    for (std::size_t p = 0; p + 1 < by_size_.size(); ++p)
      for (auto s : by_size_[p + 1])
        if ((face_of_.at(s) & ~pattern) == 0) e += p % 2 ? -1 : 1;
    return e;
  }

  std::uint64_t pattern(const IntVec& d, const IntVec& m) const {
    std::uint64_t pat = 0;
    for (std::size_t i = 0; i < fan_.rays.size(); ++i)
      if (dot(m, fan_.rays[i]) >= -d[i]) pat |= std::uint64_t(1) << i;
    return pat;
  }

 private:
  const StackyFan& fan_;
  std::vector<std::uint64_t> cone_mask_;
  std::map<std::uint32_t, std::uint64_t> face_of_;
  std::vector<std::vector<std::uint32_t>> by_size_;
  std::map<std::uint64_t, std::vector<std::int64_t>> cache_;
};

/// dim H^p(X, O(D))_m for every p.
inline std::vector<std::int64_t> cech_graded_dim(const StackyFan& fan, const IntVec& d, const IntVec& m) {
  CechComplex cx(fan);
  return cx.dims(cx.pattern(d, m));
}

struct CechWitness {
  std::vector<std::int64_t> degree;
  std::size_t p;
  std::int64_t dim;
};

struct CechReport {
  IntVec divisor;
  std::int64_t box = 0;
  std::vector<std::int64_t> totals;  // per p, summed over the box
  std::vector<CechWitness> witnesses;  // p >= p_min, capped, in scan order
  std::size_t p_min = 1;
  bool vanishing() const { return witnesses.empty(); }
};

/// Scans all degrees in [-box, box]^n. An empty witness list means no
/// cohomology in degrees p >= p_min was found inside the box.
inline CechReport verify_vanishing(const StackyFan& fan, const IntVec& d, std::int64_t box = 48, std::size_t p_min = 1,
                                   std::size_t workers = 1, std::size_t cap = 20) {
  const std::size_t n = fan.n, nr = fan.rays.size();
  if (d.size() != nr) throw Error(ErrorCode::BadInput, "divisor length differs from ray count");
  std::vector<IntConstraint> cons;
  for (std::size_t i = 0; i < nr; ++i) cons.push_back(int_constraint(fan.rays[i], Rat(-d[i])));
  struct Chunk {
    std::vector<std::int64_t> totals;
    std::vector<CechWitness> witnesses;
  };
  const std::size_t np = fan.cones.size();
  auto work = [&](std::int64_t lo, std::int64_t hi) {
    Chunk ch;
    ch.totals.assign(np, 0);
    CechComplex cx(fan);
    std::vector<std::int64_t> cuts;
    for_each_prefix(n, box, lo, hi, [&](const std::vector<std::int64_t>& pre) {
      // Breakpoints along the last coordinate where some ray condition flips.
      cuts.assign({-box, box + 1});
      std::vector<std::int64_t> partial(nr, 0);
      for (std::size_t i = 0; i < nr; ++i) {
        const auto& k = cons[i];
        for (std::size_t j = 0; j + 1 < n; ++j) partial[i] += k.w[j] * pre[j];
        const std::int64_t wl = k.w[n - 1];
        if (wl == 0) continue;
        // condition: wl * t >= k.c - partial; flips between floor/ceil of the ratio
        const std::int64_t need = k.c - partial[i];
        std::int64_t edge = wl > 0 ? cdiv(need, wl) : fdiv(need, wl) + 1;
        if (edge > -box && edge <= box) cuts.push_back(edge);
      }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const std::int64_t t0 = cuts[s], len = cuts[s + 1] - cuts[s];
        std::uint64_t pat = 0;
        for (std::size_t i = 0; i < nr; ++i)
          if (partial[i] + cons[i].w[n - 1] * t0 >= cons[i].c) pat |= std::uint64_t(1) << i;
        const auto& dm = cx.dims(pat);
        for (std::size_t p = 0; p < np; ++p) {
          if (dm[p] == 0) continue;
          ch.totals[p] += dm[p] * len;
          if (p < p_min) continue;
          for (std::int64_t t = t0; t < t0 + len && ch.witnesses.size() < cap; ++t) {
            std::vector<std::int64_t> deg = pre;
            deg.push_back(t);
            ch.witnesses.push_back({std::move(deg), p, dm[p]});
          }
        }
      }
    });
    return ch;
  };
  auto chunks = parallel_first_coord<Chunk>(n <= 1 ? 0 : box, n <= 1 ? 1 : workers, work);
  CechReport rep;
  rep.divisor = d;
  rep.box = box;
  rep.p_min = p_min;
  rep.totals.assign(np, 0);
  for (auto& ch : chunks) {
    for (std::size_t p = 0; p < np; ++p) rep.totals[p] += ch.totals[p];
    for (auto& w : ch.witnesses)
      if (rep.witnesses.size() < cap) rep.witnesses.push_back(std::move(w));
  }
  return rep;
}

}  // namespace toricdk
