#pragma once

#include <string>
#include <utility>
#include <vector>

#include "toricdk/cone.hpp"
#include "toricdk/error.hpp"
#include "toricdk/scan.hpp"
#include "toricdk/stacky.hpp"

namespace toricdk {

/// Image of a monomial line bundle. Directions per case: Y -> X in cases
/// 1-3, X -> Y in case 4 (the blowup side is the source there).
struct FmResult {
  MonomialLineBundle target;
  std::vector<RatVec> chart_generators;
  bool in_range = true;
  std::vector<std::pair<std::string, Rat>> certificate;
  Rat w_coefficient = 0;  // flip only: coefficient of the new ray on W
};

inline void require_case(const BirationalConfig& c, std::initializer_list<Case> ok, const char* op) {
  for (auto k : ok)
    if (c.kind == k) return;
  throw Error(ErrorCode::ConfigMismatch, std::string(op) + " does not apply to case " + to_string(c.kind));
}

inline void require_length(const IntVec& k, std::size_t want, const char* what) {
  if (k.size() != want)
    throw Error(ErrorCode::BadInput, std::string(what) + " needs " + std::to_string(want) + " exponents, got " + std::to_string(k.size()));
}

/// Case 1: m = sum m_i/s_i v_i^* goes to sum ceil(m_i r_i / s_i)/r_i v_i^*.
inline FmResult fm_case1(const IntVec& m, const BirationalConfig& c) {
  require_case(c, {Case::Reweight}, "fm_case1");
  require_length(m, c.n, "bundle");
  FmResult out;
  RatVec g(c.n);
  for (std::size_t i = 0; i < c.n; ++i) {
    out.target.k.push_back(ceil_div(m[i] * c.r[i], c.s[i]));
    g[i] = make_rat(out.target.k.back(), c.r[i]);
  }
  out.chart_generators.push_back(std::move(g));
  return out;
}

inline bool ceiling_identity_check(const Int& r, const Int& s, const Int& m, const Int& mp) {
  Int lhs = ceil_div(m - mp, s);
  Int rhs = ceil_div(ceil_div(m * r, s) - ceil_div(mp * r, s), r);
  return lhs == rhs;
}

inline bool ceiling_identity_check(const IntVec& r, const IntVec& s, const IntVec& m, const IntVec& mp) {
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!ceiling_identity_check(r[i], s[i], m[i], mp[i])) return false;
  return true;
}

inline Int case2_exceptional(const IntVec& k, const BirationalConfig& c) {
  Rat s = 0;
  for (std::size_t i = 0; i < c.n; ++i) s += make_rat(c.a[i] * k[i], c.r[i]);
  return ceil_of(s * c.r[c.n]);
}

/// Case 2: L on Y (k_1..k_n) to F(L) on X with k_{n+1} added.
inline FmResult fm_case2(const IntVec& k, const BirationalConfig& c) {
  require_case(c, {Case::Contraction}, "fm_case2");
  require_length(k, c.n, "bundle");
  auto crep = crepancy_compare(c);
  if (crep.value < 0)
    throw Error(ErrorCode::CrepancyViolation, "sum a_i/r_i = " + to_pq(crep.value) + " is negative");
  const std::size_t n = c.n;
  FmResult out;
  const Int kx = case2_exceptional(k, c);
  out.target.k = k;
  out.target.k.push_back(kx);
  for (std::size_t i0 = 0; i0 < c.n1; ++i0) {
    RatVec g(n, 0);
    Rat coeff = make_rat(kx, c.a[i0] * c.r[n]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == i0) continue;
      g[i] = make_rat(k[i], c.r[i]);
      coeff -= make_rat(c.a[i] * k[i], c.a[i0] * c.r[i]);
    }
    g[i0] = coeff;
    out.chart_generators.push_back(std::move(g));
  }
  out.certificate.emplace_back("crepancy", crep.value);
  return out;
}

struct RangeResult {
  bool in_range;
  Rat statistic;  // sum a_i k_i / r_i (flip) or its negative (inverse contraction)
  Rat bound;
};

inline Rat range_bound(const BirationalConfig& c) {
  Rat b = 0;
  if (c.kind == Case::Flip) {
    for (std::size_t i = c.n2; i <= c.n; ++i) b -= make_rat(c.a_full(i), c.r[i]);
  } else {
    for (std::size_t i = 0; i < c.n; ++i) b += make_rat(c.a[i], c.r[i]);
  }
  return b;
}

inline Rat range_statistic(const IntVec& k, const BirationalConfig& c) {
  Rat s = 0;
  for (std::size_t i = 0; i <= c.n; ++i) s += make_rat(c.a_full(i) * k[i], c.r[i]);
  return c.kind == Case::Flip ? s : Rat(-s);
}

inline RangeResult range_check(const IntVec& k, const BirationalConfig& c) {
  require_case(c, {Case::Flip, Case::InverseContraction}, "range_check");
  require_length(k, c.n + 1, "bundle");
  RangeResult r{false, range_statistic(k, c), range_bound(c)};
  r.in_range = 0 <= r.statistic && r.statistic < r.bound;
  return r;
}

/// Generator on chart sigma_{i0} of O(sum k_i/r_i D_i): <g, v_i> = -k_i/r_i for
/// every ray of the chart.
inline RatVec chart_generator(const StackyFan& fan, std::size_t cone, const IntVec& k) {
  RatMatrix v;
  RatVec rhs;
  for (auto i : fan.cones[cone]) {
    v.push_back(to_ratvec(fan.rays[i]));
    rhs.push_back(make_rat(-k[i], fan.mults[i]));
  }
  return *solve(v, rhs);
}

/// Case 3: L on Y to F(L) on X with the same exponents, inside the window.
inline FmResult fm_case3(const IntVec& k, const BirationalConfig& c) {
  require_case(c, {Case::Flip}, "fm_case3");
  auto rr = range_check(k, c);
  auto crep = crepancy_compare(c);
  if (crep.value < 0)
    throw Error(ErrorCode::CrepancyViolation, "sum a_i/r_i = " + to_pq(crep.value) + " is negative");
  if (!rr.in_range)
    throw Error(ErrorCode::OutOfRange, "range statistic " + to_pq(rr.statistic) + " outside [0, " + to_pq(rr.bound) + ")",
                {{"statistic", to_pq(rr.statistic)}, {"bound", to_pq(rr.bound)}});
  FmResult out;
  out.target.k = k;
  auto x = fans_of(c).x;
  for (std::size_t i0 = 0; i0 < x.cones.size(); ++i0) out.chart_generators.push_back(chart_generator(x, i0, k));
  Rat w = 0;
  for (std::size_t i = 0; i < c.n1; ++i) w += make_rat(c.a[i] * k[i], c.r[i]);
  out.w_coefficient = c.lambda * w;
  out.certificate = {{"statistic", rr.statistic}, {"bound", rr.bound}};
  return out;
}

/// Case 4: L on X (k_1..k_{n+1}) to F(L) on Y, dropping the exceptional exponent.
inline FmResult fm_case4(const IntVec& k, const BirationalConfig& c) {
  require_case(c, {Case::InverseContraction}, "fm_case4");
  auto rr = range_check(k, c);
  if (!rr.in_range)
    throw Error(ErrorCode::OutOfRange, "range statistic " + to_pq(rr.statistic) + " outside [0, " + to_pq(rr.bound) + ")",
                {{"statistic", to_pq(rr.statistic)}, {"bound", to_pq(rr.bound)}});
  FmResult out;
  out.target.k.assign(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(c.n));
  auto y = fans_of(c).y;
  out.chart_generators.push_back(chart_generator(y, 0, out.target.k));
  out.certificate = {{"statistic", rr.statistic}, {"bound", rr.bound}};
  return out;
}

inline FmResult apply_fm(const IntVec& k, const BirationalConfig& c) {
  switch (c.kind) {
    case Case::Reweight: return fm_case1(k, c);
    case Case::Contraction: return fm_case2(k, c);
    case Case::Flip: return fm_case3(k, c);
    case Case::InverseContraction: return fm_case4(k, c);
  }
  throw Error(ErrorCode::ConfigMismatch, "unknown case");
}

enum class HomVerdict { Bijective, InjectiveOnly, Mismatch };

inline std::string to_string(HomVerdict v) {
  switch (v) {
    case HomVerdict::Bijective: return "Bijective";
    case HomVerdict::InjectiveOnly: return "InjectiveOnly";
    case HomVerdict::Mismatch: return "Mismatch";
  }
  return "?";
}

struct GradedRow {
  std::vector<std::int64_t> degree;
  int dim_src, dim_tgt;
};

struct GradedHomReport {
  std::int64_t box = 0;
  HomVerdict verdict = HomVerdict::Bijective;
  std::int64_t source_count = 0, target_count = 0;
  std::vector<std::vector<std::int64_t>> mismatches;  // capped
  std::vector<GradedRow> table;                       // only when requested
  bool in_range = true;
};

/// Degrees of Hom(L', L) as half-spaces, for a side given by rays, mults and
/// the exponent difference, in the monomial (ceiling) or divisor (floor)
/// convention.
inline std::vector<IntConstraint> hom_constraints(const std::vector<IntVec>& rays, const IntVec& mults,
                                                  const IntVec& diff, bool monomial) {
  std::vector<IntConstraint> out;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    Rat q = make_rat(diff[i], mults[i]);
    out.push_back(int_constraint(rays[i], monomial ? q : Rat(-q)));
  }
  return out;
}

inline std::int64_t default_hom_box(const BirationalConfig& c, const IntVec& k, const IntVec& kp) {
  Int rmax = 1, kmax = 0;
  for (const auto& r : c.r) rmax = std::max(rmax, r);
  for (const auto& x : k) kmax = std::max(kmax, Int(abs(x)));
  for (const auto& x : kp) kmax = std::max(kmax, Int(abs(x)));
  return to_i64(8 * rmax * (kmax + 1));
}

/// Compares Hom(L', L) with Hom(F(L'), F(L)) degree by degree in [-box, box]^n.
inline GradedHomReport hom_graded_compare(const IntVec& kp, const IntVec& k, const BirationalConfig& c,
                                          std::int64_t box = 0, std::size_t workers = 1, bool keep_table = false) {
  const std::size_t n = c.n;
  std::vector<IntConstraint> src, tgt;
  GradedHomReport rep;
  if (box <= 0) box = default_hom_box(c, k, kp);
  rep.box = box;
  auto diff = [](const IntVec& a, const IntVec& b) {
    IntVec d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
  };
  auto ts = fans_of(c);
  switch (c.kind) {
    case Case::Reweight: {
      require_length(k, n, "bundle");
      require_length(kp, n, "bundle");
      src = hom_constraints(ts.y.rays, c.s, diff(k, kp), true);
      auto f = fm_case1(k, c), fp = fm_case1(kp, c);
      tgt = hom_constraints(ts.x.rays, c.r, diff(f.target.k, fp.target.k), true);
      break;
    }
    case Case::Contraction: {
      require_length(k, n, "bundle");
      require_length(kp, n, "bundle");
      src = hom_constraints(ts.y.rays, ts.y.mults, diff(k, kp), true);
      auto f = fm_case2(k, c), fp = fm_case2(kp, c);
      tgt = hom_constraints(ts.x.rays, ts.x.mults, diff(f.target.k, fp.target.k), true);
      break;
    }
    case Case::Flip: {
      require_length(k, n + 1, "bundle");
      require_length(kp, n + 1, "bundle");
      rep.in_range = range_check(k, c).in_range && range_check(kp, c).in_range;
      src = hom_constraints(ts.y.rays, ts.y.mults, diff(k, kp), false);
      tgt = hom_constraints(ts.x.rays, ts.x.mults, diff(k, kp), false);
      break;
    }
    case Case::InverseContraction: {
      require_length(k, n + 1, "bundle");
      require_length(kp, n + 1, "bundle");
      rep.in_range = range_check(k, c).in_range && range_check(kp, c).in_range;
      src = hom_constraints(ts.x.rays, ts.x.mults, diff(k, kp), false);
      IntVec dy = diff(k, kp);
      dy.resize(n);
      tgt = hom_constraints(ts.y.rays, ts.y.mults, dy, false);
      break;
    }
  }

  struct Chunk {
    std::int64_t src = 0, tgt = 0;
    bool src_only = false, tgt_only = false;
    std::vector<std::vector<std::int64_t>> mismatches;
    std::vector<GradedRow> table;
  };
  constexpr std::size_t cap = 20;
  auto work = [&](std::int64_t lo, std::int64_t hi) {
    Chunk ch;
    for_each_prefix(n, box, lo, hi, [&](const std::vector<std::int64_t>& p) {
      Interval a = last_coord_interval(src, p, box), b = last_coord_interval(tgt, p, box);
      ch.src += a.size();
      ch.tgt += b.size();
      auto in = [](const Interval& iv, std::int64_t t) { return !iv.empty() && iv.lo <= t && t <= iv.hi; };
      const bool same = (a.empty() && b.empty()) || (!a.empty() && !b.empty() && a.lo == b.lo && a.hi == b.hi);
      if (!same || keep_table) {
        std::int64_t from = -box, to = box;
        if (!keep_table) {
          from = std::min(a.empty() ? box : a.lo, b.empty() ? box : b.lo);
          to = std::max(a.empty() ? -box : a.hi, b.empty() ? -box : b.hi);
        }
        for (std::int64_t t = from; t <= to; ++t) {
          const int ds = in(a, t), dt = in(b, t);
          std::vector<std::int64_t> deg = p;
          deg.push_back(t);
          if (ds && !dt) ch.src_only = true;
          if (dt && !ds) ch.tgt_only = true;
          if (ds != dt && ch.mismatches.size() < cap) ch.mismatches.push_back(deg);
          if (keep_table) ch.table.push_back({std::move(deg), ds, dt});
        }
      }
    });
    return ch;
  };
  const std::size_t w = n <= 1 ? 1 : workers;
  auto chunks = parallel_first_coord<Chunk>(n <= 1 ? 0 : box, w, work);
  bool src_only = false, tgt_only = false;
  for (auto& ch : chunks) {
    rep.source_count += ch.src;
    rep.target_count += ch.tgt;
    src_only = src_only || ch.src_only;
    tgt_only = tgt_only || ch.tgt_only;
    for (auto& m : ch.mismatches)
      if (rep.mismatches.size() < cap) rep.mismatches.push_back(std::move(m));
    for (auto& r : ch.table) rep.table.push_back(std::move(r));
  }
  if (src_only) rep.verdict = HomVerdict::Mismatch;
  else if (tgt_only) rep.verdict = HomVerdict::InjectiveOnly;
  else rep.verdict = HomVerdict::Bijective;
  return rep;
}

struct StratumCheck {
  bool ok;
  std::size_t i0;          // ray whose exponent was renormalized
  IntVec k;                // exponents after renormalization
  Rat statistic, bound;
  std::size_t eps_checked;
};

/// Koszul-twist arithmetic on a stratum of rays among the negative ones
/// (0-based indices in [n'', n]). The exponent of the first admissible ray
/// i0 outside the stratum is shifted so that 0 <= statistic < -a_i0/r_i0;
/// then every twist by eps in {0,1}^t (or only `eps` if given) must stay in
/// the window.
inline StratumCheck stratum_twist_range_check(const BirationalConfig& c, const std::vector<std::size_t>& stratum,
                                              IntVec k, const std::vector<int>* eps = nullptr) {
  require_case(c, {Case::Flip}, "stratum_twist_range_check");
  require_length(k, c.n + 1, "bundle");
  for (std::size_t p = 0; p < stratum.size(); ++p) {
    if (stratum[p] < c.n2 || stratum[p] > c.n)
      throw Error(ErrorCode::BadStratum, "stratum ray " + std::to_string(stratum[p] + 1) + " is not a negative ray");
    for (std::size_t q = 0; q < p; ++q)
      if (stratum[q] == stratum[p]) throw Error(ErrorCode::BadStratum, "repeated stratum ray");
  }
  if (stratum.size() > c.n - c.n2) throw Error(ErrorCode::BadStratum, "stratum too large");
  if (eps && eps->size() != stratum.size()) throw Error(ErrorCode::BadStratum, "eps length differs from stratum size");
  std::size_t i0 = c.n2;
  while (std::find(stratum.begin(), stratum.end(), i0) != stratum.end()) ++i0;
  const Rat step = make_rat(-c.a_full(i0), c.r[i0]);  // statistic drops by step per unit of k_i0
  Rat stat = range_statistic(k, c);
  const Int t = floor_of(stat / step);
  k[i0] += t;
  stat -= step * t;
  StratumCheck out{true, i0, k, stat, range_bound(c), 0};
  const std::size_t count = std::size_t(1) << stratum.size();
  for (std::size_t mask = 0; mask < count; ++mask) {
    std::vector<int> e(stratum.size());
    for (std::size_t p = 0; p < stratum.size(); ++p) e[p] = (mask >> p) & 1;
    if (eps && e != *eps) continue;
    Rat twisted = stat;
    for (std::size_t p = 0; p < stratum.size(); ++p) twisted -= make_rat(c.a_full(stratum[p]) * e[p], c.r[stratum[p]]);
    ++out.eps_checked;
    if (!(0 <= twisted && twisted < out.bound)) out.ok = false;
  }
  return out;
}

}  // namespace toricdk
