#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "toricdk/cone.hpp"
#include "toricdk/error.hpp"
#include "toricdk/lattice.hpp"
#include "toricdk/rational.hpp"

namespace toricdk {

using QDivisor = RatVec;  // coefficient per ray index

struct MonomialLineBundle {
  IntVec k;
  bool operator==(const MonomialLineBundle& o) const { return k == o.k; }
  bool operator<(const MonomialLineBundle& o) const { return k < o.k; }
};

/// Simplicial fan with ray multiplicities. Chart lattices default to the
/// span of r_i v_i over the cone; `chart_override` replaces them where a
/// chart is a fibre product of other charts.
struct StackyFan {
  std::size_t n = 0;
  std::vector<IntVec> rays;
  IntVec mults;
  std::vector<std::vector<std::size_t>> cones;
  std::vector<std::optional<Lattice>> chart_override;
  Lattice ambient;  // N

  std::vector<IntVec> cone_rays(std::size_t c) const {
    std::vector<IntVec> out;
    for (auto i : cones[c]) out.push_back(rays[i]);
    return out;
  }

  Lattice chart_lattice(std::size_t c) const {
    if (c < chart_override.size() && chart_override[c]) return *chart_override[c];
    std::vector<IntVec> gens;
    for (auto i : cones[c]) {
      IntVec v = rays[i];
      for (auto& x : v) x *= mults[i];
      gens.push_back(std::move(v));
    }
    return Lattice::from_int(gens, n);
  }

  Lattice chart_dual(std::size_t c) const { return dual_lattice(chart_lattice(c)); }

  /// Coarse lattice of monomials.
  Lattice monomials() const { return dual_lattice(ambient); }
};

namespace detail {

// Whether two simplicial cones (as ray index lists) meet in a common face.
// A bad overlap is a nonzero relation z on the union of rays with z >= 0 on
// rays only in `a` and z <= 0 on rays only in `b`.
inline bool cones_meet_in_face(const StackyFan& fan, const std::vector<std::size_t>& a,
                               const std::vector<std::size_t>& b) {
  std::vector<std::size_t> uni = a;
  for (auto i : b)
    if (std::find(a.begin(), a.end(), i) == a.end()) uni.push_back(i);
  const std::size_t u = uni.size();
  RatMatrix m(fan.n, RatVec(u));
  for (std::size_t j = 0; j < u; ++j)
    for (std::size_t i = 0; i < fan.n; ++i) m[i][j] = fan.rays[uni[j]][i];
  RatMatrix ker = kernel(m, u);
  const std::size_t d = ker.size();
  if (d == 0) return true;
  // Constraints on t (z = t * ker): rows c with c.t >= 0; normalization e.t = 1.
  RatMatrix cons;
  RatVec norm(d, 0);
  for (std::size_t j = 0; j < u; ++j) {
    const bool in_a = std::find(a.begin(), a.end(), uni[j]) != a.end();
    const bool in_b = std::find(b.begin(), b.end(), uni[j]) != b.end();
    if (in_a && in_b) continue;
    RatVec c(d);
    for (std::size_t k = 0; k < d; ++k) c[k] = in_a ? ker[k][j] : -ker[k][j];
    for (std::size_t k = 0; k < d; ++k) norm[k] += c[k];
    cons.push_back(std::move(c));
  }
  // Vertex enumeration: d-1 tight constraints plus the normalization.
  std::vector<bool> pick(cons.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(std::min(d - 1, cons.size())), true);
  if (d - 1 > cons.size()) return true;
  do {
    RatMatrix sys;
    RatVec rhs;
    for (std::size_t i = 0; i < cons.size(); ++i)
      if (pick[i]) {
        sys.push_back(cons[i]);
        rhs.push_back(0);
      }
    sys.push_back(norm);
    rhs.push_back(1);
    auto t = solve(sys, rhs);
    if (!t) continue;
    bool feasible = true;
    for (const auto& c : cons) feasible = feasible && dot(c, *t) >= 0;
    if (feasible) return false;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return true;
}

}  // namespace detail

inline void validate_fan(const StackyFan& fan) {
  if (fan.mults.size() != fan.rays.size()) throw Error(ErrorCode::BadInput, "one multiplicity per ray required");
  for (std::size_t i = 0; i < fan.rays.size(); ++i) {
    if (fan.rays[i].size() != fan.n) throw Error(ErrorCode::RankMismatch, "ray " + std::to_string(i) + " has wrong length");
    if (!is_primitive(fan.rays[i])) throw Error(ErrorCode::NotPrimitive, "ray " + std::to_string(i) + " is not primitive");
    if (fan.mults[i] <= 0) throw Error(ErrorCode::BadInput, "multiplicity must be positive");
  }
  for (std::size_t c = 0; c < fan.cones.size(); ++c) {
    for (auto i : fan.cones[c])
      if (i >= fan.rays.size()) throw Error(ErrorCode::BadInput, "cone refers to unknown ray");
    if (fan.cones[c].size() != fan.n || rank(to_ratmatrix(fan.cone_rays(c))) != fan.n)
      throw Error(ErrorCode::NotFullRank, "cone " + std::to_string(c) + " is not simplicial and full-dimensional");
  }
  for (std::size_t c = 0; c < fan.cones.size(); ++c)
    for (std::size_t d = c + 1; d < fan.cones.size(); ++d)
      if (!detail::cones_meet_in_face(fan, fan.cones[c], fan.cones[d]))
        throw Error(ErrorCode::ValidationError, "cones " + std::to_string(c) + " and " + std::to_string(d) + " overlap");
}

enum class Case { Reweight = 1, Contraction = 2, Flip = 3, InverseContraction = 4 };

inline std::string to_string(Case c) {
  switch (c) {
    case Case::Reweight: return "Reweight";
    case Case::Contraction: return "Contraction";
    case Case::Flip: return "Flip";
    case Case::InverseContraction: return "InverseContraction";
  }
  return "?";
}

/// One of the four toroidal configurations. Indices are 0-based: rays
/// 0..n-1 are e_i, ray n is (a_1..a_n), ray n+1 (flip only) is v_{n+2}.
struct BirationalConfig {
  Case kind = Case::Reweight;
  std::size_t n = 0, n1 = 0, n2 = 0;  // n', n''
  IntVec a;                           // length n
  IntVec r;                           // length n (Reweight) or n+1
  IntVec s;                           // Reweight only
  Rat lambda = 1;                     // Flip only
  IntVec v_extra;                     // Flip only: v_{n+2}

  /// a_i with a_{n+1} = -1 appended.
  Int a_full(std::size_t i) const { return i < n ? a[i] : Int(-1); }

  IntVec ray(std::size_t i) const {
    if (i < n) {
      IntVec e(n, 0);
      e[i] = 1;
      return e;
    }
    if (i == n) return a;
    return v_extra;
  }

  std::size_t num_rays() const { return kind == Case::Reweight ? n : n + 1; }
};

struct Case4Bound {
  Rat lhs;              // sum_{i<=n} a_i / r_i
  Rat bound;            // 1 / r_{n+1}
  Rat literal_bound;    // 1 / r_n, as printed in the source statement
  bool accepted;        // lhs <= bound
  bool literal_accepted;
};

inline Case4Bound case4_bound(const BirationalConfig& c) {
  Case4Bound b;
  b.lhs = 0;
  for (std::size_t i = 0; i < c.n; ++i) b.lhs += make_rat(c.a[i], c.r[i]);
  b.bound = make_rat(1, c.r[c.n]);
  b.literal_bound = make_rat(1, c.r[c.n - 1]);
  b.accepted = b.lhs <= b.bound;
  b.literal_accepted = b.lhs <= b.literal_bound;
  return b;
}

inline BirationalConfig build_config(Case kind, std::size_t n, std::size_t n1, std::size_t n2, IntVec a, IntVec r,
                                     IntVec s = {}) {
  BirationalConfig c;
  c.kind = kind;
  c.n = n;
  c.n1 = n1;
  c.n2 = n2;
  if (n == 0) throw Error(ErrorCode::BadInput, "ambient rank must be positive");
  for (const auto& x : r)
    if (x <= 0) throw Error(ErrorCode::BadInput, "multiplicities must be positive");
  if (kind == Case::Reweight) {
    if (r.size() != n || s.size() != n) throw Error(ErrorCode::BadInput, "r and s need length n");
    for (std::size_t i = 0; i < n; ++i)
      if (s[i] < 1 || r[i] < s[i]) throw Error(ErrorCode::BadRange, "need r_i >= s_i >= 1");
    c.r = std::move(r);
    c.s = std::move(s);
    return c;
  }
  if (a.size() != n) throw Error(ErrorCode::BadInput, "a needs length n");
  if (r.size() != n + 1) throw Error(ErrorCode::BadInput, "r needs length n+1");
  if (!s.empty()) throw Error(ErrorCode::BadInput, "s only applies to the reweight case");
  if (kind == Case::Flip) {
    if (n1 < 2 || n2 >= n) throw Error(ErrorCode::InvalidSigns, "flip needs 2 <= n' and n'' < n");
    if (n2 < n1) throw Error(ErrorCode::BadRange, "need n' <= n''");
    for (std::size_t i = 0; i < n; ++i) {
      const int want = i < n1 ? 1 : (i < n2 ? 0 : -1);
      if (sgn(a[i]) != want) throw Error(ErrorCode::InvalidSigns, "a_" + std::to_string(i + 1) + " has the wrong sign");
    }
  } else {
    if (n1 < 2) throw Error(ErrorCode::BadRange, "need n' >= 2");
    if (n1 > n) throw Error(ErrorCode::BadRange, "need n' <= n");
    for (std::size_t i = 0; i < n; ++i) {
      const int want = i < n1 ? 1 : 0;
      if (sgn(a[i]) != want) throw Error(ErrorCode::InvalidSigns, "a_" + std::to_string(i + 1) + " has the wrong sign");
    }
    c.n2 = n1;
  }
  if (!is_primitive(a)) throw Error(ErrorCode::NotPrimitive, "v_{n+1} is not primitive");
  c.a = std::move(a);
  c.r = std::move(r);
  if (kind == Case::Flip) {
    Int g = 0;
    for (std::size_t i = 0; i < n1; ++i) g = gcd(g, c.a[i]);
    c.lambda = make_rat(1, g);
    c.v_extra.assign(n, 0);
    for (std::size_t i = 0; i < n1; ++i) c.v_extra[i] = c.a[i] / g;
  }
  if (kind == Case::InverseContraction) {
    auto b = case4_bound(c);
    if (!b.accepted)
      throw Error(ErrorCode::CrepancyViolation,
                  "sum a_i/r_i = " + to_pq(b.lhs) + " exceeds 1/r_{n+1} = " + to_pq(b.bound),
                  {{"lhs", to_pq(b.lhs)}, {"bound_r_exceptional", to_pq(b.bound)}, {"bound_r_n", to_pq(b.literal_bound)}});
  }
  return c;
}

struct FanTriple {
  StackyFan x, y, w;
};

inline std::vector<std::size_t> all_but(std::size_t count, std::initializer_list<std::size_t> skip) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; ++i)
    if (std::find(skip.begin(), skip.end(), i) == skip.end()) out.push_back(i);
  return out;
}

inline FanTriple fans_of(const BirationalConfig& c) {
  const std::size_t n = c.n;
  FanTriple t;
  auto base = [&](StackyFan& f, std::size_t nrays, const IntVec& mults) {
    f.n = n;
    f.ambient = Lattice::standard(n);
    for (std::size_t i = 0; i < nrays; ++i) f.rays.push_back(c.ray(i));
    f.mults = mults;
  };
  if (c.kind == Case::Reweight) {
    IntVec t_mult(n);
    for (std::size_t i = 0; i < n; ++i) t_mult[i] = lcm(c.r[i], c.s[i]);
    base(t.x, n, c.r);
    base(t.y, n, c.s);
    base(t.w, n, t_mult);
    t.x.cones = t.y.cones = t.w.cones = {all_but(n, {})};
    return t;
  }
  if (c.kind == Case::Contraction || c.kind == Case::InverseContraction) {
    base(t.y, n, IntVec(c.r.begin(), c.r.begin() + static_cast<std::ptrdiff_t>(n)));
    t.y.cones = {all_but(n, {})};
    base(t.x, n + 1, c.r);
    for (std::size_t i0 = 0; i0 < c.n1; ++i0) t.x.cones.push_back(all_but(n + 1, {i0}));
    t.w = t.x;
    Lattice ny = t.y.chart_lattice(0);
    for (std::size_t k = 0; k < t.x.cones.size(); ++k)
      t.w.chart_override.push_back(lattice_intersection(t.x.chart_lattice(k), ny));
    return t;
  }
  base(t.x, n + 1, c.r);
  base(t.y, n + 1, c.r);
  for (std::size_t i0 = 0; i0 < c.n1; ++i0) t.x.cones.push_back(all_but(n + 1, {i0}));
  for (std::size_t i0 = c.n2; i0 <= n; ++i0) t.y.cones.push_back(all_but(n + 1, {i0}));
  IntVec wm = c.r;
  wm.push_back(1);
  base(t.w, n + 2, wm);
  for (std::size_t i0 = 0; i0 < c.n1; ++i0)
    for (std::size_t i1 = c.n2; i1 <= n; ++i1) {
      t.w.cones.push_back(all_but(n + 2, {i0, i1}));
      Lattice n0 = t.x.chart_lattice(i0), n1l = t.y.chart_lattice(i1 - c.n2);
      t.w.chart_override.push_back(lattice_intersection(n0, n1l));
    }
  return t;
}

enum class Side { X, Y };

/// Pullback of a Q-divisor from the coarse target to the refinement:
/// f^* from Y to X in cases 2/4, and mu^* (from X) or nu^* (from Y) to W in
/// case 3. Case 1 is the identity.
inline QDivisor pullback_divisor(const BirationalConfig& c, QDivisor d, Side from = Side::Y) {
  const std::size_t n = c.n;
  auto fit = [&](std::size_t want) {
    if (d.size() > want) {
      for (std::size_t i = want; i < d.size(); ++i)
        if (d[i] != 0) throw Error(ErrorCode::SupportError, "divisor is supported on an exceptional ray");
      d.resize(want);
    }
    if (d.size() != want) throw Error(ErrorCode::BadInput, "divisor has " + std::to_string(d.size()) + " coefficients, expected " + std::to_string(want));
  };
  switch (c.kind) {
    case Case::Reweight:
      fit(n);
      return d;
    case Case::Contraction:
    case Case::InverseContraction: {
      fit(n);
      Rat e = 0;
      for (std::size_t i = 0; i < n; ++i) e += c.a[i] * d[i];
      d.push_back(e);
      return d;
    }
    case Case::Flip: {
      fit(n + 1);
      Rat e = 0;
      if (from == Side::X) {
        for (std::size_t i = c.n2; i <= n; ++i) e += c.lambda * (-c.a_full(i)) * d[i];
      } else {
        for (std::size_t i = 0; i < c.n1; ++i) e += c.lambda * c.a_full(i) * d[i];
      }
      d.push_back(e);
      return d;
    }
  }
  return d;
}

/// K + B = sum -1/r_i D_i.
inline QDivisor log_canonical(const StackyFan& fan) {
  QDivisor d;
  for (const auto& r : fan.mults) d.push_back(make_rat(-1, r));
  return d;
}

enum class Crepancy { StrictlyGreater, Equal, StrictlyLess };

inline std::string to_string(Crepancy c) {
  switch (c) {
    case Crepancy::StrictlyGreater: return "StrictlyGreater";
    case Crepancy::Equal: return "Equal";
    case Crepancy::StrictlyLess: return "StrictlyLess";
  }
  return "?";
}

struct CrepancyResult {
  Crepancy verdict;
  Rat value;
};

inline CrepancyResult crepancy_compare(const BirationalConfig& c) {
  Rat v = 0;
  switch (c.kind) {
    case Case::Reweight:
      for (std::size_t i = 0; i < c.n; ++i) v += make_rat(1, c.s[i]) - make_rat(1, c.r[i]);
      break;
    case Case::Contraction:
    case Case::Flip:
      for (std::size_t i = 0; i <= c.n; ++i) v += make_rat(c.a_full(i), c.r[i]);
      break;
    case Case::InverseContraction:
      v = make_rat(1, c.r[c.n]);
      for (std::size_t i = 0; i < c.n; ++i) v -= make_rat(c.a[i], c.r[i]);
      break;
  }
  const int s = sgn(v);
  return {s > 0 ? Crepancy::StrictlyGreater : (s == 0 ? Crepancy::Equal : Crepancy::StrictlyLess), v};
}

/// Coefficient of the new ray in mu^*(K_X+B) - nu^*(K_Y+C) (flip case).
inline Rat crepancy_on_resolution(const BirationalConfig& c) {
  auto t = fans_of(c);
  auto dx = pullback_divisor(c, log_canonical(t.x), Side::X);
  auto dy = pullback_divisor(c, log_canonical(t.y), Side::Y);
  return dx.back() - dy.back();
}

/// Log discrepancy of the divisor of w over the cone spanned by `rays`
/// with boundary coefficients b: sum lambda_i (1 - b_i) - 1, w = sum lambda_i v_i.
inline Rat discrepancy_of_ray(const std::vector<IntVec>& rays, const RatVec& b, const RatVec& w, RatVec* lambdas = nullptr) {
  const std::size_t n = w.size();
  if (rays.size() != n) throw Error(ErrorCode::NotFullRank, "discrepancy needs a full-dimensional simplicial cone");
  auto lam = solve(transpose(to_ratmatrix(rays)), w);
  if (!lam) throw Error(ErrorCode::NotFullRank, "cone rays are dependent");
  Rat a = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if ((*lam)[i] < 0) throw Error(ErrorCode::NotInCone, "w = " + format_vec(w) + " lies outside the cone");
    a += (*lam)[i] * (1 - b[i]);
  }
  if (lambdas) *lambdas = *lam;
  return a;
}

inline Rat discrepancy_of_ray(const StackyFan& fan, std::size_t cone, const RatVec& w) {
  if (!fan.ambient.contains(w)) throw Error(ErrorCode::NotInLattice, "w = " + format_vec(w) + " is not in N");
  RatVec b;
  for (auto i : fan.cones[cone]) b.push_back(1 - make_rat(1, fan.mults[i]));
  return discrepancy_of_ray(fan.cone_rays(cone), b, w);
}

inline Rat ramified_discrepancy(const Rat& a, const Int& e) {
  if (e < 1) throw Error(ErrorCode::BadInput, "ramification index must be positive");
  return a * e + (e - 1);
}

struct DiscrepancyLedger {
  Int n, q;
  Lattice lattice;             // N = Z^2 + Z (1/n)(1, q)
  std::vector<RatVec> rays;    // exceptional rays in order from e_2 to e_1
  std::vector<RatVec> lambdas; // coordinates in the basis e_1, e_2
  IntVec self_intersections;
  RatVec discrepancies;
  Rat boundary_coefficient = 0;
};

/// Minimal resolution of 1/n (1, q) by the Hirzebruch-Jung continued fraction.
inline DiscrepancyLedger hj_resolution(const Int& n, const Int& q) {
  if (!(0 < q && q < n) || gcd(n, q) != 1) throw Error(ErrorCode::BadInput, "need 0 < q < n and gcd(n, q) = 1");
  DiscrepancyLedger led;
  led.n = n;
  led.q = q;
  led.lattice = Lattice::from_rat({RatVec{1, 0}, RatVec{0, 1}, RatVec{make_rat(1, n), make_rat(q, n)}}, 2);
  IntVec digits;
  Int num = n, den = q;
  while (den != 0) {
    Int b = ceil_div(num, den);
    digits.push_back(b);
    Int rem = b * den - num;
    num = den;
    den = rem;
  }
  RatVec prev{0, 1}, cur{make_rat(1, n), make_rat(q, n)};
  const std::vector<IntVec> basis{IntVec{1, 0}, IntVec{0, 1}};
  for (const auto& b : digits) {
    RatVec lam;
    led.rays.push_back(cur);
    led.discrepancies.push_back(discrepancy_of_ray(basis, RatVec{0, 0}, cur, &lam));
    led.lambdas.push_back(lam);
    led.self_intersections.push_back(-b);
    RatVec next(2);
    for (int j = 0; j < 2; ++j) next[j] = cur[j] * b - prev[j];
    prev = cur;
    cur = next;
  }
  if (cur != RatVec{1, 0}) throw Error(ErrorCode::BadInput, "continued fraction recurrence did not close");
  return led;
}

/// m in M with (k_i - k'_i)/r_i = <m, v_i> for every ray, if one exists.
inline std::optional<RatVec> iso_equivalent(const StackyFan& fan, const MonomialLineBundle& l,
                                            const MonomialLineBundle& lp) {
  const std::size_t nr = fan.rays.size();
  if (l.k.size() != nr || lp.k.size() != nr) throw Error(ErrorCode::BadInput, "bundle length differs from ray count");
  RatVec target(nr);
  for (std::size_t i = 0; i < nr; ++i) target[i] = make_rat(l.k[i] - lp.k[i], fan.mults[i]);
  RatMatrix aug;
  for (std::size_t i = 0; i < nr; ++i) {
    RatVec row = to_ratvec(fan.rays[i]);
    row.push_back(target[i]);
    aug.push_back(std::move(row));
  }
  auto piv = rref(aug);
  if (!piv.empty() && piv.back() == fan.n) return std::nullopt;
  RatVec m(fan.n, 0);
  for (std::size_t r = 0; r < piv.size(); ++r) m[piv[r]] = aug[r][fan.n];
  for (std::size_t i = 0; i < nr; ++i)
    if (dot(m, fan.rays[i]) != target[i]) return std::nullopt;
  if (!fan.monomials().contains(m)) return std::nullopt;
  return m;
}

/// Hermite rows of the relation lattice {(r_i <m, v_i>)_i : m in M}, with
/// pivots chosen from the last ray backwards. Columns are returned reversed.
inline std::vector<IntVec> relation_rows_reversed(const StackyFan& fan) {
  const std::size_t nr = fan.rays.size();
  std::vector<IntVec> rows;
  for (const auto& b : fan.monomials().basis()) {
    IntVec row(nr);
    for (std::size_t i = 0; i < nr; ++i) {
      Rat v = dot(b, fan.rays[nr - 1 - i]) * fan.mults[nr - 1 - i];
      row[i] = v.get_num();
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || nr == 0) return {};
  const std::size_t rk = hermite_rows(rows);
  rows.resize(rk);
  return rows;
}

/// Canonical representative of the isomorphism class of L: entries at the
/// relation pivots are reduced into [0, pivot).
inline MonomialLineBundle normal_form(const StackyFan& fan, const MonomialLineBundle& l) {
  const std::size_t nr = fan.rays.size();
  auto rows = relation_rows_reversed(fan);
  IntVec x(l.k.rbegin(), l.k.rend());
  for (const auto& row : rows) {
    std::size_t c = 0;
    while (row[c] == 0) ++c;
    Int qt = floor_div(x[c], row[c]);
    for (std::size_t j = c; j < nr; ++j) x[j] -= qt * row[j];
  }
  return MonomialLineBundle{IntVec(x.rbegin(), x.rend())};
}

}  // namespace toricdk
