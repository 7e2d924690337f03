#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "toricdk/error.hpp"
#include "toricdk/lattice.hpp"
#include "toricdk/rational.hpp"

namespace toricdk {

/// Simplicial cone spanned by primitive, linearly independent rays.
struct SimplicialCone {
  std::vector<IntVec> rays;
  std::size_t dim = 0;

  static SimplicialCone make(std::vector<IntVec> rays) {
    if (rays.empty()) throw Error(ErrorCode::BadInput, "cone without rays");
    const std::size_t n = rays[0].size();
    for (const auto& v : rays) {
      if (v.size() != n) throw Error(ErrorCode::RankMismatch, "ray length mismatch");
      if (!is_primitive(v)) throw Error(ErrorCode::NotPrimitive, "ray is not primitive");
    }
    if (rank(to_ratmatrix(rays)) != rays.size())
      throw Error(ErrorCode::NotFullRank, "cone rays are linearly dependent");
    return SimplicialCone{std::move(rays), n};
  }

  bool full_dimensional() const { return rays.size() == dim; }
};

/// Half-space <u, w> >= bound.
struct HalfSpace {
  IntVec w;
  Rat bound;
};

/// A lattice point u with its values <u, v_i> on the defining rays.
struct RegionPoint {
  RatVec u;
  RatVec vals;
};

/// Polyhedral region {u : <u, v_i> >= lo_i} intersected with a lattice, plus
/// optional extra half-spaces. The first rank-many independent rays give the
/// chart in which points are enumerated.
class ChartScan {
 public:
  ChartScan(std::vector<IntVec> rays, RatVec lo, const Lattice& l, std::vector<HalfSpace> extra = {})
      : rays_(std::move(rays)), lo_(std::move(lo)), extra_(std::move(extra)) {
    const std::size_t n = l.rank();
    for (std::size_t i = 0; i < rays_.size() && chart_.size() < n; ++i) {
      auto trial = chart_;
      trial.push_back(i);
      std::vector<IntVec> rows;
      for (auto j : trial) rows.push_back(rays_[j]);
      if (toricdk::rank(to_ratmatrix(rows)) == trial.size()) chart_ = std::move(trial);
    }
    if (chart_.size() != n) throw Error(ErrorCode::NotFullRank, "region is not full-dimensional");
    RatMatrix v;
    for (auto j : chart_) v.push_back(to_ratvec(rays_[j]));
    vinv_ = *inverse(v);
    // Image of L under u -> (<u, v_j>)_j, as (1/D) * H with Hermite rows H.
    std::vector<RatVec> img;
    for (const auto& b : l.basis()) img.push_back(mat_vec(v, b));
    Lattice image = Lattice::from_rat(img, n);
    den_ = image.den();
    h_ = image.rows();
  }

  std::size_t rank() const { return chart_.size(); }
  const std::vector<std::size_t>& chart() const { return chart_; }

  /// Smallest chart offset bound that is certain to contain a point.
  Rat fundamental_box() const {
    Rat best = 0;
    for (std::size_t j = 0; j < h_.size(); ++j) best = std::max(best, make_rat(h_[j][j], den_));
    return best;
  }

  /// Visits all points with chart offsets <u, v_j> - lo_j in [0, hi_j].
  void for_each(const RatVec& hi, const std::function<void(const RegionPoint&)>& visit) const {
    const std::size_t n = rank();
    IntVec lo(n), top(n), x(n);
    for (std::size_t j = 0; j < n; ++j) {
      lo[j] = ceil_of(lo_[chart_[j]] * den_);
      top[j] = floor_of((lo_[chart_[j]] + hi[j]) * den_);
    }
    IntVec y(n);
    std::function<void(std::size_t)> rec = [&](std::size_t j) {
      if (j == n) {
        emit(y, visit);
        return;
      }
      Int partial = 0;
      for (std::size_t i = 0; i < j; ++i) partial += x[i] * h_[i][j];
      const Int& piv = h_[j][j];
      Int from = ceil_div(lo[j] - partial, piv), to = floor_div(top[j] - partial, piv);
      for (Int t = from; t <= to; ++t) {
        x[j] = t;
        y[j] = partial + t * piv;
        rec(j + 1);
      }
    };
    rec(0);
  }

  /// Chart offsets of a point.
  RatVec offsets(const RegionPoint& p) const {
    RatVec o(rank());
    for (std::size_t j = 0; j < rank(); ++j) o[j] = p.vals[chart_[j]] - lo_[chart_[j]];
    return o;
  }

 private:
  void emit(const IntVec& y, const std::function<void(const RegionPoint&)>& visit) const {
    const std::size_t n = rank();
    RatVec yc(n);
    for (std::size_t j = 0; j < n; ++j) yc[j] = make_rat(y[j], den_);
    RegionPoint p;
    p.u = mat_vec(vinv_, yc);
    p.vals.resize(rays_.size());
    for (std::size_t i = 0; i < rays_.size(); ++i) {
      p.vals[i] = dot(p.u, rays_[i]);
      if (p.vals[i] < lo_[i]) return;
    }
    for (const auto& hs : extra_)
      if (dot(p.u, hs.w) < hs.bound) return;
    visit(p);
  }

  std::vector<IntVec> rays_;
  RatVec lo_;
  std::vector<HalfSpace> extra_;
  std::vector<std::size_t> chart_;
  RatMatrix vinv_;
  Int den_ = 1;
  std::vector<IntVec> h_;
};

/// a <= b in the dual-cone order, given values on the rays.
inline bool dominated(const RatVec& a, const RatVec& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

inline std::vector<RegionPoint> minimal_points(const std::vector<RegionPoint>& pts) {
  std::vector<RegionPoint> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool minimal = true;
    for (std::size_t j = 0; j < pts.size() && minimal; ++j)
      if (j != i && dominated(pts[j].vals, pts[i].vals) && pts[j].vals != pts[i].vals) minimal = false;
    if (minimal) out.push_back(pts[i]);
  }
  return out;
}

inline std::string format_vec(const RatVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_pq(v[i]);
  return s + ")";
}

/// For simplicial full-dimensional rays: heights <u_j, v_j> of the shortest
/// ring vectors u_j on the dual rays (<u_j, v_k> = 0 for k != j).
inline RatVec dual_ray_heights(const std::vector<IntVec>& rays, const Lattice& ring) {
  const std::size_t n = rays.size();
  auto vinv = *inverse(to_ratmatrix(rays));
  Int limit = ring.det().get_num() * ring.den() + 1;
  for (std::size_t i = 1; i < n; ++i) limit *= ring.den();
  RatVec heights(n);
  for (std::size_t j = 0; j < n; ++j) {
    RatVec col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = vinv[i][j];
    Int c = common_denominator(col);
    IntVec prim(n);
    for (std::size_t i = 0; i < n; ++i) prim[i] = Rat(col[i] * c).get_num();
    Int g = content(prim);
    for (auto& x : prim) x /= g;
    for (Int s = 1; s <= limit; ++s) {
      RatVec cand(n);
      for (std::size_t i = 0; i < n; ++i) cand[i] = make_rat(prim[i] * s, ring.den());
      if (ring.contains(cand)) {
        heights[j] = dot(cand, rays[j]);
        break;
      }
    }
  }
  return heights;
}

/// Minimal element of (m + dual cone) intersected with L, with optional
/// extra half-space constraints. `box` bounds the chart offsets; 0 selects the
/// largest dual ray height of L, past which no point is minimal. The box is
/// doubled up to four times before BoxTooSmall.
inline RatVec min_shifted_generator(const RatVec& m, const SimplicialCone& cone, const Lattice& l, Rat box = 0,
                                    const std::vector<HalfSpace>& extra = {}) {
  if (!cone.full_dimensional()) throw Error(ErrorCode::NotFullRank, "cone is not full-dimensional");
  RatVec lo(cone.rays.size());
  for (std::size_t i = 0; i < lo.size(); ++i) lo[i] = dot(m, cone.rays[i]);
  ChartScan scan(cone.rays, lo, l, extra);
  if (box <= 0)
    for (const auto& h : dual_ray_heights(cone.rays, l)) box = std::max(box, h);
  for (int attempt = 0; attempt <= 4; ++attempt, box *= 2) {
    std::vector<RegionPoint> pts;
    scan.for_each(RatVec(scan.rank(), box), [&](const RegionPoint& p) { pts.push_back(p); });
    if (pts.empty()) continue;
    auto mins = minimal_points(pts);
    if (mins.size() == 1) return mins[0].u;
    std::vector<std::vector<std::string>> payload;
    for (const auto& p : mins) payload.push_back({format_vec(p.u)});
    throw Error(ErrorCode::NotPrincipal, std::to_string(mins.size()) + " incomparable minimal elements", payload);
  }
  throw Error(ErrorCode::BoxTooSmall, "no lattice point in the shifted cone within box " + to_pq(box / 2));
}

/// Minimal module generators of {u in L : <u, v_i> >= lo_i for all rays}
/// over the monoid {u in ring : <u, v_i> >= 0}. Rays need not be simplicial.
///
/// Generators are searched with chart offsets up to `box`; a generator on the
/// boundary of the box means the search may be incomplete (BoxTooSmall).
/// For simplicial regions the bound is capped by the dual ray heights, beyond
/// which every point is reducible.
inline std::vector<RatVec> module_generators(const std::vector<IntVec>& rays, const RatVec& lo, const Lattice& l,
                                             const Lattice& ring, Rat box) {
  ChartScan scan(rays, lo, l);
  const std::size_t n = scan.rank();
  RatVec hi(n, box);
  bool capped = false;
  if (rays.size() == n) {
    auto heights = dual_ray_heights(rays, ring);
    capped = true;
    for (std::size_t j = 0; j < n; ++j) {
      const Rat& height = heights[scan.chart()[j]];
      if (height <= box) hi[j] = height;
      else capped = false;
    }
  }
  std::vector<RegionPoint> pts;
  scan.for_each(hi, [&](const RegionPoint& p) { pts.push_back(p); });
  std::vector<RatVec> gens;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool reducible = false;
    for (std::size_t j = 0; j < pts.size() && !reducible; ++j) {
      if (j == i || !dominated(pts[j].vals, pts[i].vals)) continue;
      if (ring.contains(pts[i].u - pts[j].u)) reducible = true;
    }
    if (reducible) continue;
    if (!capped) {
      auto off = scan.offsets(pts[i]);
      for (const auto& o : off)
        if (o >= box)
          throw Error(ErrorCode::BoxTooSmall, "module generator " + format_vec(pts[i].u) + " on box boundary " + to_pq(box));
    }
    gens.push_back(pts[i].u);
  }
  std::sort(gens.begin(), gens.end());
  return gens;
}

inline std::vector<RatVec> hilbert_module_generators(const RatVec& shift, const SimplicialCone& cone, const Lattice& l,
                                                     const Lattice& ring, Rat box) {
  RatVec lo(cone.rays.size());
  for (std::size_t i = 0; i < lo.size(); ++i) lo[i] = dot(shift, cone.rays[i]);
  return module_generators(cone.rays, lo, l, ring, box);
}

/// Irreducible nonzero elements of the monoid {u in ring : <u, v_i> >= 0}.
inline std::vector<RatVec> monoid_hilbert_basis(const std::vector<IntVec>& rays, const Lattice& ring, Rat box) {
  RatVec lo(rays.size(), 0);
  ChartScan scan(rays, lo, ring);
  const bool simplicial = rays.size() == scan.rank();
  if (simplicial) {
    for (const auto& h : dual_ray_heights(rays, ring)) box = std::max(box, h);
  }
  std::vector<RegionPoint> pts;
  scan.for_each(RatVec(scan.rank(), box), [&](const RegionPoint& p) { pts.push_back(p); });
  std::vector<RegionPoint> nonzero;
  for (auto& p : pts) {
    bool zero = true;
    for (const auto& x : p.u) zero = zero && x == 0;
    if (!zero) nonzero.push_back(std::move(p));
  }
  std::vector<RatVec> basis;
  for (std::size_t i = 0; i < nonzero.size(); ++i) {
    bool reducible = false;
    for (std::size_t j = 0; j < nonzero.size() && !reducible; ++j) {
      if (j == i || !dominated(nonzero[j].vals, nonzero[i].vals) || nonzero[j].vals == nonzero[i].vals) continue;
      reducible = true;  // difference is a nonzero monoid element
    }
    if (reducible) continue;
    if (!simplicial) {
      for (const auto& o : scan.offsets(nonzero[i]))
        if (o >= box) throw Error(ErrorCode::BoxTooSmall, "Hilbert basis element on box boundary");
    }
    basis.push_back(nonzero[i].u);
  }
  std::sort(basis.begin(), basis.end());
  return basis;
}

}  // namespace toricdk
