#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cohom.hpp"
#include "cone.hpp"
#include "fm.hpp"
#include "stacky.hpp"

namespace toricdk {

/// Side carrying the bundles of the range window: both flip sides share the
/// rays, the inverse contraction has the extra ray on X.
inline Side bundle_side(const BirationalConfig& c) { return c.kind == Case::Flip ? Side::Y : Side::X; }

inline StackyFan bundle_fan(const BirationalConfig& c) {
  auto t = fans_of(c);
  return bundle_side(c) == Side::Y ? t.y : t.x;
}

inline std::vector<MonomialLineBundle> enumerate_range_classes(const BirationalConfig& c) {
  require_case(c, {Case::Flip, Case::InverseContraction}, "enumerate_range_classes");
  const Rat bound = range_bound(c);
  if (bound <= 0) return {};
  const StackyFan fan = bundle_fan(c);
  const std::size_t nr = fan.rays.size();
  auto rows = relation_rows_reversed(fan);

  // Reversed coordinates: pivots of the relation rows are reduced residues,
  // the single remaining column is free.
  std::vector<Int> modulus(nr, 0);
  for (const auto& row : rows) {
    std::size_t p = 0;
    while (row[p] == 0) ++p;
    modulus[p] = row[p];
  }
  std::vector<std::size_t> pivots, free;
  for (std::size_t j = 0; j < nr; ++j) (modulus[j] != 0 ? pivots : free).push_back(j);
  if (free.size() != 1) throw Error(ErrorCode::RankMismatch, "relation lattice does not have corank one");
  const std::size_t fc = free[0];

  RatVec coef(nr);
  for (std::size_t j = 0; j < nr; ++j) {
    const std::size_t i = nr - 1 - j;
    coef[j] = make_rat(c.a_full(i), c.r[i]);
    if (c.kind == Case::InverseContraction) coef[j] = -coef[j];
  }
  const Rat alpha = coef[fc];

  std::vector<MonomialLineBundle> out;
  IntVec x(nr, 0);
  auto emit = [&]() {
    Rat beta = 0;
    for (auto j : pivots) beta += coef[j] * x[j];
    Int lo, hi;
    if (alpha > 0) {
      lo = ceil_of(Rat(-beta / alpha));
      hi = ceil_of(Rat((bound - beta) / alpha)) - 1;
    } else {
      hi = floor_of(Rat(-beta / alpha));
      lo = floor_of(Rat((bound - beta) / alpha)) + 1;
    }
    for (Int f = lo; f <= hi; ++f) {
      x[fc] = f;
      out.push_back(MonomialLineBundle{IntVec(x.rbegin(), x.rend())});
    }
    x[fc] = 0;
  };
  // Odometer over the residue box.
  for (;;) {
    emit();
    std::size_t d = 0;
    for (; d < pivots.size(); ++d) {
      if (++x[pivots[d]] < modulus[pivots[d]]) break;
      x[pivots[d]] = 0;
    }
    if (d == pivots.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct OrthogonalityEntry {
  std::size_t source = 0, target = 0;
  CechReport report;
};

struct TiltingData {
  Side side = Side::Y;
  std::vector<MonomialLineBundle> representatives;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<RatVec>> arrows;
  std::int64_t box = 0;            // orthogonality scan box
  Rat generator_box = 0;           // box that sufficed for the Hom generators
  std::vector<OrthogonalityEntry> orthogonality;

  bool orthogonal() const {
    return std::all_of(orthogonality.begin(), orthogonality.end(),
                       [](const OrthogonalityEntry& e) { return e.report.vanishing(); });
  }
  std::size_t arrow_count() const {
    std::size_t k = 0;
    for (const auto& [_, g] : arrows) k += g.size();
    return k;
  }
};

/// Lower bounds <u, v_i> >= -(k_b - k_a)_i / r_i cutting out Hom(L_a, L_b).
inline RatVec hom_lower_bounds(const StackyFan& fan, const IntVec& ka, const IntVec& kb) {
  RatVec lo(fan.rays.size());
  for (std::size_t i = 0; i < lo.size(); ++i) lo[i] = make_rat(ka[i] - kb[i], fan.mults[i]);
  return lo;
}

inline bool in_hom(const StackyFan& fan, const Lattice& m, const RatVec& lo, const RatVec& u) {
  if (!m.contains(u)) return false;
  for (std::size_t i = 0; i < fan.rays.size(); ++i)
    if (dot(u, fan.rays[i]) < lo[i]) return false;
  return true;
}

namespace detail {

template <class F>
auto with_growing_box(Rat box, const Rat& limit, Rat& used, F f) {
  for (;;) {
    try {
      auto r = f(box);
      used = std::max(used, box);
      return r;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BoxTooSmall || box >= limit) throw;
      box = std::min(Rat(box * 2), limit);
    }
  }
}

}  // namespace detail

/// Generators of Hom(L_a, L_b) over all rays of the fan that do not factor
/// through a third vertex. Loops start from the Hilbert basis of the base
/// monoid. `used` receives the largest box the generator scans needed.
inline std::map<std::pair<std::size_t, std::size_t>, std::vector<RatVec>> quiver_arrows(
    const StackyFan& fan, const std::vector<MonomialLineBundle>& reps, const Rat& limit, Rat& used) {
  const Lattice m = fan.monomials();
  const std::size_t nv = reps.size();
  std::vector<std::vector<RatVec>> lo(nv, std::vector<RatVec>(nv));
  std::vector<std::vector<std::vector<RatVec>>> gens(nv, std::vector<std::vector<RatVec>>(nv));
  for (std::size_t a = 0; a < nv; ++a)
    for (std::size_t b = 0; b < nv; ++b) {
      lo[a][b] = hom_lower_bounds(fan, reps[a].k, reps[b].k);
      gens[a][b] = detail::with_growing_box(Rat(2), limit, used, [&](const Rat& bx) {
        return a == b ? monoid_hilbert_basis(fan.rays, m, bx) : module_generators(fan.rays, lo[a][b], m, m, bx);
      });
    }

  std::map<std::pair<std::size_t, std::size_t>, std::vector<RatVec>> arrows;
  for (std::size_t a = 0; a < nv; ++a)
    for (std::size_t b = 0; b < nv; ++b) {
      std::vector<RatVec> keep;
      for (const auto& g : gens[a][b]) {
        bool factors = false;
        for (std::size_t via = 0; via < nv && !factors; ++via) {
          if (via == a || via == b) continue;
          for (const auto& g1 : gens[a][via])
            if (in_hom(fan, m, lo[via][b], g - g1)) {
              factors = true;
              break;
            }
        }
        if (!factors) keep.push_back(g);
      }
      if (!keep.empty()) arrows[{a, b}] = std::move(keep);
    }
  return arrows;
}

inline TiltingData build_tilting(const BirationalConfig& c, std::int64_t box = 48, std::size_t workers = 1) {
  TiltingData d;
  d.side = bundle_side(c);
  d.box = box;
  d.representatives = enumerate_range_classes(c);
  if (d.representatives.empty()) throw Error(ErrorCode::EmptyTilting, "no line bundle classes in range");
  const StackyFan fan = bundle_fan(c);
  const std::size_t nv = d.representatives.size();
  d.arrows = quiver_arrows(fan, d.representatives, Rat(std::max<std::int64_t>(box, 2)), d.generator_box);

  for (std::size_t a = 0; a < nv; ++a)
    for (std::size_t b = 0; b < nv; ++b) {
      auto div = rounded_hom_sheaf(d.representatives[a].k, d.representatives[b].k, d.side, c);
      d.orthogonality.push_back({a, b, verify_vanishing(fan, div, box, 1, workers)});
    }
  return d;
}

enum class QuiverFormat { Dot, Json };

inline std::string label_of(const IntVec& k) {
  std::string s = "(";
  for (std::size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + k[i].get_str();
  return s + ")";
}

inline std::string label_of(const RatVec& u) {
  std::string s = "(";
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i) s += ",";
    s += u[i].get_den() == 1 ? u[i].get_num().get_str() : to_pq(u[i]);
  }
  return s + ")";
}

inline nlohmann::json quiver_json(const TiltingData& d) {
  using nlohmann::json;
  json verts = json::array();
  for (std::size_t v = 0; v < d.representatives.size(); ++v) {
    json k = json::array();
    for (const auto& x : d.representatives[v].k) k.push_back(x.get_str());
    verts.push_back({{"id", v}, {"k", k}});
  }
  json arrows = json::array();
  for (const auto& [st, gs] : d.arrows)
    for (const auto& g : gs) {
      json u = json::array();
      for (const auto& x : g) u.push_back(to_pq(x));
      arrows.push_back({{"source", st.first}, {"target", st.second}, {"generator", u}});
    }
  json wit = json::array();
  for (const auto& e : d.orthogonality)
    for (const auto& w : e.report.witnesses)
      wit.push_back({{"source", e.source}, {"target", e.target}, {"degree", w.degree}, {"p", w.p}, {"dim", w.dim}});
  return json{{"side", d.side == Side::X ? "X" : "Y"},
              {"vertices", verts},
              {"arrows", arrows},
              {"generator_box", to_pq(d.generator_box)},
              {"orthogonality", {{"box", d.box}, {"clean", d.orthogonal()}, {"witnesses", wit}}}};
}

inline std::string export_quiver(const TiltingData& d, QuiverFormat fmt) {
  if (fmt == QuiverFormat::Json) return quiver_json(d).dump(2) + "\n";
  std::ostringstream os;
  os << "digraph {\n";
  for (std::size_t v = 0; v < d.representatives.size(); ++v)
    os << "  v" << v << " [label=\"k=" << label_of(d.representatives[v].k) << "\"];\n";
  for (const auto& [st, gs] : d.arrows)
    for (const auto& g : gs) os << "  v" << st.first << " -> v" << st.second << " [label=\"" << label_of(g) << "\"];\n";
  os << "}\n";
  return os.str();
}

inline Rat parse_rat(const std::string& s) {
  try {
    Rat q(s);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::ParseError, "not a rational: " + s);
  }
}

/// Inverse of the JSON export. Orthogonality is restored as one summary
/// entry per witness pair.
inline TiltingData quiver_from_json(const std::string& text) {
  using nlohmann::json;
  TiltingData d;
  try {
    json j = json::parse(text);
    d.side = j.at("side").get<std::string>() == "X" ? Side::X : Side::Y;
    for (const auto& v : j.at("vertices")) {
      IntVec k;
      for (const auto& x : v.at("k")) k.push_back(Int(x.get<std::string>()));
      if (v.at("id").get<std::size_t>() != d.representatives.size())
        throw Error(ErrorCode::ParseError, "vertex ids are not consecutive");
      d.representatives.push_back({k});
    }
    for (const auto& a : j.at("arrows")) {
      RatVec u;
      for (const auto& x : a.at("generator")) u.push_back(parse_rat(x.get<std::string>()));
      d.arrows[{a.at("source").get<std::size_t>(), a.at("target").get<std::size_t>()}].push_back(u);
    }
    d.generator_box = parse_rat(j.at("generator_box").get<std::string>());
    const auto& o = j.at("orthogonality");
    d.box = o.at("box").get<std::int64_t>();
    for (const auto& w : o.at("witnesses")) {
      std::size_t s = w.at("source"), t = w.at("target");
      if (d.orthogonality.empty() || d.orthogonality.back().source != s || d.orthogonality.back().target != t)
        d.orthogonality.push_back({s, t, {}});
      d.orthogonality.back().report.box = d.box;
      d.orthogonality.back().report.witnesses.push_back(
          {w.at("degree").get<std::vector<std::int64_t>>(), w.at("p").get<std::size_t>(), w.at("dim").get<std::int64_t>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return d;
}

}  // namespace toricdk
