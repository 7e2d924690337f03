#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cohom.hpp"
#include "fm.hpp"
#include "stacky.hpp"
#include "suite.hpp"
#include "tilting.hpp"

namespace toricdk::cli {

using nlohmann::json;

struct Scenario {
  Case kind = Case::Reweight;
  std::size_t n = 0, n1 = 0, n2 = 0;
  IntVec a, r, s;
  std::vector<IntVec> bundles;
  std::optional<std::int64_t> box;
  std::uint64_t seed = 0;
};

struct Flags {
  std::optional<std::int64_t> box;
  std::size_t workers = 1;
  std::string format = "json";
  std::uint64_t seed = 0;
  bool timing = false;
};

struct Outcome {
  int exit_code = 0;
  std::string out;
};

inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::BoxTooSmall:
    case ErrorCode::NotPrincipal:
      return 4;
    case ErrorCode::RankMismatch:
    case ErrorCode::NotContained:
    case ErrorCode::SupportError:
      return 1;
    default:
      return 2;
  }
}

namespace detail {

inline Int int_of(const json& v, const std::string& field) {
  if (v.is_number_integer()) return Int(v.get<long>());
  if (v.is_string()) {
    try {
      return Int(v.get<std::string>());
    } catch (const std::invalid_argument&) {
    }
  }
  throw Error(ErrorCode::ParseError, "field '" + field + "' expects integers");
}

inline IntVec ints_of(const json& v, const std::string& field) {
  if (!v.is_array()) throw Error(ErrorCode::ParseError, "field '" + field + "' expects a list");
  IntVec out;
  for (const auto& x : v) out.push_back(int_of(x, field));
  return out;
}

inline std::size_t size_of(const json& v, const std::string& field) {
  Int x = int_of(v, field);
  if (x < 0) throw Error(ErrorCode::ValidationError, "field '" + field + "' must be nonnegative");
  return static_cast<std::size_t>(to_i64(x));
}

inline json strs(const IntVec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(x.get_str());
  return a;
}

inline json strs(const RatVec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_pq(x));
  return a;
}

}  // namespace detail

/// Strict reader: unknown fields, wrong types and missing required fields are
/// rejected. The primed counts may be spelled n1/n2 or n'/n''.
inline Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "scenario must be a JSON object");
  static const std::set<std::string> known{"case", "n",  "n1", "n2",      "n'",  "n''", "n′",
                                           "n″",   "a",  "r",  "s",       "bundles", "box", "seed"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw Error(ErrorCode::ParseError, "unknown field '" + key + "'");
  auto pick = [&](std::initializer_list<const char*> names) -> const json* {
    const json* hit = nullptr;
    for (const char* nm : names)
      if (j.contains(nm)) {
        if (hit) throw Error(ErrorCode::ParseError, std::string("field given twice: ") + nm);
        hit = &j.at(nm);
      }
    return hit;
  };

  Scenario s;
  if (!j.contains("case")) throw Error(ErrorCode::ParseError, "missing field 'case'");
  const Int kind = detail::int_of(j.at("case"), "case");
  if (kind < 1 || kind > 4) throw Error(ErrorCode::ValidationError, "case must be 1, 2, 3 or 4");
  s.kind = static_cast<Case>(kind.get_si());
  if (!j.contains("n")) throw Error(ErrorCode::ParseError, "missing field 'n'");
  s.n = detail::size_of(j.at("n"), "n");
  if (!j.contains("r")) throw Error(ErrorCode::ParseError, "missing field 'r'");
  s.r = detail::ints_of(j.at("r"), "r");
  if (j.contains("a")) s.a = detail::ints_of(j.at("a"), "a");
  if (j.contains("s")) s.s = detail::ints_of(j.at("s"), "s");
  if (const json* v = pick({"n1", "n'", "n′"})) s.n1 = detail::size_of(*v, "n1");
  if (const json* v = pick({"n2", "n''", "n″"})) s.n2 = detail::size_of(*v, "n2");
  else s.n2 = s.n1;
  if (j.contains("bundles")) {
    if (!j.at("bundles").is_array()) throw Error(ErrorCode::ParseError, "field 'bundles' expects a list of lists");
    for (const auto& b : j.at("bundles")) s.bundles.push_back(detail::ints_of(b, "bundles"));
  }
  if (j.contains("box")) s.box = to_i64(detail::int_of(j.at("box"), "box"));
  if (j.contains("seed")) s.seed = static_cast<std::uint64_t>(to_i64(detail::int_of(j.at("seed"), "seed")));
  if (s.kind != Case::Reweight && s.a.size() != s.n)
    throw Error(ErrorCode::ValidationError, "a must have length n");
  return s;
}

inline BirationalConfig config_of(const Scenario& s) {
  auto c = build_config(s.kind, s.n, s.n1, s.n2, s.a, s.r, s.s);
  for (const auto& b : s.bundles)
    if (b.size() != c.num_rays())
      throw Error(ErrorCode::ValidationError, "bundle of length " + std::to_string(b.size()) + ", expected " +
                                                  std::to_string(c.num_rays()));
  return c;
}

inline json scenario_json(const Scenario& s) {
  json b = json::array();
  for (const auto& k : s.bundles) b.push_back(detail::strs(k));
  json j{{"case", static_cast<int>(s.kind)}, {"n", s.n}, {"n1", s.n1}, {"n2", s.n2},
         {"a", detail::strs(s.a)},          {"r", detail::strs(s.r)}, {"bundles", b}};
  if (!s.s.empty()) j["s"] = detail::strs(s.s);
  return j;
}

// ---------------------------------------------------------------------------
// Reports

inline json error_json(const Error& e) {
  return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"payload", e.payload()}};
}

/// Cone of `fan` whose span contains w, if any.
inline std::optional<std::size_t> containing_cone(const StackyFan& fan, const RatVec& w) {
  for (std::size_t c = 0; c < fan.cones.size(); ++c) {
    auto lam = solve(transpose(to_ratmatrix(fan.cone_rays(c))), w);
    if (lam && std::all_of(lam->begin(), lam->end(), [](const Rat& x) { return x >= 0; })) return c;
  }
  return std::nullopt;
}

inline json discrepancy_entry(const std::string& over, const StackyFan& fan, const IntVec& w) {
  json e{{"ray", detail::strs(w)}, {"over", over}};
  auto cone = containing_cone(fan, to_ratvec(w));
  if (!cone) {
    e["error"] = "ray outside the support";
    return e;
  }
  e["discrepancy"] = to_pq(discrepancy_of_ray(fan, *cone, to_ratvec(w)));
  return e;
}

inline json check_report(const BirationalConfig& c) {
  auto cr = crepancy_compare(c);
  json j{{"case", to_string(c.kind)}, {"crepancy", {{"verdict", to_string(cr.verdict)}, {"sum", to_pq(cr.value)}}}};
  auto t = fans_of(c);
  json ledger = json::array();
  switch (c.kind) {
    case Case::Reweight:
      break;
    case Case::Contraction:
    case Case::InverseContraction: {
      auto e = discrepancy_entry("Y", t.y, c.a);
      e["boundary_coefficient"] = to_pq(1 - make_rat(1, c.r[c.n]));
      ledger.push_back(e);
      break;
    }
    case Case::Flip:
      ledger.push_back(discrepancy_entry("X", t.x, c.v_extra));
      ledger.push_back(discrepancy_entry("Y", t.y, c.v_extra));
      j["lambda"] = to_pq(c.lambda);
      j["resolution_coefficient"] = to_pq(crepancy_on_resolution(c));
      break;
  }
  if (c.kind == Case::InverseContraction) {
    auto b = case4_bound(c);
    j["bound"] = {{"lhs", to_pq(b.lhs)},
                  {"bound_r_exceptional", to_pq(b.bound)},
                  {"accepted", b.accepted},
                  {"bound_r_n", to_pq(b.literal_bound)},
                  {"accepted_r_n", b.literal_accepted}};
  }
  j["discrepancies"] = ledger;
  return j;
}

inline json fm_report(const BirationalConfig& c, const std::vector<IntVec>& bundles) {
  json rows = json::array();
  for (const auto& k : bundles) {
    auto r = apply_fm(k, c);
    json gens = json::array();
    for (const auto& g : r.chart_generators) gens.push_back(detail::strs(g));
    json cert = json::object();
    for (const auto& [name, v] : r.certificate) cert[name] = to_pq(v);
    json row{{"k", detail::strs(k)},
             {"target", detail::strs(r.target.k)},
             {"chart_generators", gens},
             {"in_range", r.in_range},
             {"certificate", cert}};
    if (c.kind == Case::Flip) row["w_coefficient"] = to_pq(r.w_coefficient);
    rows.push_back(row);
  }
  return {{"bundles", rows}};
}

inline std::vector<std::pair<std::size_t, std::size_t>> ordered_pairs(std::size_t count) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < count; ++j) out.emplace_back(i, j);
  return out;
}

inline void need_bundles(const Scenario& s, const char* command) {
  if (s.bundles.empty()) throw Error(ErrorCode::ValidationError, std::string(command) + " needs at least one bundle");
}

// ---------------------------------------------------------------------------
// Built-in fixtures

inline json example_z8() {
  auto led = hj_resolution(8, 3);
  json rays = json::array(), disc = json::array(), self = json::array();
  for (std::size_t i = 0; i < led.rays.size(); ++i) {
    rays.push_back(detail::strs(led.rays[i]));
    disc.push_back(to_pq(led.discrepancies[i]));
    self.push_back(led.self_intersections[i].get_str());
  }
  return {{"name", "z8-quotient"},
          {"n", led.n.get_str()},
          {"q", led.q.get_str()},
          {"exceptional_rays", rays},
          {"self_intersections", self},
          {"discrepancies", disc}};
}

/// Weight (1,2) blowup of the plane with boundary (2/3)(D_1 + D_2).
inline BirationalConfig weighted_blowup_config() {
  return build_config(Case::Contraction, 2, 2, 2, IntVec{1, 2}, IntVec{3, 3, 1});
}

inline json example_weighted_blowup() {
  auto c = weighted_blowup_config();
  auto t = fans_of(c);
  const std::vector<IntVec> quad{IntVec{1, 0}, IntVec{0, 1}};
  Rat disc = discrepancy_of_ray(quad, RatVec{make_rat(2, 3), make_rat(2, 3)}, to_ratvec(c.a));
  json charts = json::array();
  for (std::size_t k = 0; k < t.x.cones.size(); ++k) {
    json rays = json::array();
    for (const auto& v : t.x.cone_rays(k)) rays.push_back(detail::strs(v));
    charts.push_back({{"rays", rays}, {"index", index_in(Lattice::from_int(t.x.cone_rays(k), c.n), t.x.ambient).get_str()}});
  }
  return {{"name", "weighted-blowup"}, {"ray", detail::strs(c.a)}, {"discrepancy", to_pq(disc)}, {"charts", charts},
          {"check", check_report(c)}};
}

inline BirationalConfig flop_config() {
  return build_config(Case::Flip, 3, 2, 2, IntVec{1, 1, -1}, IntVec{1, 1, 1, 1});
}

inline BirationalConfig plane_blowup_config() {
  return build_config(Case::Contraction, 2, 2, 2, IntVec{1, 1}, IntVec{1, 1, 1});
}

inline json example_named(const std::string& name, std::int64_t box) {
  if (name == "z8-quotient") return example_z8();
  if (name == "weighted-blowup") return example_weighted_blowup();
  if (name == "plane-blowup") {
    auto c = plane_blowup_config();
    auto x = fans_of(c).x;
    auto rep = verify_vanishing(x, IntVec{0, 0, 2}, box);
    json wit = json::array();
    for (const auto& w : rep.witnesses) wit.push_back({{"degree", w.degree}, {"p", w.p}, {"dim", w.dim}});
    return {{"name", name}, {"check", check_report(c)}, {"divisor_2E", {{"box", box}, {"witnesses", wit}}}};
  }
  if (name == "flop") {
    auto c = flop_config();
    auto d = build_tilting(c, box);
    return {{"name", name}, {"check", check_report(c)}, {"tilting", quiver_json(d)}};
  }
  throw Error(ErrorCode::ValidationError, "unknown example '" + name + "'");
}

// ---------------------------------------------------------------------------

inline std::string csv_table(const GradedHomReport& rep, std::size_t n) {
  std::ostringstream os;
  for (std::size_t i = 0; i < n; ++i) os << "m" << i + 1 << ",";
  os << "dim_src,dim_tgt\n";
  for (const auto& row : rep.table) {
    for (auto x : row.degree) os << x << ",";
    os << row.dim_src << "," << row.dim_tgt << "\n";
  }
  return os.str();
}

/// Runs one command. `scenario` holds the scenario text where the command
/// takes one, `name` the positional argument of `examples`.
inline Outcome run(const std::string& command, const std::optional<std::string>& scenario,
                   const std::optional<std::string>& name, const Flags& flags) {
  const auto start = std::chrono::steady_clock::now();
  json report{{"command", command}};
  Outcome res;
  std::string text_out;
  try {
    static const std::set<std::string> with_scenario{"check", "fm", "homcmp", "cohom", "range", "tilting"};
    static const std::set<std::string> all{"check", "fm",      "homcmp",   "cohom", "range",
                                           "tilting", "examples", "suite"};
    if (!all.count(command)) throw Error(ErrorCode::ValidationError, "unknown command '" + command + "'");
    if (flags.format != "json" && flags.format != "csv" && flags.format != "dot")
      throw Error(ErrorCode::ValidationError, "unknown format '" + flags.format + "'");
    if (flags.workers == 0) throw Error(ErrorCode::ValidationError, "workers must be positive");

    std::optional<Scenario> sc;
    std::optional<BirationalConfig> cfg;
    if (with_scenario.count(command)) {
      if (!scenario) throw Error(ErrorCode::ValidationError, command + " needs a scenario file");
      sc = parse_scenario(*scenario);
      report["scenario"] = scenario_json(*sc);
      cfg = config_of(*sc);
    }
    auto box_or = [&](std::int64_t dflt) {
      if (flags.box) return *flags.box;
      if (sc && sc->box) return *sc->box;
      return dflt;
    };
    const std::uint64_t seed = flags.seed ? flags.seed : (sc ? sc->seed : 0);

    if (command == "check") {
      report["result"] = check_report(*cfg);
    } else if (command == "fm") {
      need_bundles(*sc, "fm");
      report["result"] = fm_report(*cfg, sc->bundles);
    } else if (command == "homcmp") {
      need_bundles(*sc, "homcmp");
      json rows = json::array();
      bool all_bijective = true;
      for (auto [i, j] : ordered_pairs(sc->bundles.size())) {
        auto rep = hom_graded_compare(sc->bundles[i], sc->bundles[j], *cfg, box_or(0), flags.workers,
                                      flags.format == "csv");
        all_bijective = all_bijective && rep.verdict == HomVerdict::Bijective;
        json mism = json::array();
        for (const auto& m : rep.mismatches) mism.push_back(m);
        rows.push_back({{"source", i},
                        {"target", j},
                        {"box", rep.box},
                        {"verdict", to_string(rep.verdict)},
                        {"source_count", rep.source_count},
                        {"target_count", rep.target_count},
                        {"in_range", rep.in_range},
                        {"mismatches", mism}});
        if (flags.format == "csv") text_out += "# source " + std::to_string(i) + " target " + std::to_string(j) + "\n" +
                                               csv_table(rep, cfg->n);
      }
      report["result"] = {{"pairs", rows}};
      if (!all_bijective) res.exit_code = 3;
    } else if (command == "cohom") {
      need_bundles(*sc, "cohom");
      auto t = fans_of(*cfg);
      json rows = json::array();
      const std::int64_t box = box_or(48);
      for (auto [i, j] : ordered_pairs(sc->bundles.size()))
        for (Side side : {Side::X, Side::Y}) {
          const StackyFan& fan = side == Side::X ? t.x : t.y;
          auto div = rounded_hom_sheaf(sc->bundles[i], sc->bundles[j], side, *cfg);
          auto rep = verify_vanishing(fan, div, box, 1, flags.workers);
          json wit = json::array();
          for (const auto& w : rep.witnesses) wit.push_back({{"degree", w.degree}, {"p", w.p}, {"dim", w.dim}});
          rows.push_back({{"source", i},
                          {"target", j},
                          {"side", side == Side::X ? "X" : "Y"},
                          {"divisor", detail::strs(div)},
                          {"box", box},
                          {"totals", rep.totals},
                          {"witnesses", wit}});
          if (!rep.vanishing()) res.exit_code = 3;
        }
      report["result"] = {{"pairs", rows}};
    } else if (command == "range") {
      auto cls = enumerate_range_classes(*cfg);
      json rows = json::array();
      for (const auto& l : cls) rows.push_back({{"k", detail::strs(l.k)}, {"statistic", to_pq(range_statistic(l.k, *cfg))}});
      report["result"] = {{"bound", to_pq(range_bound(*cfg))}, {"classes", rows}};
    } else if (command == "tilting") {
      auto d = build_tilting(*cfg, box_or(48), flags.workers);
      if (flags.format == "dot") text_out = export_quiver(d, QuiverFormat::Dot);
      report["result"] = quiver_json(d);
      if (!d.orthogonal()) res.exit_code = 3;
    } else if (command == "examples") {
      const std::int64_t box = box_or(48);
      if (name) {
        report["result"] = example_named(*name, box);
      } else {
        json all_ex = json::array();
        for (const char* nm : {"z8-quotient", "weighted-blowup", "plane-blowup", "flop"})
          all_ex.push_back(example_named(nm, box));
        report["result"] = all_ex;
      }
    } else if (command == "suite") {
      const std::int64_t box = box_or(16);
      json rows = json::array();
      for (const auto& p : run_suite(seed, box, flags.workers)) {
        json row{{"property", p.name}, {"trials", p.trials}, {"failures", p.failures}};
        if (p.failures) {
          row["first_failure"] = p.first_failure;
          res.exit_code = 3;
        }
        rows.push_back(row);
      }
      report["seed"] = std::to_string(seed);
      report["box"] = box;
      report["result"] = rows;
    }
  } catch (const Error& e) {
    report["error"] = error_json(e);
    res.exit_code = exit_code_for(e.code());
    text_out.clear();
  } catch (const std::exception& e) {
    report["error"] = {{"code", "Internal"}, {"message", e.what()}};
    res.exit_code = 1;
    text_out.clear();
  }
  if (flags.timing) {
    auto us = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start).count();
    report["timing_us"] = us;
  }
  res.out = text_out.empty() ? report.dump(2) + "\n" : text_out;
  return res;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace toricdk::cli
