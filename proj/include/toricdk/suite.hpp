#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cohom.hpp"
#include "fm.hpp"
#include "stacky.hpp"
#include "tilting.hpp"

namespace toricdk {

/// Seeded source of random configurations for the self-check batch.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  long range(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }

  IntVec ivec(std::size_t n, long lo, long hi) {
    IntVec v(n);
    for (auto& x : v) x = range(lo, hi);
    return v;
  }

  BirationalConfig reweight(std::size_t max_n = 3, long max_r = 8) {
    const std::size_t n = range(1, max_n);
    IntVec r(n), s(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = range(1, max_r);
      s[i] = range(1, r[i].get_si());
    }
    return build_config(Case::Reweight, n, 0, 0, {}, r, s);
  }

  BirationalConfig contraction(std::size_t max_n = 4, long max_a = 5, long max_r = 6) {
    for (;;) {
      const std::size_t n = range(2, max_n);
      const std::size_t n1 = range(2, n);
      IntVec a(n, 0);
      for (std::size_t i = 0; i < n1; ++i) a[i] = range(1, max_a);
      if (!is_primitive(a)) continue;
      auto c = build_config(Case::Contraction, n, n1, n1, a, ivec(n + 1, 1, max_r));
      if (crepancy_compare(c).value >= 0) return c;
    }
  }

  BirationalConfig flip(std::size_t max_n = 4, long max_a = 3, long max_r = 3) {
    for (;;) {
      const std::size_t n = range(3, max_n);
      const std::size_t n1 = range(2, n - 1);
      const std::size_t n2 = range(n1, n - 1);
      IntVec a(n);
      for (std::size_t i = 0; i < n; ++i) a[i] = i < n1 ? range(1, max_a) : (i < n2 ? 0 : -range(1, max_a));
      if (!is_primitive(a)) continue;
      auto c = build_config(Case::Flip, n, n1, n2, a, ivec(n + 1, 1, max_r));
      if (crepancy_compare(c).value >= 0) return c;
    }
  }

  BirationalConfig inverse(std::size_t max_n = 3, long max_a = 3, long max_r = 6) {
    for (;;) {
      const std::size_t n = range(2, max_n);
      const std::size_t n1 = range(2, n);
      IntVec a(n, 0);
      for (std::size_t i = 0; i < n1; ++i) a[i] = range(1, max_a);
      if (!is_primitive(a)) continue;
      try {
        return build_config(Case::InverseContraction, n, n1, n1, a, ivec(n + 1, 1, max_r));
      } catch (const Error&) {
      }
    }
  }

  /// Random exponents, shifted along one ray so the statistic lands in
  /// [0, step), which lies inside the window.
  IntVec in_range(const BirationalConfig& c, long spread = 3) {
    IntVec k = ivec(c.n + 1, -spread, spread);
    const std::size_t i0 = c.kind == Case::Flip ? range(c.n2, c.n) : range(0, c.n1 - 1);
    // Raising k_i0 by one lowers the statistic by step in both cases.
    const Rat step = make_rat(c.kind == Case::Flip ? Int(-c.a_full(i0)) : c.a[i0], c.r[i0]);
    k[i0] += floor_of(Rat(range_statistic(k, c) / step));
    return k;
  }

 private:
  std::mt19937_64 rng_;
};

struct PropertyResult {
  std::string name;
  std::size_t trials = 0, failures = 0;
  std::string first_failure;
};

/// Library self-consistency batch behind the `suite` command. Each property
/// reruns a closed-form claim against a brute-force scan.
inline std::vector<PropertyResult> run_suite(std::uint64_t seed, std::int64_t box, std::size_t workers = 1) {
  std::vector<PropertyResult> out;
  Sampler g(seed);
  auto prop = [&](const std::string& name, std::size_t trials, const std::function<std::string()>& one) {
    PropertyResult r{name, trials, 0, {}};
    for (std::size_t t = 0; t < trials; ++t) {
      std::string why;
      try {
        why = one();
      } catch (const Error& e) {
        why = e.what();
      }
      if (!why.empty()) {
        if (!r.failures++) r.first_failure = why;
      }
    }
    out.push_back(std::move(r));
  };

  prop("ceiling_identity", 1, [&]() -> std::string {
    for (long r = 1; r <= 8; ++r)
      for (long s = 1; s <= r; ++s)
        for (long m = -12; m <= 12; ++m)
          for (long mp = -12; mp <= 12; ++mp)
            if (!ceiling_identity_check(r, s, m, mp))
              return "r=" + std::to_string(r) + " s=" + std::to_string(s) + " m=" + std::to_string(m);
    return {};
  });
  prop("reweight_hom_bijective", 20, [&]() -> std::string {
    auto c = g.reweight();
    IntVec kp = g.ivec(c.n, -6, 6), k = g.ivec(c.n, -6, 6);
    auto rep = hom_graded_compare(kp, k, c, box, workers);
    return rep.verdict == HomVerdict::Bijective ? "" : "verdict " + to_string(rep.verdict);
  });
  prop("contraction_hom_bijective", 20, [&]() -> std::string {
    auto c = g.contraction(3);
    IntVec kp = g.ivec(c.n, -3, 3), k = g.ivec(c.n, -3, 3);
    auto rep = hom_graded_compare(kp, k, c, box, workers);
    return rep.verdict == HomVerdict::Bijective ? "" : "verdict " + to_string(rep.verdict);
  });
  prop("contraction_vanishing", 20, [&]() -> std::string {
    auto c = g.contraction(3);
    IntVec kp = g.ivec(c.n, -3, 3), k = g.ivec(c.n, -3, 3);
    auto x = fans_of(c).x;
    auto rep = verify_vanishing(x, rounded_hom_sheaf(kp, k, Side::X, c), box, 1, workers);
    return rep.vanishing() ? "" : "witness in degree p=" + std::to_string(rep.witnesses[0].p);
  });
  prop("flip_vanishing_in_range", 10, [&]() -> std::string {
    auto c = g.flip();
    IntVec kp = g.in_range(c), k = g.in_range(c);
    auto t = fans_of(c);
    for (Side side : {Side::X, Side::Y}) {
      auto rep = verify_vanishing(side == Side::X ? t.x : t.y, rounded_hom_sheaf(kp, k, side, c), box, 1, workers);
      if (!rep.vanishing()) return "witness on side " + std::string(side == Side::X ? "X" : "Y");
    }
    return {};
  });
  prop("flip_resolution_coefficient", 50, [&]() -> std::string {
    auto c = g.flip();
    Rat got = crepancy_on_resolution(c), want = c.lambda * crepancy_compare(c).value;
    return got == want ? "" : to_pq(got) + " != " + to_pq(want);
  });
  prop("stratum_twists", 20, [&]() -> std::string {
    auto c = g.flip();
    IntVec k = g.in_range(c);
    const std::size_t width = c.n + 1 - c.n2;
    for (std::uint32_t mask = 1; mask < (1u << width); ++mask) {
      std::vector<std::size_t> stratum;
      for (std::size_t j = 0; j < width; ++j)
        if (mask >> j & 1) stratum.push_back(c.n2 + j);
      if (stratum.size() > c.n - c.n2) continue;
      if (!stratum_twist_range_check(c, stratum, k).ok) return "stratum mask " + std::to_string(mask);
    }
    return {};
  });
  prop("range_classes_complete", 5, [&]() -> std::string {
    auto c = g.flip(3, 2, 2);
    auto cls = enumerate_range_classes(c);
    const StackyFan fan = bundle_fan(c);
    IntVec k(c.n + 1, -2);
    for (;;) {
      if (range_check(k, c).in_range) {
        auto nf = normal_form(fan, {k});
        if (!std::binary_search(cls.begin(), cls.end(), nf)) return "missing class " + label_of(nf.k);
      }
      std::size_t d = 0;
      for (; d < k.size(); ++d) {
        if (++k[d] <= 2) break;
        k[d] = -2;
      }
      if (d == k.size()) break;
    }
    return {};
  });
  return out;
}

}  // namespace toricdk
