#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "toricdk/rational.hpp"

namespace toricdk {

/// <u, w> >= c over integer degrees u.
struct IntConstraint {
  std::vector<std::int64_t> w;
  std::int64_t c;
};

/// Integer form of <u, w> >= bound: since u is integral the bound rounds up.
inline IntConstraint int_constraint(const IntVec& w, const Rat& bound) {
  IntConstraint k;
  for (const auto& x : w) k.w.push_back(to_i64(x));
  k.c = to_i64(ceil_of(bound));
  return k;
}

struct Interval {
  std::int64_t lo, hi;
  bool empty() const { return lo > hi; }
  std::int64_t size() const { return empty() ? 0 : hi - lo + 1; }
};

inline std::int64_t fdiv(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t cdiv(std::int64_t a, std::int64_t b) { return -fdiv(-a, b); }

/// Values of the last coordinate in [-box, box] satisfying every constraint,
/// given the first n-1 coordinates.
inline Interval last_coord_interval(const std::vector<IntConstraint>& cons, const std::vector<std::int64_t>& prefix,
                                    std::int64_t box) {
  Interval iv{-box, box};
  const std::size_t last = prefix.size();
  for (const auto& k : cons) {
    std::int64_t partial = 0;
    for (std::size_t j = 0; j < last; ++j) partial += k.w[j] * prefix[j];
    const std::int64_t need = k.c - partial;  // w_last * t >= need
    const std::int64_t wl = k.w[last];
    if (wl > 0) iv.lo = std::max(iv.lo, cdiv(need, wl));
    else if (wl < 0) iv.hi = std::min(iv.hi, fdiv(need, wl));
    else if (need > 0) return Interval{1, 0};
  }
  return iv;
}

/// Splits [-box, box] for the first coordinate into contiguous chunks, runs
/// `work(lo, hi)` on each in its own thread, and returns results in order.
template <class R>
std::vector<R> parallel_first_coord(std::int64_t box, std::size_t workers,
                                    const std::function<R(std::int64_t, std::int64_t)>& work) {
  workers = std::max<std::size_t>(1, workers);
  const std::int64_t span = 2 * box + 1;
  workers = std::min<std::size_t>(workers, static_cast<std::size_t>(span));
  std::vector<R> out(workers);
  if (workers == 1) {
    out[0] = work(-box, box);
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::int64_t lo = -box + span * static_cast<std::int64_t>(w) / static_cast<std::int64_t>(workers);
    const std::int64_t hi = -box + span * static_cast<std::int64_t>(w + 1) / static_cast<std::int64_t>(workers) - 1;
    pool.emplace_back([&, w, lo, hi] { out[w] = work(lo, hi); });
  }
  for (auto& t : pool) t.join();
  return out;
}

/// Visits every prefix (u_1..u_{n-1}) with u_1 in [first_lo, first_hi] and
/// the other entries in [-box, box], in lexicographic order.
inline void for_each_prefix(std::size_t n, std::int64_t box, std::int64_t first_lo, std::int64_t first_hi,
                            const std::function<void(const std::vector<std::int64_t>&)>& visit) {
  if (n <= 1) {
    visit({});
    return;
  }
  std::vector<std::int64_t> p(n - 1, -box);
  p[0] = first_lo;
  if (first_lo > first_hi) return;
  for (;;) {
    visit(p);
    std::size_t k = n - 1;
    while (k > 0) {
      --k;
      const std::int64_t top = k == 0 ? first_hi : box;
      if (p[k] < top) {
        ++p[k];
        for (std::size_t j = k + 1; j < n - 1; ++j) p[j] = -box;
        break;
      }
      if (k == 0) return;
    }
  }
}

}  // namespace toricdk
