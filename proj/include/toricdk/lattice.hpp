#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "toricdk/error.hpp"
#include "toricdk/rational.hpp"

namespace toricdk {

/// Integer row echelon form with Hermite reduction above the pivots.
///
/// Rows are combined by unimodular operations only. Pivots are positive and
/// the entries above each pivot lie in [0, pivot). If `transform` is given it
/// receives U with U * input = output (zero rows included, at the bottom).
/// Returns the rank.
inline std::size_t hermite_rows(std::vector<IntVec>& a, std::vector<IntVec>* transform = nullptr) {
  const std::size_t m = a.size();
  if (m == 0) return 0;
  const std::size_t cols = a[0].size();
  std::vector<IntVec> u;
  if (transform) {
    u.assign(m, IntVec(m, 0));
    for (std::size_t i = 0; i < m; ++i) u[i][i] = 1;
  }
  auto axpy = [&](std::size_t dst, std::size_t src, const Int& q) {
    for (std::size_t j = 0; j < cols; ++j) a[dst][j] -= q * a[src][j];
    if (transform)
      for (std::size_t j = 0; j < m; ++j) u[dst][j] -= q * u[src][j];
  };
  auto swap_rows = [&](std::size_t i, std::size_t j) {
    std::swap(a[i], a[j]);
    if (transform) std::swap(u[i], u[j]);
  };

  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m; ++c) {
    bool found = false;
    for (;;) {
      std::size_t best = m;
      for (std::size_t i = r; i < m; ++i) {
        if (a[i][c] == 0) continue;
        if (best == m || abs(a[i][c]) < abs(a[best][c])) best = i;
      }
      if (best == m) break;
      found = true;
      swap_rows(r, best);
      bool clean = true;
      for (std::size_t i = r + 1; i < m; ++i) {
        if (a[i][c] == 0) continue;
        axpy(i, r, floor_div(a[i][c], a[r][c]));
        if (a[i][c] != 0) clean = false;
      }
      if (clean) break;
    }
    if (!found) continue;
    if (a[r][c] < 0) {
      for (auto& x : a[r]) x = -x;
      if (transform)
        for (auto& x : u[r]) x = -x;
    }
    for (std::size_t i = 0; i < r; ++i)
      if (a[i][c] != 0) axpy(i, r, floor_div(a[i][c], a[r][c]));
    ++r;
  }
  if (transform) *transform = std::move(u);
  return r;
}

/// Basis of the integer left kernel {x in Z^m : x * rows = 0}.
inline std::vector<IntVec> integer_left_kernel(std::vector<IntVec> rows) {
  std::vector<IntVec> u;
  const std::size_t rk = hermite_rows(rows, &u);
  return {u.begin() + static_cast<std::ptrdiff_t>(rk), u.end()};
}

/// Full-rank lattice (1/den) * L in Q^n, with L stored as Hermite rows.
///
/// The rows are upper triangular (equivalently, the basis columns of the
/// transposed matrix are lower triangular), so equal lattices compare equal.
class Lattice {
 public:
  Lattice() = default;

  /// Integer lattice spanned by `gens`; throws NotFullRank.
  static Lattice from_int(std::vector<IntVec> gens, std::size_t n) {
    return build(std::move(gens), Int(1), n);
  }

  static Lattice from_rat(const std::vector<RatVec>& gens, std::size_t n) {
    Int d = 1;
    for (const auto& g : gens) d = lcm(d, common_denominator(g));
    std::vector<IntVec> scaled;
    scaled.reserve(gens.size());
    for (const auto& g : gens) {
      IntVec row(n);
      for (std::size_t j = 0; j < n; ++j) {
        Rat x = g[j] * d;
        row[j] = x.get_num();
      }
      scaled.push_back(std::move(row));
    }
    return build(std::move(scaled), d, n);
  }

  static Lattice standard(std::size_t n) {
    std::vector<IntVec> g(n, IntVec(n, 0));
    for (std::size_t i = 0; i < n; ++i) g[i][i] = 1;
    return from_int(std::move(g), n);
  }

  /// The lattice generated by scale_i * e_i.
  static Lattice diagonal(const RatVec& scale) {
    const std::size_t n = scale.size();
    std::vector<RatVec> g(n, RatVec(n, 0));
    for (std::size_t i = 0; i < n; ++i) g[i][i] = scale[i];
    return from_rat(g, n);
  }

  std::size_t rank() const { return rows_.size(); }
  const Int& den() const { return den_; }
  const std::vector<IntVec>& rows() const { return rows_; }

  std::vector<RatVec> basis() const {
    std::vector<RatVec> out;
    for (const auto& row : rows_) {
      RatVec v(row.size());
      for (std::size_t j = 0; j < row.size(); ++j) v[j] = make_rat(row[j], den_);
      out.push_back(std::move(v));
    }
    return out;
  }

  /// Covolume; the rows are triangular so this is the diagonal product.
  Rat det() const {
    Int p = 1;
    for (std::size_t i = 0; i < rows_.size(); ++i) p *= rows_[i][i];
    Int dn = 1;
    for (std::size_t i = 0; i < rows_.size(); ++i) dn *= den_;
    return make_rat(p, dn);
  }

  bool contains(const RatVec& m) const {
    if (m.size() != rank()) return false;
    IntVec y(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
      Rat s = m[j] * den_;
      if (!is_integer(s)) return false;
      y[j] = s.get_num();
    }
    return coordinates_int(y).has_value();
  }

  bool contains(const IntVec& m) const { return contains(to_ratvec(m)); }

  /// Integer coordinates x with x * rows = y, if any.
  std::optional<IntVec> coordinates_int(const IntVec& y) const {
    const std::size_t n = rank();
    IntVec x(n);
    for (std::size_t j = 0; j < n; ++j) {
      Int rest = y[j];
      for (std::size_t i = 0; i < j; ++i) rest -= x[i] * rows_[i][j];
      if (!mpz_divisible_p(rest.get_mpz_t(), rows_[j][j].get_mpz_t())) return std::nullopt;
      x[j] = rest / rows_[j][j];
    }
    return x;
  }

  bool operator==(const Lattice& o) const { return den_ == o.den_ && rows_ == o.rows_; }
  bool operator!=(const Lattice& o) const { return !(*this == o); }

  std::string to_string() const {
    std::string s = "(1/" + den_.get_str() + ")[";
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i) s += "; ";
      for (std::size_t j = 0; j < rows_[i].size(); ++j) s += (j ? " " : "") + rows_[i][j].get_str();
    }
    return s + "]";
  }

 private:
  static Lattice build(std::vector<IntVec> gens, Int d, std::size_t n) {
    for (const auto& g : gens)
      if (g.size() != n) throw Error(ErrorCode::RankMismatch, "generator length differs from ambient rank");
    const std::size_t rk = hermite_rows(gens);
    if (rk < n) throw Error(ErrorCode::NotFullRank, "generators span rank " + std::to_string(rk) + " < " + std::to_string(n));
    gens.resize(n);
    Int g = d;
    for (const auto& row : gens)
      for (const auto& x : row) g = gcd(g, x);
    if (g != 1) {
      d /= g;
      for (auto& row : gens)
        for (auto& x : row) x /= g;
    }
    Lattice out;
    out.den_ = d;
    out.rows_ = std::move(gens);
    return out;
  }

  Int den_ = 1;
  std::vector<IntVec> rows_;
};

inline Lattice hnf(const std::vector<IntVec>& gens) {
  if (gens.empty()) throw Error(ErrorCode::NotFullRank, "no generators");
  return Lattice::from_int(gens, gens[0].size());
}

inline Lattice lattice_sum(const Lattice& a, const Lattice& b) {
  if (a.rank() != b.rank()) throw Error(ErrorCode::RankMismatch, "lattice_sum of different ranks");
  auto g = a.basis();
  auto h = b.basis();
  g.insert(g.end(), h.begin(), h.end());
  return Lattice::from_rat(g, a.rank());
}

inline Lattice lattice_intersection(const Lattice& a, const Lattice& b) {
  if (a.rank() != b.rank()) throw Error(ErrorCode::RankMismatch, "lattice_intersection of different ranks");
  const std::size_t n = a.rank();
  const Int d = lcm(a.den(), b.den());
  const Int fa = d / a.den(), fb = d / b.den();
  std::vector<IntVec> stacked;
  for (const auto& row : a.rows()) {
    IntVec v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = row[j] * fa;
    stacked.push_back(std::move(v));
  }
  for (const auto& row : b.rows()) {
    IntVec v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = -row[j] * fb;
    stacked.push_back(std::move(v));
  }
  auto ker = integer_left_kernel(stacked);
  std::vector<RatVec> gens;
  for (const auto& x : ker) {
    RatVec v(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) v[j] += Rat(x[i] * stacked[i][j]);
    for (auto& e : v) e /= d;
    gens.push_back(std::move(v));
  }
  return Lattice::from_rat(gens, n);
}

/// {m : <m, v> in Z for all v in L}.
inline Lattice dual_lattice(const Lattice& l) {
  const std::size_t n = l.rank();
  auto inv = inverse(to_ratmatrix(l.rows()));
  if (!inv) throw Error(ErrorCode::NotFullRank, "singular basis");
  // Columns of den * B^{-1}.
  std::vector<RatVec> gens(n, RatVec(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) gens[j][i] = (*inv)[i][j] * l.den();
  return Lattice::from_rat(gens, n);
}

/// [b : a]; throws NotContained unless a is a sublattice of b.
inline Int index_in(const Lattice& a, const Lattice& b) {
  if (a.rank() != b.rank()) throw Error(ErrorCode::RankMismatch, "index_in of different ranks");
  for (const auto& v : a.basis())
    if (!b.contains(v)) throw Error(ErrorCode::NotContained, "lattice " + a.to_string() + " not inside " + b.to_string());
  Rat q = a.det() / b.det();
  return q.get_num();
}

}  // namespace toricdk
