// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

// Enumeration of C(X) = { minimal nonsingular (A, B) : max(|A|^3, B^2) <= X },
// full or restricted to a CRT lattice of residue classes, with A-range
// sharding for parallel workers.

#pragma once

#include "iwacensus/constants.hpp"
#include "iwacensus/curve_model.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace iwc {

class HeightBound {
 public:
  explicit HeightBound(BigInt x) : x_(std::move(x)) {
    if (x_ < 1) throw std::invalid_argument("height bound must be >= 1");
    BigInt am = iroot(x_, 3), bm = iroot(x_, 2);
    if (!(ipow(am, 3) <= x_ && x_ < ipow(am + 1, 3))) throw std::logic_error("cube root check failed");
    if (!(bm * bm <= x_ && x_ < (bm + 1) * (bm + 1))) throw std::logic_error("square root check failed");
    if (!fits_i64(bm) || bm > (i64(1) << 62)) throw std::out_of_range("height bound too large to enumerate");
    a_max_ = am.convert_to<i64>();
    b_max_ = bm.convert_to<i64>();
  }

  const BigInt& x() const { return x_; }
  i64 a_max() const { return a_max_; }
  i64 b_max() const { return b_max_; }

 private:
  BigInt x_;
  i64 a_max_ = 0;
  i64 b_max_ = 0;
};

// Half-open strip A in [a_lo, a_hi).
struct RangeShard {
  i64 a_lo = 0;
  i64 a_hi = 0;
  std::size_t index = 0;
};

// Contiguous strips of near-equal width covering [-A_max, A_max]; every A
// row carries the same number of B values, so equal widths balance work.
inline std::vector<RangeShard> shard(const HeightBound& bound, std::size_t jobs) {
  if (jobs < 1) throw std::invalid_argument("shard: jobs must be >= 1");
  const i64 lo = -bound.a_max(), hi = bound.a_max() + 1;
  const i64 total = hi - lo;
  std::vector<RangeShard> out;
  const i64 n = std::min<i64>(i64(jobs), total);
  for (i64 k = 0; k < n; ++k) {
    i64 s = lo + total * k / n;
    i64 e = lo + total * (k + 1) / n;
    out.push_back({s, e, std::size_t(k)});
  }
  return out;
}

// Shards with at most `rows` A-values each.
inline std::vector<RangeShard> shard_by_rows(const HeightBound& bound, i64 rows) {
  if (rows < 1) throw std::invalid_argument("shard_by_rows: rows must be >= 1");
  const i64 total = 2 * bound.a_max() + 1;
  return shard(bound, std::size_t((total + rows - 1) / rows));
}

namespace detail {

inline std::optional<i64> exact_isqrt(i64 v) {
  if (v < 0) return std::nullopt;
  i64 r = iroot(BigInt(v), 2).convert_to<i64>();
  return r * r == v ? std::optional<i64>(r) : std::nullopt;
}

// Per-row exclusion data: B is excluded when some listed l^6 divides B
// (non-minimal) or B is one of the singular values.
struct RowFilter {
  std::vector<i64> sixth_powers;
  std::vector<i64> singular_b;

  bool excluded(i64 b) const {
    for (i64 q : sixth_powers)
      if (b % q == 0) return true;
    for (i64 s : singular_b)
      if (b == s) return true;
    return false;
  }
  bool trivial() const { return sixth_powers.empty() && singular_b.empty(); }
};

class RowSieve {
 public:
  explicit RowSieve(const HeightBound& bound)
      : fourth_root_(iroot(BigInt(bound.a_max()), 4).convert_to<i64>()),
        sixth_root_(iroot(BigInt(bound.b_max()), 6).convert_to<i64>()) {
    primes_ = primes_up_to(u64(std::max(fourth_root_, sixth_root_)));
  }

  RowFilter filter(i64 a) const {
    RowFilter f;
    if (a == 0) {
      // B must be sixth-power-free; B = 0 is singular.
      for (u64 p : primes_)
        if (i64(p) <= sixth_root_) f.sixth_powers.push_back(ipow_u64(p, 6));
      f.singular_b.push_back(0);
      return f;
    }
    i64 m = a < 0 ? -a : a;
    for (u64 p : primes_) {
      if (i64(p) > fourth_root_) break;
      i64 p4 = i64(ipow_u64(p, 4));
      if (p4 > m) break;
      if (m % p4 == 0) {
        // l^6 may exceed every |B| in range; then only B = 0 is hit.
        BigInt p6 = ipow(BigInt(p), 6);
        f.sixth_powers.push_back(fits_i64(p6) ? p6.convert_to<i64>() : std::numeric_limits<i64>::max());
      }
    }
    // 4A^3 + 27B^2 = 0  <=>  A = -3t^2, B = +-2t^3.
    if (a < 0 && m % 3 == 0) {
      if (auto t = exact_isqrt(m / 3)) {
        i64 b = 2 * (*t) * (*t) * (*t);
        f.singular_b.push_back(b);
        f.singular_b.push_back(-b);
      }
    }
    return f;
  }

 private:
  i64 fourth_root_;
  i64 sixth_root_;
  std::vector<u64> primes_;
};

}  // namespace detail

// Visit every (A, B) in C(X) with A in [a_lo, a_hi), ascending (A, B).
// fn(i64 A, i64 B). Exact integer arithmetic only.
template <class Fn>
void for_each_pair(const HeightBound& bound, i64 a_lo, i64 a_hi, Fn&& fn) {
  detail::RowSieve sieve(bound);
  a_lo = std::max(a_lo, -bound.a_max());
  a_hi = std::min(a_hi, bound.a_max() + 1);
  const i64 bm = bound.b_max();
  for (i64 a = a_lo; a < a_hi; ++a) {
    detail::RowFilter f = sieve.filter(a);
    if (f.trivial()) {
      for (i64 b = -bm; b <= bm; ++b) fn(a, b);
    } else {
      for (i64 b = -bm; b <= bm; ++b)
        if (!f.excluded(b)) fn(a, b);
    }
  }
}

template <class Fn>
void for_each_pair(const HeightBound& bound, Fn&& fn) {
  for_each_pair(bound, -bound.a_max(), bound.a_max() + 1, std::forward<Fn>(fn));
}

// #C(X) restricted to A in [a_lo, a_hi), without visiting trivial rows.
inline u64 count_pairs(const HeightBound& bound, i64 a_lo, i64 a_hi) {
  detail::RowSieve sieve(bound);
  a_lo = std::max(a_lo, -bound.a_max());
  a_hi = std::min(a_hi, bound.a_max() + 1);
  const i64 bm = bound.b_max();
  u64 total = 0;
  for (i64 a = a_lo; a < a_hi; ++a) {
    detail::RowFilter f = sieve.filter(a);
    if (f.trivial()) {
      total += u64(2 * bm + 1);
      continue;
    }
    for (i64 b = -bm; b <= bm; ++b)
      if (!f.excluded(b)) ++total;
  }
  return total;
}

enum class Order { Lexicographic, Height };

// Materialized enumeration; height order sorts by (height, A, B).
inline std::vector<CurveModel> enumerate_curves(const HeightBound& bound, Order order = Order::Lexicographic) {
  std::vector<CurveModel> out;
  for_each_pair(bound, [&](i64 a, i64 b) { out.push_back(CurveModel::trusted(a, b)); });
  if (order == Order::Height) {
    std::stable_sort(out.begin(), out.end(), [](const CurveModel& x, const CurveModel& y) {
      if (x.height() != y.height()) return x.height() < y.height();
      return x < y;
    });
  }
  return out;
}

inline std::vector<CurveModel> enumerate_curves(const HeightBound& bound, const RangeShard& s) {
  std::vector<CurveModel> out;
  for_each_pair(bound, s.a_lo, s.a_hi, [&](i64 a, i64 b) { out.push_back(CurveModel::trusted(a, b)); });
  return out;
}

struct CurveCount {
  u64 count = 0;
  // count * zeta(10) / (4 X^(5/6)).
  Interval brumer_ratio;
};

inline Interval brumer_prediction(const BigInt& x, const Interval& zeta10) {
  return Interval(Rational(4)) * pow_five_sixths(x) / zeta10;
}

inline CurveCount count_curves(const HeightBound& bound) {
  CurveCount out;
  out.count = count_pairs(bound, -bound.a_max(), bound.a_max() + 1);
  Interval z = zeta_10(Rational(1, 1000000000000LL)).value;
  out.brumer_ratio = round_outward(Interval(Rational(out.count)) / brumer_prediction(bound.x(), z), 128);
  return out;
}

// --- Lattice enumeration -------------------------------------------------

// Residue pairs (A mod M, B mod M).
struct ResidueClassSet {
  u64 modulus = 1;
  std::vector<std::pair<u64, u64>> pairs;
};

inline ResidueClassSet all_residues() { return {1, {{0, 0}}}; }

// CRT-combine class sets with pairwise coprime moduli.
inline ResidueClassSet combine(const std::vector<ResidueClassSet>& sets) {
  ResidueClassSet acc = all_residues();
  for (const auto& s : sets) {
    if (std::gcd(acc.modulus, s.modulus) != 1) throw std::invalid_argument("combine: moduli not coprime");
    const u64 m1 = acc.modulus, m2 = s.modulus;
    if (m1 > std::numeric_limits<u64>::max() / m2) throw std::overflow_error("combine: modulus overflow");
    const u64 m = m1 * m2;
    // x = r1 + m1 * ((r2 - r1) * inv(m1) mod m2)
    const u64 inv = m2 == 1 ? 0 : inverse_mod(BigInt(m1 % m2), BigInt(m2)).convert_to<u64>();
    auto crt = [&](u64 r1, u64 r2) {
      u64 d = (r2 % m2 + m2 - r1 % m2) % m2;
      return r1 + m1 * mulmod(d, inv, m2);
    };
    ResidueClassSet next{m, {}};
    for (auto [a1, b1] : acc.pairs)
      for (auto [a2, b2] : s.pairs) next.pairs.emplace_back(crt(a1, a2), crt(b1, b2));
    std::sort(next.pairs.begin(), next.pairs.end());
    acc = std::move(next);
  }
  return acc;
}

namespace detail {

inline i64 first_at_least(i64 lo, u64 residue, u64 modulus) {
  // smallest v >= lo with v = residue mod modulus
  i64 m = i64(modulus);
  i64 r = i64(residue % modulus);
  i64 base = lo - (((lo % m) + m) % m) + r;
  return base < lo ? base + m : base;
}

}  // namespace detail

// Visit members of C(X) whose residues lie in the combined classes, with
// optional A > 0; ascending (A, B). fn(i64 A, i64 B).
template <class Fn>
void for_each_in_lattice(const std::vector<ResidueClassSet>& classes, const HeightBound& bound, bool positive_a,
                         Fn&& fn, i64 a_lo = std::numeric_limits<i64>::min(),
                         i64 a_hi = std::numeric_limits<i64>::max()) {
  ResidueClassSet c = combine(classes);
  if (c.pairs.empty()) return;
  std::map<u64, std::vector<u64>> by_a;
  for (auto [a, b] : c.pairs) by_a[a].push_back(b);
  const i64 am = bound.a_max(), bm = bound.b_max();
  i64 lo = std::max(-am, positive_a ? i64(1) : -am);
  lo = std::max(lo, a_lo);
  const i64 hi = std::min(am + 1, a_hi);
  const i64 m = i64(c.modulus);
  detail::RowSieve sieve(bound);
  // Collect per-row so output is ascending in (A, B).
  std::vector<std::pair<i64, const std::vector<u64>*>> rows;
  for (const auto& [ra, bs] : by_a)
    for (i64 a = detail::first_at_least(lo, ra, c.modulus); a < hi; a += m) rows.emplace_back(a, &bs);
  std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<i64> row_b;
  for (const auto& [a, bs] : rows) {
    detail::RowFilter f = sieve.filter(a);
    row_b.clear();
    for (u64 rb : *bs)
      for (i64 b = detail::first_at_least(-bm, rb, c.modulus); b <= bm; b += m)
        if (!f.excluded(b)) row_b.push_back(b);
    std::sort(row_b.begin(), row_b.end());
    for (i64 b : row_b) fn(a, b);
  }
}

inline std::vector<CurveModel> enumerate_in_lattice(const std::vector<ResidueClassSet>& classes,
                                                    const HeightBound& bound, bool positive_a) {
  std::vector<CurveModel> out;
  for_each_in_lattice(classes, bound, positive_a, [&](i64 a, i64 b) { out.push_back(CurveModel::trusted(a, b)); });
  return out;
}

// Raw lattice points in the height box, before the singular and minimality
// exclusions.
inline u64 count_lattice_points(const std::vector<ResidueClassSet>& classes, const HeightBound& bound,
                                bool positive_a) {
  ResidueClassSet c = combine(classes);
  const i64 am = bound.a_max(), bm = bound.b_max();
  const i64 lo = positive_a ? 1 : -am;
  auto count_in = [&](i64 from, i64 to, u64 r) -> u64 {
    if (from > to) return 0;
    i64 first = detail::first_at_least(from, r, c.modulus);
    return first > to ? 0 : u64((to - first) / i64(c.modulus) + 1);
  };
  u64 total = 0;
  for (auto [ra, rb] : c.pairs) total += count_in(lo, am, ra) * count_in(-bm, bm, rb);
  return total;
}

}  // namespace iwc
