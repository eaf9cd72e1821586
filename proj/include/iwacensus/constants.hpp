// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

// Rigorous enclosures of zeta(10), pi, and the Euler product
// prod_{l >= 7} (1 - 2 l^-2 + l^-3).

#pragma once

#include "iwacensus/interval.hpp"
#include "iwacensus/primes.hpp"

#include <optional>
#include <string>

namespace iwc {

struct EulerProductValue {
  Interval value;
  std::string description;
  // Exact partial product, when it was kept exact.
  std::optional<Rational> exact_partial;

  const Rational& lower() const { return value.lo; }
  const Rational& upper() const { return value.hi; }
};

namespace detail {

// Width of the zeta(10) enclosure obtained from N terms:
// N^-9/9 - (N+1)^-9/9.
inline Rational zeta10_width(u64 n) {
  return Rational(1, 9 * ipow(BigInt(n), 9)) - Rational(1, 9 * ipow(BigInt(n + 1), 9));
}

}  // namespace detail

// zeta(10) from the partial sum S_N and the integral tail
//   (N+1)^-9/9 <= sum_{n>N} n^-10 <= N^-9/9,
// with the smallest N >= 2 whose enclosure width is at most `width`.
// Smaller widths give nested enclosures.
inline EulerProductValue zeta_10(const Rational& width) {
  if (width <= 0) throw std::invalid_argument("zeta_10: width must be positive");
  u64 n = 2;
  while (detail::zeta10_width(n) > width) ++n;
  Rational s = 0;
  for (u64 k = 1; k <= n; ++k) s += Rational(1, ipow(BigInt(k), 10));
  Interval v(s + Rational(1, 9 * ipow(BigInt(n + 1), 9)), s + Rational(1, 9 * ipow(BigInt(n), 9)));
  return {v, "zeta(10), partial sum to N=" + std::to_string(n) + " with integral tail", std::nullopt};
}

namespace detail {

// arctan(1/x) by its alternating series; consecutive partial sums bracket it.
inline Interval arctan_inverse(u64 x, unsigned terms) {
  Rational s = 0, prev = 0;
  BigInt xp = x;  // x^(2k+1)
  BigInt x2 = BigInt(x) * x;
  for (unsigned k = 0; k <= terms; ++k) {
    prev = s;
    Rational term(1, (2 * k + 1) * xp);
    s += (k % 2 == 0) ? term : Rational(-term);
    xp *= x2;
  }
  return prev < s ? Interval(prev, s) : Interval(s, prev);
}

}  // namespace detail

// pi = 16 arctan(1/5) - 4 arctan(1/239).
inline Interval pi_interval(unsigned terms = 40) {
  Interval a = detail::arctan_inverse(5, terms);
  Interval b = detail::arctan_inverse(239, terms);
  return Interval(Rational(16)) * a - Interval(Rational(4)) * b;
}

// zeta(10) = pi^10 / 93555.
inline Interval zeta_10_closed_form(unsigned terms = 40) {
  return pow(pi_interval(terms), 10) / Interval(Rational(93555));
}

inline Rational pi_default_factor(u64 l) {
  BigInt l3 = ipow(BigInt(l), 3);
  return Rational(l3 - 2 * l + 1, l3);
}

constexpr u64 kExactEulerCutoff = 1000;

// prod_{7 <= l <= z} (1 - 2 l^-2 + l^-3) times the tail enclosure
// [1 - 2/z, 1]; each omitted factor lies in (1 - 2 l^-2, 1) and
// sum_{n > z} n^-2 < 1/z. Past 1000 the partial product is carried as a
// dyadic bracket with `bits` fractional bits.
inline EulerProductValue euler_product_ge7(u64 z, unsigned bits = 256) {
  if (z < 7) throw std::invalid_argument("euler_product_ge7: cutoff must be >= 7");
  const std::vector<u64>& ps = z <= kTrialDivisionBound ? small_primes() : primes_up_to(z);
  Rational exact = 1;
  std::size_t i = 0;
  for (; i < ps.size() && ps[i] <= std::min(z, kExactEulerCutoff); ++i)
    if (ps[i] >= 7) exact *= pi_default_factor(ps[i]);
  Interval tail(Rational(1) - Rational(2, z), Rational(1));
  if (z <= kExactEulerCutoff) {
    return {Interval(exact) * tail, "prod_{7<=l<=" + std::to_string(z) + "} exact, tail [1-2/Z, 1]", exact};
  }
  BigInt scale = BigInt(1) << bits;
  BigInt lo = floor(exact * scale), hi = ceil(exact * scale);
  for (; i < ps.size() && ps[i] <= z; ++i) {
    u64 l = ps[i];
    BigInt den = ipow(BigInt(l), 3);
    BigInt num = den - 2 * l + 1;
    lo = floor_div(lo * num, den);
    hi = -floor_div(-(hi * num), den);
  }
  Interval partial(Rational(lo, scale), Rational(hi, scale));
  return {partial * tail, "prod_{7<=l<=" + std::to_string(z) + "} bracketed at 2^-" + std::to_string(bits) +
                              ", tail [1-2/Z, 1]",
          std::nullopt};
}

// Rational pieces of the density of the family E and of the final lower
// bound. Local factors are the minimal-measure values (1 - l^-10) d(E_l).
inline const Rational& e2_measure() {
  static const Rational v(1, 4194304);
  return v;
}
inline const Rational& e5_measure() {
  static const Rational v(2, 25);
  return v;
}
inline const Rational& e_explicit_part() {
  static const Rational v(1, 52428800);
  return v;
}
inline const Rational& bound_rational_part() {
  static const Rational v(1, 157286400);
  return v;
}
// Fraction of E with vanishing 5-Selmer group guaranteed by the average size 6.
inline const Rational& selmer_vanishing_fraction() {
  static const Rational v(3, 8);
  return v;
}
// Local factor at 3 as published, 1 - 3^-2.
inline const Rational& local3_published() {
  static const Rational v(8, 9);
  return v;
}

struct IdentityCheck {
  std::string name;
  Rational lhs;
  Rational rhs;
  bool holds() const { return lhs == rhs; }
};

inline std::vector<IdentityCheck> constant_identities() {
  return {
      {"e2_times_e5_equals_1/52428800", e2_measure() * e5_measure(), e_explicit_part()},
      {"3/8_times_8/9_times_1/52428800_equals_1/157286400",
       selmer_vanishing_fraction() * local3_published() * e_explicit_part(), bound_rational_part()},
  };
}

// zeta(10) * prod_{l >= 7}(1 - 2 l^-2 + l^-3) / 157286400.
inline EulerProductValue bound_constant(u64 euler_cutoff = 1'000'000,
                                          const Rational& zeta_width = Rational(1, 1000000000000LL)) {
  EulerProductValue z = zeta_10(zeta_width);
  EulerProductValue p = euler_product_ge7(euler_cutoff);
  Interval v = z.value * p.value * Interval(bound_rational_part());
  return {round_outward(v, 256), "zeta(10) * prod_{l>=7}(1-2l^-2+l^-3) / 157286400", std::nullopt};
}

}  // namespace iwc
