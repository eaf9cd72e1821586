// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

// Closed intervals with exact rational endpoints. All printing is directed:
// lower endpoints round down, upper endpoints round up.

#pragma once

#include "iwacensus/arith.hpp"

#include <algorithm>
#include <ostream>
#include <string>

namespace iwc {

struct Interval {
  Rational lo;
  Rational hi;

  Interval() = default;
  Interval(Rational v) : lo(v), hi(std::move(v)) {}  // NOLINT: implicit point interval
  Interval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) throw std::invalid_argument("Interval: lo > hi");
  }

  bool is_point() const { return lo == hi; }
  Rational width() const { return hi - lo; }
  Rational midpoint() const { return (lo + hi) / 2; }
  bool contains(const Rational& v) const { return lo <= v && v <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool positive() const { return lo > 0; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline Interval operator+(const Interval& x, const Interval& y) { return {x.lo + y.lo, x.hi + y.hi}; }
inline Interval operator-(const Interval& x, const Interval& y) { return {x.lo - y.hi, x.hi - y.lo}; }

inline Interval operator*(const Interval& x, const Interval& y) {
  Rational c[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

inline Interval operator/(const Interval& x, const Interval& y) {
  if (y.lo <= 0 && y.hi >= 0) throw std::domain_error("Interval division by an interval containing 0");
  return x * Interval(1 / y.hi, 1 / y.lo);
}

inline Interval pow(const Interval& x, unsigned e) {
  Interval r(Rational(1));
  for (unsigned i = 0; i < e; ++i) r = r * x;
  return r;
}

inline Interval intersect(const Interval& x, const Interval& y) {
  Rational lo = std::max(x.lo, y.lo), hi = std::min(x.hi, y.hi);
  if (lo > hi) throw std::domain_error("disjoint intervals");
  return {lo, hi};
}

inline BigInt floor_div(const BigInt& n, const BigInt& d) {
  BigInt q = n / d;
  if ((n % d != 0) && ((n < 0) != (d < 0))) --q;
  return q;
}

inline BigInt floor(const Rational& q) { return floor_div(numerator(q), denominator(q)); }
inline BigInt ceil(const Rational& q) { return -floor_div(-numerator(q), denominator(q)); }

// Widen to the dyadic grid 2^-bits; keeps endpoint sizes bounded.
inline Interval round_outward(const Interval& x, unsigned bits) {
  BigInt scale = BigInt(1) << bits;
  return {Rational(floor(x.lo * scale), scale), Rational(ceil(x.hi * scale), scale)};
}

// Enclosure of x^(5/6) for integer x >= 0, on the grid 2^-bits.
inline Interval pow_five_sixths(const BigInt& x, unsigned bits = 128) {
  BigInt scaled = ipow(x, 5) << (6 * bits);
  BigInt r = iroot(scaled, 6);
  BigInt den = BigInt(1) << bits;
  Rational lo(r, den);
  Rational hi = ipow(r, 6) == scaled ? lo : Rational(r + 1, den);
  return {lo, hi};
}

enum class Round { Down, Up };

// Scientific notation with `digits` significant digits, rounded in the
// given direction, e.g. "1.00099457e+0".
inline std::string to_scientific(const Rational& v, unsigned digits, Round dir) {
  if (v == 0) return "0";
  if (v < 0) {
    std::string s = to_scientific(-v, digits, dir == Round::Down ? Round::Up : Round::Down);
    return "-" + s;
  }
  // Find e with 10^e <= v < 10^(e+1).
  int e = 0;
  Rational t = v;
  while (t >= 10) {
    t /= 10;
    ++e;
  }
  while (t < 1) {
    t *= 10;
    --e;
  }
  BigInt p10 = ipow(BigInt(10), digits - 1);
  Rational scaled = t * p10;
  BigInt m = dir == Round::Down ? floor(scaled) : ceil(scaled);
  if (m >= p10 * 10) {
    m /= 10;  // only reachable when rounding up to a power of ten; m is then 10^digits exactly
    ++e;
  }
  std::string ms = m.str();
  std::string out = ms.substr(0, 1);
  if (ms.size() > 1) out += "." + ms.substr(1);
  out += "e";
  out += (e < 0 ? "-" : "+");
  out += std::to_string(e < 0 ? -e : e);
  return out;
}

// Nearest rounding, for display of a reproducible point estimate only.
inline std::string to_scientific_nearest(const Rational& v, unsigned digits) {
  if (v == 0) return "0";
  Rational a = v < 0 ? Rational(-v) : v;
  int e = 0;
  Rational t = a;
  while (t >= 10) {
    t /= 10;
    ++e;
  }
  while (t < 1) {
    t *= 10;
    --e;
  }
  BigInt p10 = ipow(BigInt(10), digits - 1);
  BigInt m = floor(t * p10 + Rational(1, 2));
  if (m >= p10 * 10) {
    m /= 10;
    ++e;
  }
  std::string ms = m.str();
  std::string out = (v < 0 ? "-" : "") + ms.substr(0, 1);
  if (ms.size() > 1) out += "." + ms.substr(1);
  out += "e";
  out += (e < 0 ? "-" : "+");
  out += std::to_string(e < 0 ? -e : e);
  return out;
}

inline std::string to_string(const Interval& x, unsigned digits = 12) {
  if (x.is_point() && denominator(x.lo) == 1) return numerator(x.lo).str();
  return "[" + to_scientific(x.lo, digits, Round::Down) + ", " + to_scientific(x.hi, digits, Round::Up) + "]";
}

inline std::ostream& operator<<(std::ostream& os, const Interval& x) { return os << to_string(x); }

}  // namespace iwc
