// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

// Exact integer and rational arithmetic shared by every module.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace iwc {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

inline BigInt to_big(i128 v) {
  bool neg = v < 0;
  u128 m = neg ? u128(0) - u128(v) : u128(v);
  BigInt r = BigInt(u64(m >> 64));
  r <<= 64;
  r += u64(m);
  return neg ? BigInt(-r) : r;
}

inline bool fits_i64(const BigInt& v) {
  return v >= std::numeric_limits<i64>::min() && v <= std::numeric_limits<i64>::max();
}

inline BigInt abs_big(const BigInt& v) { return v < 0 ? BigInt(-v) : v; }

// Least nonnegative residue.
inline BigInt mod(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

inline u64 mod_u64(const BigInt& a, u64 m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r.convert_to<u64>();
}

inline BigInt ipow(const BigInt& b, unsigned e) { return boost::multiprecision::pow(b, e); }

inline u64 ipow_u64(u64 b, unsigned e) {
  u64 r = 1;
  while (e--) {
    if (b != 0 && r > std::numeric_limits<u64>::max() / b)
      throw std::overflow_error("ipow_u64 overflow");
    r *= b;
  }
  return r;
}

// v_p(n) for n != 0. Returns a large sentinel for n == 0.
inline int valuation(BigInt n, const BigInt& p) {
  if (n == 0) return std::numeric_limits<int>::max();
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

inline int valuation(BigInt n, u64 p) { return valuation(std::move(n), BigInt(p)); }

inline int valuation(const Rational& q, u64 p) {
  if (q == 0) return std::numeric_limits<int>::max();
  return valuation(BigInt(numerator(q)), p) - valuation(BigInt(denominator(q)), p);
}

// floor(n^(1/k)) for n >= 0, exact.
inline BigInt iroot(const BigInt& n, unsigned k) {
  if (n < 0) throw std::domain_error("iroot of negative value");
  if (n < 2 || k == 1) return n;
  unsigned bits = unsigned(boost::multiprecision::msb(n)) + 1;
  BigInt r = 0;
  for (int bit = int(bits / k) + 1; bit >= 0; --bit) {
    BigInt cand = r | (BigInt(1) << bit);
    if (ipow(cand, k) <= n) r = cand;
  }
  return r;
}

inline BigInt inverse_mod(const BigInt& a, const BigInt& m) {
  BigInt g = m, x = 0, x1 = 1, a1 = mod(a, m);
  while (a1 != 0) {
    BigInt q = g / a1;
    BigInt t = g - q * a1;
    g = a1;
    a1 = t;
    t = x - q * x1;
    x = x1;
    x1 = t;
  }
  if (g != 1) throw std::domain_error("inverse_mod: not invertible");
  return mod(x, m);
}

// Jacobi symbol (a/n) for odd n > 0.
inline int jacobi(BigInt a, BigInt n) {
  if (n <= 0 || n % 2 == 0) throw std::domain_error("jacobi: modulus must be odd and positive");
  a = mod(a, n);
  int s = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      u64 r = mod_u64(n, 8);
      if (r == 3 || r == 5) s = -s;
    }
    std::swap(a, n);
    if (mod_u64(a, 4) == 3 && mod_u64(n, 4) == 3) s = -s;
    a = mod(a, n);
  }
  return n == 1 ? s : 0;
}

inline u64 mulmod(u64 a, u64 b, u64 m) { return u64(u128(a) * b % m); }

inline u64 powmod(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

inline std::string to_string(const BigInt& v) { return v.str(); }

inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

inline BigInt parse_bigint(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty integer");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw std::invalid_argument("bad integer: " + s);
  for (std::size_t k = i; k < s.size(); ++k)
    if (s[k] < '0' || s[k] > '9') throw std::invalid_argument("bad integer: " + s);
  BigInt v(s.substr(i));
  return s[0] == '-' ? BigInt(-v) : v;
}

}  // namespace iwc
