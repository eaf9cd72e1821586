// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

// Prime sieve, Miller-Rabin, and a trial-division + Pollard-Brent factoring
// backend for discriminants.

#pragma once

#include "iwacensus/arith.hpp"

#include <algorithm>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace iwc {

inline std::vector<u64> primes_up_to(u64 n) {
  std::vector<u64> out;
  if (n < 2) return out;
  std::vector<bool> composite(n + 1, false);
  for (u64 i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (u64 j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

constexpr u64 kTrialDivisionBound = 1'000'000;

// Shared, immutable after first use.
inline const std::vector<u64>& small_primes() {
  static const std::vector<u64> table = primes_up_to(kTrialDivisionBound);
  return table;
}

inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // This base set is deterministic for all n < 2^64.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

// Bound below which the first thirteen prime bases are a proof of primality.
inline const BigInt& mr_certified_bound() {
  static const BigInt b("3317044064679887385961981");
  return b;
}

enum class Primality { Composite, Prime, ProbablePrime };

inline Primality primality(const BigInt& n) {
  if (n < 2) return Primality::Composite;
  if (n <= std::numeric_limits<u64>::max())
    return is_prime_u64(n.convert_to<u64>()) ? Primality::Prime : Primality::Composite;
  static const u64 bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  for (u64 p : bases)
    if (n % p == 0) return Primality::Composite;
  BigInt d = n - 1;
  unsigned s = 0;
  while (!bit_test(d, 0)) {
    d >>= 1;
    ++s;
  }
  for (u64 a : bases) {
    BigInt x = powm(BigInt(a), d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (unsigned r = 1; r < s; ++r) {
      x = x * x % n;
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return Primality::Composite;
  }
  return n < mr_certified_bound() ? Primality::Prime : Primality::ProbablePrime;
}

namespace detail {

inline u64 gcd_u64(u64 a, u64 b) { return std::gcd(a, b); }

// Brent's variant of Pollard rho; returns a nontrivial factor or 0 on failure.
inline u64 rho_u64(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1; c < 64; ++c) {
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    u64 r = 1;
    const u64 m = 128;
    auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = gcd_u64(q, n);
        k += m;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1 && r < (u64(1) << 40));
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd_u64(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n && g != 1) return g;
  }
  return 0;
}

inline BigInt rho_big(const BigInt& n, unsigned long iteration_budget) {
  for (unsigned c = 1; c < 16; ++c) {
    BigInt x = 2, y = 2, d = 1;
    unsigned long steps = 0;
    auto f = [&](const BigInt& v) { return (v * v + c) % n; };
    while (d == 1 && steps++ < iteration_budget) {
      x = f(x);
      y = f(f(y));
      d = gcd(abs_big(x - y), n);
    }
    if (d != 1 && d != n) return d;
  }
  return 0;
}

}  // namespace detail

struct Factorization {
  // Prime factors in ascending order with exponents.
  std::vector<std::pair<BigInt, int>> factors;
  // Product of the parts that could not be split or certified; 1 when complete.
  BigInt unfactored = 1;

  bool complete() const { return unfactored == 1; }

  int exponent_of(const BigInt& p) const {
    for (const auto& [q, e] : factors)
      if (q == p) return e;
    return 0;
  }
};

class FactorizationError : public std::runtime_error {
 public:
  explicit FactorizationError(BigInt cofactor)
      : std::runtime_error("unable to factor cofactor " + cofactor.str()), cofactor_(std::move(cofactor)) {}
  const BigInt& cofactor() const { return cofactor_; }

 private:
  BigInt cofactor_;
};

namespace detail {

inline void split_into(const BigInt& n, std::vector<BigInt>& primes, BigInt& unfactored) {
  if (n == 1) return;
  Primality pr = primality(n);
  if (pr == Primality::Prime) {
    primes.push_back(n);
    return;
  }
  if (pr == Primality::ProbablePrime) {
    unfactored *= n;
    return;
  }
  BigInt d;
  if (n <= std::numeric_limits<u64>::max()) {
    d = rho_u64(n.convert_to<u64>());
  } else {
    d = rho_big(n, 2'000'000);
  }
  if (d == 0) {
    unfactored *= n;
    return;
  }
  split_into(d, primes, unfactored);
  split_into(n / d, primes, unfactored);
}

}  // namespace detail

// Factor |n| for n != 0. Trial division by primes below 10^6, then
// Miller-Rabin and Pollard-Brent on the cofactor.
inline Factorization factor(const BigInt& n) {
  if (n == 0) throw std::domain_error("factor(0)");
  Factorization out;
  BigInt m = abs_big(n);
  std::vector<BigInt> found;
  if (m <= std::numeric_limits<u64>::max()) {
    u64 v = m.convert_to<u64>();
    for (u64 p : small_primes()) {
      if (p * p > v) break;
      if (v % p == 0) {
        int e = 0;
        while (v % p == 0) {
          v /= p;
          ++e;
        }
        out.factors.emplace_back(BigInt(p), e);
      }
    }
    m = v;
  } else {
    for (u64 p : small_primes()) {
      if (BigInt(p) * p > m) break;
      if (m % p == 0) {
        int e = 0;
        while (m % p == 0) {
          m /= p;
          ++e;
        }
        out.factors.emplace_back(BigInt(p), e);
      }
    }
  }
  if (m > 1) {
    detail::split_into(m, found, out.unfactored);
  }
  std::sort(found.begin(), found.end());
  for (const auto& p : found) {
    if (!out.factors.empty() && out.factors.back().first == p)
      ++out.factors.back().second;
    else
      out.factors.emplace_back(p, 1);
  }
  std::sort(out.factors.begin(), out.factors.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

}  // namespace iwc
