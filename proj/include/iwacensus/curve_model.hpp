// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

// Short Weierstrass models y^2 = x^3 + A x + B over Z, validated to be
// nonsingular and globally minimal, with eagerly cached invariants.

#pragma once

#include "iwacensus/arith.hpp"
#include "iwacensus/primes.hpp"

#include <compare>
#include <optional>
#include <ostream>

namespace iwc {

struct CurveInvariants {
  BigInt naive_discriminant;  // 4A^3 + 27B^2
  BigInt curve_discriminant;  // -16 (4A^3 + 27B^2)
  BigInt height;              // max(|A|^3, B^2)
  Rational j_invariant;       // 1728 * 4A^3 / (4A^3 + 27B^2)
};

class InvalidCurve : public std::invalid_argument {
 public:
  enum class Kind { Singular, NonMinimal };

  InvalidCurve(Kind kind, BigInt witness, const std::string& what)
      : std::invalid_argument(what), kind_(kind), witness_(std::move(witness)) {}

  Kind kind() const { return kind_; }
  // The prime l with l^4 | A and l^6 | B; zero for Singular.
  const BigInt& witness() const { return witness_; }

 private:
  Kind kind_;
  BigInt witness_;
};

inline BigInt naive_discriminant(const BigInt& a, const BigInt& b) { return 4 * a * a * a + 27 * b * b; }

inline BigInt height_of(const BigInt& a, const BigInt& b) {
  BigInt a3 = abs_big(a * a * a);
  BigInt b2 = b * b;
  return a3 > b2 ? a3 : b2;
}

// Smallest prime l with l^4 | a and l^6 | b, if any. (a, b) != (0, 0).
inline std::optional<BigInt> non_minimal_witness(const BigInt& a, const BigInt& b) {
  if (a == 0 && b == 0) throw std::domain_error("non_minimal_witness(0, 0)");
  BigInt g = gcd(abs_big(a), abs_big(b));
  if (g < 2) return std::nullopt;
  // Only primes up to min(|a|^(1/4), |b|^(1/6)) can qualify; zero coefficients impose no bound.
  std::optional<BigInt> bound;
  if (a != 0) bound = iroot(abs_big(a), 4);
  if (b != 0) {
    BigInt bb = iroot(abs_big(b), 6);
    if (!bound || bb < *bound) bound = bb;
  }
  auto qualifies = [&](const BigInt& l) {
    return (a == 0 || valuation(a, l) >= 4) && (b == 0 || valuation(b, l) >= 6);
  };
  BigInt rest = g;
  for (u64 p : small_primes()) {
    if (BigInt(p) > *bound) return std::nullopt;
    if (rest % p != 0) continue;
    if (qualifies(BigInt(p))) return BigInt(p);
    while (rest % p == 0) rest /= p;
    if (rest == 1) return std::nullopt;
  }
  Factorization f = factor(rest);
  if (!f.complete()) throw FactorizationError(f.unfactored);
  for (const auto& [l, e] : f.factors) {
    if (l > *bound) break;
    if (qualifies(l)) return l;
  }
  return std::nullopt;
}

class CurveModel {
 public:
  // Validating constructor; throws InvalidCurve.
  static CurveModel make(BigInt a, BigInt b) {
    if (iwc::naive_discriminant(a, b) == 0)
      throw InvalidCurve(InvalidCurve::Kind::Singular, 0,
                         "singular model (" + a.str() + ", " + b.str() + ")");
    if (auto w = non_minimal_witness(a, b))
      throw InvalidCurve(InvalidCurve::Kind::NonMinimal, *w,
                         "model (" + a.str() + ", " + b.str() + ") is not minimal at " + w->str());
    return CurveModel(std::move(a), std::move(b));
  }

  // For callers that have already established validity (sieved enumeration,
  // twisting a valid model).
  static CurveModel trusted(BigInt a, BigInt b) { return CurveModel(std::move(a), std::move(b)); }

  const BigInt& a() const { return a_; }
  const BigInt& b() const { return b_; }
  const CurveInvariants& invariants() const { return inv_; }
  const BigInt& height() const { return inv_.height; }
  const BigInt& naive_discriminant() const { return inv_.naive_discriminant; }
  const BigInt& curve_discriminant() const { return inv_.curve_discriminant; }
  const Rational& j_invariant() const { return inv_.j_invariant; }

  friend bool operator==(const CurveModel& x, const CurveModel& y) { return x.a_ == y.a_ && x.b_ == y.b_; }
  friend bool operator<(const CurveModel& x, const CurveModel& y) {
    return x.a_ < y.a_ || (x.a_ == y.a_ && x.b_ < y.b_);
  }

 private:
  CurveModel(BigInt a, BigInt b) : a_(std::move(a)), b_(std::move(b)) {
    inv_.naive_discriminant = iwc::naive_discriminant(a_, b_);
    inv_.curve_discriminant = -16 * inv_.naive_discriminant;
    inv_.height = height_of(a_, b_);
    inv_.j_invariant = Rational(1728 * 4 * a_ * a_ * a_) / Rational(inv_.naive_discriminant);
  }

  BigInt a_, b_;
  CurveInvariants inv_;
};

inline CurveModel new_curve(BigInt a, BigInt b) { return CurveModel::make(std::move(a), std::move(b)); }

inline std::ostream& operator<<(std::ostream& os, const CurveModel& c) {
  return os << "[" << c.a() << "," << c.b() << "]";
}

inline const BigInt& height(const CurveModel& c) { return c.height(); }

inline const Rational& j_invariant(const CurveModel& c) { return c.j_invariant(); }

// v_p(j); j != 0 required for a finite answer.
inline int j_valuation(const CurveModel& c, u64 p) { return valuation(c.j_invariant(), p); }

// E_{-1}: (A, B) -> (A, -B).
inline CurveModel twist_by_minus_one(const CurveModel& c) { return CurveModel::trusted(c.a(), -c.b()); }

struct OddPart {
  BigInt odd;  // sign of 4A^3 + 27B^2 retained
  int v2 = 0;
};

inline OddPart odd_part_of_naive_discriminant(const CurveModel& c) {
  OddPart out{c.naive_discriminant(), 0};
  while (bit_test(abs_big(out.odd), 0) == false) {
    out.odd /= 2;
    ++out.v2;
  }
  return out;
}

}  // namespace iwc
