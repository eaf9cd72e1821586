// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

// Local reduction data. Tate's algorithm runs on general Weierstrass
// quintuples so that non-minimal short models at 2 and 3 are handled by
// the u = l rescaling loop. Frobenius traces come from a character sum.

#pragma once

#include "iwacensus/curve_model.hpp"
#include "iwacensus/primes.hpp"

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>

namespace iwc {

// ---- Kodaira symbols -----------------------------------------------------

struct Kodaira {
  enum class Kind { I0, In, II, III, IV, I0Star, InStar, IVStar, IIIStar, IIStar };
  Kind kind = Kind::I0;
  int n = 0;  // for In and InStar

  static Kodaira I(int n) { return n == 0 ? Kodaira{Kind::I0, 0} : Kodaira{Kind::In, n}; }
  static Kodaira IStar(int n) { return n == 0 ? Kodaira{Kind::I0Star, 0} : Kodaira{Kind::InStar, n}; }

  friend bool operator==(const Kodaira&, const Kodaira&) = default;

  // Number of irreducible components of the special fibre.
  int components() const {
    switch (kind) {
      case Kind::I0: return 1;
      case Kind::In: return n;
      case Kind::II: return 1;
      case Kind::III: return 2;
      case Kind::IV: return 3;
      case Kind::I0Star: return 5;
      case Kind::InStar: return 5 + n;
      case Kind::IVStar: return 7;
      case Kind::IIIStar: return 8;
      case Kind::IIStar: return 9;
    }
    return 0;
  }
};

inline std::string to_string(const Kodaira& k) {
  using K = Kodaira::Kind;
  switch (k.kind) {
    case K::I0: return "I0";
    case K::In: return "I" + std::to_string(k.n);
    case K::II: return "II";
    case K::III: return "III";
    case K::IV: return "IV";
    case K::I0Star: return "I0*";
    case K::InStar: return "I" + std::to_string(k.n) + "*";
    case K::IVStar: return "IV*";
    case K::IIIStar: return "III*";
    case K::IIStar: return "II*";
  }
  return "?";
}

inline std::ostream& operator<<(std::ostream& os, const Kodaira& k) { return os << to_string(k); }

inline Kodaira parse_kodaira(const std::string& s) {
  using K = Kodaira::Kind;
  if (s == "II") return {K::II, 0};
  if (s == "III") return {K::III, 0};
  if (s == "IV") return {K::IV, 0};
  if (s == "IV*") return {K::IVStar, 0};
  if (s == "III*") return {K::IIIStar, 0};
  if (s == "II*") return {K::IIStar, 0};
  if (s.size() >= 2 && s[0] == 'I') {
    bool star = s.back() == '*';
    std::string digits = s.substr(1, s.size() - 1 - (star ? 1 : 0));
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad Kodaira symbol: " + s);
    int n = std::stoi(digits);
    return star ? Kodaira::IStar(n) : Kodaira::I(n);
  }
  throw std::invalid_argument("bad Kodaira symbol: " + s);
}

enum class ReductionType { Good, SplitMultiplicative, NonsplitMultiplicative, Additive };

inline std::string to_string(ReductionType t) {
  switch (t) {
    case ReductionType::Good: return "good";
    case ReductionType::SplitMultiplicative: return "split";
    case ReductionType::NonsplitMultiplicative: return "nonsplit";
    case ReductionType::Additive: return "additive";
  }
  return "?";
}

struct ReductionData {
  BigInt ell;
  ReductionType type = ReductionType::Good;
  Kodaira kodaira;
  int v_min = 0;  // valuation of the minimal discriminant
  int f = 0;      // conductor exponent
  int c = 1;      // Tamagawa number
  int restarts = 0;
};

// ---- Weierstrass quintuples ----------------------------------------------

struct Weierstrass {
  BigInt a1, a2, a3, a4, a6;

  BigInt b2() const { return a1 * a1 + 4 * a2; }
  BigInt b4() const { return 2 * a4 + a1 * a3; }
  BigInt b6() const { return a3 * a3 + 4 * a6; }
  BigInt b8() const { return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4; }
  BigInt c4() const {
    BigInt x = b2();
    return x * x - 24 * b4();
  }
  BigInt c6() const {
    BigInt x = b2();
    return -x * x * x + 36 * x * b4() - 216 * b6();
  }
  BigInt discriminant() const {
    BigInt x2 = b2(), x4 = b4(), x6 = b6(), x8 = b8();
    return -x2 * x2 * x8 - 8 * x4 * x4 * x4 - 27 * x6 * x6 + 9 * x2 * x4 * x6;
  }

  // x = X + r, y = Y + sX + t.
  Weierstrass rst(const BigInt& r, const BigInt& s, const BigInt& t) const {
    Weierstrass w;
    w.a1 = a1 + 2 * s;
    w.a2 = a2 - s * a1 + 3 * r - s * s;
    w.a3 = a3 + r * a1 + 2 * t;
    w.a4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t;
    w.a6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
    return w;
  }

  // Divide a_i by u^i; caller guarantees divisibility.
  Weierstrass scaled_down(const BigInt& u) const {
    BigInt u2 = u * u, u3 = u2 * u;
    return {a1 / u, a2 / u2, a3 / u3, a4 / (u2 * u2), a6 / (u3 * u3)};
  }

  friend bool operator==(const Weierstrass&, const Weierstrass&) = default;
};

namespace detail {

class PrimeField {
 public:
  explicit PrimeField(BigInt p) : p_(std::move(p)) {}
  const BigInt& p() const { return p_; }

  BigInt red(const BigInt& x) const { return mod(x, p_); }
  bool divides(const BigInt& x) const { return x % p_ == 0; }
  BigInt inv(const BigInt& x) const { return inverse_mod(x, p_); }

  bool is_square(const BigInt& x) const {
    BigInt v = red(x);
    if (v == 0 || p_ == 2) return true;
    return jacobi(v, p_) == 1;
  }

  // Does a x^2 + b x + c have a root in F_p?
  bool quad_has_root(const BigInt& a, const BigInt& b, const BigInt& c) const {
    BigInt ra = red(a), rb = red(b), rc = red(c);
    if (ra == 0) return rb != 0 || rc == 0;
    if (p_ == 2) return rc == 0 || red(ra + rb + rc) == 0;
    return is_square(rb * rb - 4 * ra * rc);
  }

  // Number of distinct roots in F_p of x^3 + b x^2 + c x + d.
  int cubic_root_count(const BigInt& b, const BigInt& c, const BigInt& d) const {
    if (p_ < 64) {
      u64 p = p_.convert_to<u64>();
      int k = 0;
      for (u64 x = 0; x < p; ++x) {
        BigInt v = ((BigInt(x) + b) * x + c) * x + d;
        if (divides(v)) ++k;
      }
      return k;
    }
    // deg gcd(f, x^p - x) for squarefree parts is messy; count via
    // gcd(f, x^p - x), then separate repeated roots with the derivative.
    using Poly = std::vector<BigInt>;  // ascending coefficients mod p
    auto trim = [](Poly& f) {
      while (!f.empty() && f.back() == 0) f.pop_back();
    };
    auto polymod = [&](Poly a, const Poly& m) {
      trim(a);
      BigInt lead_inv = inv(m.back());
      while (a.size() >= m.size()) {
        BigInt q = red(a.back() * lead_inv);
        std::size_t shift = a.size() - m.size();
        for (std::size_t i = 0; i < m.size(); ++i) a[shift + i] = red(a[shift + i] - q * m[i]);
        trim(a);
      }
      return a;
    };
    auto mulmod_poly = [&](const Poly& x, const Poly& y, const Poly& m) {
      if (x.empty() || y.empty()) return Poly{};
      Poly r(x.size() + y.size() - 1, BigInt(0));
      for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) r[i + j] = red(r[i + j] + x[i] * y[j]);
      return polymod(r, m);
    };
    auto gcd_poly = [&](Poly a, Poly b) {
      trim(a);
      trim(b);
      while (!b.empty()) {
        Poly r = polymod(a, b);
        a = std::move(b);
        b = std::move(r);
      }
      return a;
    };
    Poly f = {red(d), red(c), red(b), BigInt(1)};
    // x^p mod f
    Poly result = {BigInt(1)}, base = {BigInt(0), BigInt(1)};
    BigInt e = p_;
    while (e > 0) {
      if (bit_test(e, 0)) result = mulmod_poly(result, base, f);
      base = mulmod_poly(base, base, f);
      e >>= 1;
    }
    result.resize(std::max<std::size_t>(result.size(), 2), BigInt(0));
    result[1] = red(result[1] - 1);
    Poly g = gcd_poly(f, result);
    return int(g.size()) - 1;
  }

 private:
  BigInt p_;
};

inline BigInt div_exact(const BigInt& x, const BigInt& d) { return x / d; }

}  // namespace detail

// Tate's algorithm for y^2 = x^3 + A x + B at the prime l.
inline ReductionData tate_local(const Weierstrass& input, const BigInt& ell) {
  const BigInt& p = ell;
  detail::PrimeField F(p);
  const BigInt p2 = p * p, p3 = p2 * p, p4 = p3 * p;
  const int v_input = valuation(input.discriminant(), p);
  Weierstrass w = input;
  ReductionData out;
  out.ell = p;
  const BigInt half = p == 2 ? BigInt(0) : F.inv(BigInt(2));

  for (;;) {
    const BigInt delta = w.discriminant();
    const int vd = valuation(delta, p);
    if (vd == 0) {
      out.type = ReductionType::Good;
      out.kodaira = Kodaira::I(0);
      out.f = 0;
      out.c = 1;
      out.v_min = 0;
      break;
    }
    // Move the singular point to (0, 0): l | a3, a4, a6.
    BigInt r, t;
    {
      BigInt b2 = w.b2();
      if (p == 2) {
        if (F.divides(b2)) {
          r = F.red(w.a4);
          t = F.red(((r + w.a2) * r + w.a4) * r + w.a6);
        } else {
          BigInt a1inv = F.inv(w.a1);
          r = F.red(a1inv * w.a3);
          t = F.red(a1inv * (w.a4 + r * r));
        }
      } else if (p == 3) {
        if (F.divides(b2))
          r = F.red(-w.b6());
        else
          r = F.red(-F.inv(b2) * w.b4());
        t = F.red(w.a1 * r + w.a3);
      } else {
        BigInt c4 = w.c4();
        if (F.divides(c4))
          r = F.red(-F.inv(BigInt(12)) * b2);
        else
          r = F.red(-F.inv(12 * c4) * (w.c6() + b2 * c4));
        t = F.red(-half * (w.a1 * r + w.a3));
      }
    }
    w = w.rst(r, 0, t);

    if (!F.divides(w.c4())) {
      // Multiplicative reduction, type I_n.
      out.kodaira = Kodaira::I(vd);
      out.f = 1;
      out.v_min = vd;
      if (F.quad_has_root(1, w.a1, -w.a2)) {
        out.type = ReductionType::SplitMultiplicative;
        out.c = vd;
      } else {
        out.type = ReductionType::NonsplitMultiplicative;
        out.c = vd % 2 == 0 ? 2 : 1;
      }
      break;
    }
    out.type = ReductionType::Additive;
    out.v_min = vd;
    if (valuation(w.a6, p) < 2) {
      out.kodaira = {Kodaira::Kind::II, 0};
      out.f = vd;
      out.c = 1;
      break;
    }
    if (valuation(w.b8(), p) < 3) {
      out.kodaira = {Kodaira::Kind::III, 0};
      out.f = vd - 1;
      out.c = 2;
      break;
    }
    if (valuation(w.b6(), p) < 3) {
      out.kodaira = {Kodaira::Kind::IV, 0};
      out.f = vd - 2;
      out.c = F.quad_has_root(1, w.a3 / p, -(w.a6 / p2)) ? 3 : 1;
      break;
    }
    // Arrange l | a1, a2; l^2 | a3, a4; l^3 | a6.
    BigInt s;
    if (p == 2) {
      s = F.red(w.a2);
      t = p * F.red(w.a6 / p2);
    } else if (p == 3) {
      s = w.a1;
      t = w.a3;
    } else {
      s = -w.a1 * half;
      t = -w.a3 * half;
    }
    w = w.rst(0, s, t);

    const BigInt b = w.a2 / p, c = w.a4 / p2, d = w.a6 / p3;
    const BigInt disc = 27 * d * d - b * b * c * c + 4 * b * b * b * d - 18 * b * c * d + 4 * c * c * c;
    const BigInt x = 3 * c - b * b;
    if (!F.divides(disc)) {
      // Distinct roots of the auxiliary cubic: I0*.
      out.kodaira = Kodaira::IStar(0);
      out.f = vd - 4;
      out.c = 1 + F.cubic_root_count(b, c, d);
      break;
    }
    if (!F.divides(x)) {
      // Double root: I_m*. Move it to 0.
      if (p == 2)
        r = F.red(c);
      else if (p == 3)
        r = F.red(c * F.inv(b));
      else
        r = F.red((b * c - 9 * d) * F.inv(2 * x));
      w = w.rst(p * r, 0, 0);
      int ix = 3, iy = 3;
      BigInt mx = p2, my = p2;
      for (;;) {
        BigInt a2t = w.a2 / p, a3t = w.a3 / my, a4t = w.a4 / (p * mx), a6t = w.a6 / (mx * my);
        if (!F.divides(a3t * a3t + 4 * a6t)) {
          out.c = F.quad_has_root(1, a3t, -a6t) ? 4 : 2;
          break;
        }
        if (p == 2)
          t = my * F.red(a6t);
        else
          t = my * F.red(-a3t * half);
        w = w.rst(0, 0, t);
        my *= p;
        ++iy;
        a2t = w.a2 / p;
        a3t = w.a3 / my;
        a4t = w.a4 / (p * mx);
        a6t = w.a6 / (mx * my);
        if (!F.divides(a4t * a4t - 4 * a6t * a2t)) {
          out.c = F.quad_has_root(a2t, a4t, a6t) ? 4 : 2;
          break;
        }
        if (p == 2)
          r = mx * F.red(a6t * F.inv(a2t));
        else
          r = mx * F.red(-a4t * F.inv(2 * a2t));
        w = w.rst(r, 0, 0);
        mx *= p;
        ++ix;
      }
      out.kodaira = Kodaira::IStar(ix + iy - 5);
      out.f = vd - ix - iy + 1;
      break;
    }
    // Triple root: move it to 0.
    if (p == 2)
      r = b;
    else if (p == 3)
      r = F.red(-d);  // cube root in F_3 is the identity
    else
      r = -b * F.inv(BigInt(3));
    w = w.rst(p * F.red(r), 0, 0);
    const BigInt x3t = w.a3 / p2, x6t = w.a6 / p4;
    if (!F.divides(x3t * x3t + 4 * x6t)) {
      out.kodaira = {Kodaira::Kind::IVStar, 0};
      out.f = vd - 6;
      out.c = F.quad_has_root(1, x3t, -x6t) ? 3 : 1;
      break;
    }
    if (p == 2)
      t = -p2 * F.red(x6t);
    else
      t = p2 * F.red(-x3t * half);
    w = w.rst(0, 0, t);
    if (w.a4 % p4 != 0) {
      out.kodaira = {Kodaira::Kind::IIIStar, 0};
      out.f = vd - 7;
      out.c = 2;
      break;
    }
    if (w.a6 % (p3 * p3) != 0) {
      out.kodaira = {Kodaira::Kind::IIStar, 0};
      out.f = vd - 8;
      out.c = 1;
      break;
    }
    // Not minimal: rescale by u = l and start over.
    w = w.scaled_down(p);
    ++out.restarts;
  }
  if (v_input != out.v_min + 12 * out.restarts) throw std::logic_error("tate_local: discriminant valuation mismatch");
  return out;
}

inline Weierstrass short_weierstrass(const CurveModel& c) { return {0, 0, 0, c.a(), c.b()}; }

inline ReductionData tate_local(const CurveModel& c, const BigInt& ell) { return tate_local(short_weierstrass(c), ell); }

// Primes dividing the curve discriminant -16(4A^3 + 27B^2): 2 and the
// primes of 4A^3 + 27B^2. Throws FactorizationError.
inline std::vector<BigInt> bad_primes(const CurveModel& c) {
  Factorization f = factor(c.naive_discriminant());
  if (!f.complete()) throw FactorizationError(f.unfactored);
  std::vector<BigInt> out{BigInt(2)};
  for (const auto& [p, e] : f.factors)
    if (p != 2) out.push_back(p);
  return out;
}

inline std::vector<ReductionData> local_reduction_all(const CurveModel& c) {
  std::vector<ReductionData> out;
  for (const auto& p : bad_primes(c)) out.push_back(tate_local(c, p));
  return out;
}

// prod_{l | Delta_E} c_l mod q.
inline u64 tamagawa_product_mod(const CurveModel& c, u64 q) {
  u64 r = 1 % q;
  for (const auto& rd : local_reduction_all(c)) r = mulmod(r, u64(rd.c) % q, q);
  return r;
}

// ---- Frobenius -------------------------------------------------------------

class BadReduction : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct FrobeniusData {
  u64 p = 0;
  i64 a_p = 0;
  u64 n_p = 0;  // #E~(F_p), including the point at infinity
  bool ordinary = false;
  bool anomalous = false;
};

// chi_p on [0, p) for an odd prime p; chi(0) = 0.
class QuadraticCharacterTable {
 public:
  explicit QuadraticCharacterTable(u64 p) : p_(p), chi_(p, -1) {
    if (p < 3 || !is_prime_u64(p)) throw std::invalid_argument("quadratic character: odd prime required");
    chi_[0] = 0;
    for (u64 x = 1; x <= p / 2; ++x) chi_[x * x % p] = 1;
  }
  u64 p() const { return p_; }
  int operator()(u64 x) const { return chi_[x % p_]; }

 private:
  u64 p_;
  std::vector<signed char> chi_;
};

// Tables are built once per prime and shared read-only.
inline std::shared_ptr<const QuadraticCharacterTable> character_table(u64 p) {
  static std::mutex mu;
  static std::map<u64, std::shared_ptr<const QuadraticCharacterTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[p];
  if (!slot) slot = std::make_shared<const QuadraticCharacterTable>(p);
  return slot;
}

inline FrobeniusData frobenius(const CurveModel& c, u64 p) {
  if (c.curve_discriminant() % p == 0)
    throw BadReduction("bad reduction at " + std::to_string(p) + " for " + c.a().str() + "," + c.b().str());
  auto chi = character_table(p);
  const u64 a = mod_u64(c.a(), p), b = mod_u64(c.b(), p);
  i64 sum = 0;
  for (u64 x = 0; x < p; ++x) {
    u64 v = (mulmod(mulmod(x, x, p), x, p) + mulmod(a, x, p) + b) % p;
    sum += (*chi)(v);
  }
  FrobeniusData out;
  out.p = p;
  out.a_p = -sum;
  out.n_p = u64(i64(p) + 1 - out.a_p);
  out.ordinary = (((out.a_p % i64(p)) + i64(p)) % i64(p)) != 0;
  out.anomalous = out.n_p % p == 0;
  return out;
}

enum class TorsionTest { Yes, Inconclusive };

// Rational 5-torsion injects into E~(F_l) at good l != 5, so a good l with
// 5 not dividing #E~(F_l) certifies E(Q)[5] = 0.
inline TorsionTest rules_out_rational_5_torsion(const CurveModel& c, u64 budget) {
  for (u64 l = 3; l <= budget; l += 2) {
    if (l == 5 || !is_prime_u64(l)) continue;
    if (c.curve_discriminant() % l == 0) continue;
    if (frobenius(c, l).n_p % 5 != 0) return TorsionTest::Yes;
  }
  return TorsionTest::Inconclusive;
}

}  // namespace iwc
