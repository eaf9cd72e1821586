// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

// Local conditions on (A mod l^m, B mod l^m), their densities among minimal
// pairs, congruence families, and predicted counts.
//
// Density of a condition is computed in two stages. With mu the normalized
// counting measure on (Z/l^m)^2,
//
//   d = (mu(pred) - mu(pred and l^4 | A and l^6 | B)) / (1 - l^-10),
//
// where the second term is the pullback of the predicate along
// A = l^4 a', B = l^6 b' weighted by l^-10. The numerator is the "minimal
// measure"; it is what the explicit constants of the family E refer to.

#pragma once

#include "iwacensus/constants.hpp"
#include "iwacensus/curve_model.hpp"
#include "iwacensus/enumeration.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <regex>
#include <set>
#include <sstream>

namespace iwc {

using ResiduePredicate = std::function<bool(u64 a, u64 b)>;

struct LocalCondition {
  u64 ell = 2;
  unsigned m = 1;
  // Evaluated on residues in [0, ell^m).
  ResiduePredicate predicate;
  // Archimedean rider A > 0, contributing a factor 1/2.
  bool positive_a = false;
  std::string name;
  // Closed form for the minimal measure, used when enumeration is too large.
  std::optional<Rational> closed_form_measure;

  u64 modulus() const { return ipow_u64(ell, m); }

  bool holds(const BigInt& a, const BigInt& b) const {
    if (positive_a && a <= 0) return false;
    const u64 mm = modulus();
    return predicate(mod_u64(a, mm), mod_u64(b, mm));
  }
};

class DensityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Largest residue ring (pairs) enumerated directly.
constexpr u64 kMaxEnumeratedPairs = u64(1) << 27;

struct MeasureCount {
  u64 satisfied = 0;       // pairs mod l^m satisfying the predicate
  u64 total = 0;           // l^(2m)
  u64 pullback_hits = 0;   // pullback pairs satisfying the predicate
  u64 pullback_total = 0;  // l^(max(m-4,0)) * l^(max(m-6,0))
};

inline MeasureCount count_measure(const LocalCondition& c) {
  const u64 mm = c.modulus();
  if (mm > (u64(1) << 32) || mm * mm > kMaxEnumeratedPairs)
    throw DensityError("modulus " + std::to_string(mm) + " too large to enumerate for " + c.name);
  MeasureCount out;
  out.total = mm * mm;
  for (u64 a = 0; a < mm; ++a)
    for (u64 b = 0; b < mm; ++b)
      if (c.predicate(a, b)) ++out.satisfied;
  const u64 ra = c.m > 4 ? ipow_u64(c.ell, c.m - 4) : 1;
  const u64 rb = c.m > 6 ? ipow_u64(c.ell, c.m - 6) : 1;
  const u64 l4 = ipow_u64(c.ell, 4) % mm, l6 = ipow_u64(c.ell, 6) % mm;
  out.pullback_total = ra * rb;
  for (u64 a = 0; a < ra; ++a)
    for (u64 b = 0; b < rb; ++b)
      if (c.predicate(mulmod(l4, a, mm), mulmod(l6, b, mm))) ++out.pullback_hits;
  return out;
}

// (1 - l^-10) d, i.e. the measure of the condition among minimal pairs.
inline Rational minimal_measure(const LocalCondition& c) {
  const u64 mm = c.modulus();
  const bool enumerable = mm <= (u64(1) << 32) && mm * mm <= kMaxEnumeratedPairs;
  Rational v;
  if (enumerable) {
    MeasureCount k = count_measure(c);
    v = Rational(k.satisfied, k.total) -
        Rational(k.pullback_hits, BigInt(k.pullback_total) * ipow(BigInt(c.ell), 10));
  } else if (c.closed_form_measure) {
    v = *c.closed_form_measure;
  } else {
    throw DensityError("no enumeration or closed form for " + c.name);
  }
  return c.positive_a ? Rational(v / 2) : v;
}

inline Rational local_density(const LocalCondition& c) {
  return minimal_measure(c) / (Rational(1) - Rational(1, ipow(BigInt(c.ell), 10)));
}

inline Rational pi_closed_form_measure(u64 l) { return Rational(1) - Rational(2, l * l) + Rational(1, l * l * l); }

// l^2 does not divide 4A^3 + 27B^2.
inline LocalCondition pi_condition(u64 l) {
  if (!is_prime_u64(l)) throw std::invalid_argument("pi_condition: not a prime");
  const u64 l2 = l * l;
  LocalCondition c;
  c.ell = l;
  c.m = 2;
  c.name = "Pi_" + std::to_string(l);
  c.predicate = [l2](u64 a, u64 b) {
    u128 v = (u128(4) * a % l2 * a % l2 * a + u128(27) * b % l2 * b) % l2;
    return v != 0;
  };
  if (l >= 5) c.closed_form_measure = pi_closed_form_measure(l);
  return c;
}

// Residue pairs satisfying the predicate, for lattice enumeration.
inline ResidueClassSet residue_classes(const LocalCondition& c) {
  const u64 mm = c.modulus();
  if (mm * mm > kMaxEnumeratedPairs) throw DensityError("residue set too large for " + c.name);
  ResidueClassSet s{mm, {}};
  for (u64 a = 0; a < mm; ++a)
    for (u64 b = 0; b < mm; ++b)
      if (c.predicate(a, b)) s.pairs.emplace_back(a, b);
  return s;
}

// Rule producing the condition at primes without an explicit one.
struct DefaultRule {
  enum class Kind { None, Pi, Custom };
  Kind kind = Kind::None;
  std::function<LocalCondition(u64)> make;
  // Upper bound for sum_{l > z} (1 - measure_l); absent means the product
  // is not known to converge.
  std::function<Rational(u64 z)> deficit_tail;

  static DefaultRule none() { return {}; }
  static DefaultRule pi() { return {Kind::Pi, pi_condition, [](u64 z) { return Rational(2, z); }}; }
};

class CongruenceFamily {
 public:
  CongruenceFamily(std::string name, std::vector<LocalCondition> conditions, DefaultRule rule = DefaultRule::none(),
                   bool positive_a = false)
      : name_(std::move(name)), rule_(std::move(rule)), positive_a_(positive_a) {
    for (auto& c : conditions) {
      u64 l = c.ell;
      if (!explicit_.emplace(l, std::move(c)).second)
        throw std::invalid_argument("duplicate explicit prime " + std::to_string(l));
    }
  }

  const std::string& name() const { return name_; }
  const std::map<u64, LocalCondition>& explicit_conditions() const { return explicit_; }
  const DefaultRule& default_rule() const { return rule_; }
  bool family_positive_a() const { return positive_a_; }

  bool requires_positive_a() const {
    if (positive_a_) return true;
    for (const auto& [l, c] : explicit_)
      if (c.positive_a) return true;
    return false;
  }

  std::optional<LocalCondition> condition_at(u64 l) const {
    if (auto it = explicit_.find(l); it != explicit_.end()) return it->second;
    if (rule_.kind == DefaultRule::Kind::None) return std::nullopt;
    return rule_.make(l);
  }

  bool explicit_holds(const CurveModel& c) const {
    if (positive_a_ && c.a() <= 0) return false;
    for (const auto& [l, cond] : explicit_)
      if (!cond.holds(c.a(), c.b())) return false;
    return true;
  }

  // Membership with the default rule decided from the factorization of
  // 4A^3 + 27B^2 (Pi only needs exponents). Throws FactorizationError.
  bool contains(const CurveModel& c) const {
    if (!explicit_holds(c)) return false;
    switch (rule_.kind) {
      case DefaultRule::Kind::None:
        return true;
      case DefaultRule::Kind::Pi: {
        Factorization f = factor(c.naive_discriminant());
        if (!f.complete()) throw FactorizationError(f.unfactored);
        for (const auto& [p, e] : f.factors) {
          if (e < 2) continue;
          if (explicit_.count(p.convert_to<u64>())) continue;
          return false;
        }
        return true;
      }
      case DefaultRule::Kind::Custom:
        return contains_by_predicates(c);
    }
    return false;
  }

  // Membership by evaluating the local predicate at every prime up to
  // sqrt|4A^3 + 27B^2| and at each explicit prime. Primes above that bound
  // satisfy Pi trivially; Custom rules are assumed to do the same.
  bool contains_by_predicates(const CurveModel& c) const {
    if (!explicit_holds(c)) return false;
    if (rule_.kind == DefaultRule::Kind::None) return true;
    BigInt r = iroot(abs_big(c.naive_discriminant()), 2);
    if (r > BigInt(kTrialDivisionBound)) throw std::out_of_range("contains_by_predicates: discriminant too large");
    for (u64 p : small_primes()) {
      if (BigInt(p) > r) break;
      if (explicit_.count(p)) continue;
      if (!rule_.make(p).holds(c.a(), c.b())) return false;
    }
    return true;
  }

  std::vector<ResidueClassSet> lattice_classes() const {
    std::vector<ResidueClassSet> out;
    for (const auto& [l, c] : explicit_) out.push_back(residue_classes(c));
    return out;
  }

 private:
  std::string name_;
  std::map<u64, LocalCondition> explicit_;
  DefaultRule rule_;
  bool positive_a_ = false;
};

// E_2: A > 0, A = 4A', B = 16B', A' = 189 mod 256, B' = +-1 mod 256.
inline LocalCondition e2_condition() {
  LocalCondition c;
  c.ell = 2;
  c.m = 12;
  c.positive_a = true;
  c.name = "E_2";
  c.predicate = [](u64 a, u64 b) { return a % 1024 == 4 * 189 && (b == 16 || b == 4096 - 16); };
  return c;
}

// E_5: (A, B) = (1, +-1) mod 5.
inline LocalCondition e5_condition() {
  LocalCondition c;
  c.ell = 5;
  c.m = 1;
  c.name = "E_5";
  c.predicate = [](u64 a, u64 b) { return a == 1 && (b == 1 || b == 4); };
  return c;
}

inline CongruenceFamily family_E() { return CongruenceFamily("E", {e2_condition(), e5_condition()}, DefaultRule::pi()); }

inline CongruenceFamily family_pi(u64 l) { return CongruenceFamily("Pi_" + std::to_string(l), {pi_condition(l)}); }

inline CongruenceFamily family_all() { return CongruenceFamily("all", {}); }

struct DensityPrediction {
  std::string family;
  // prod_l d(Phi_l) * 4 / zeta(10): predicted count is this times X^(5/6).
  Interval leading_constant;
  // prod_l d(Phi_l), the density relative to C(X).
  Interval density;
  // For Pi-default families: product of the explicit minimal measures
  // (for E, 1/52428800). For finite families: the exact density.
  std::optional<Rational> exact_rational_part;
  // Factors that were enumerated at the small primes 2, 3 under the default rule.
  std::map<u64, Rational> enumerated_default_factors;

  Interval predicted_count(const BigInt& x) const {
    return round_outward(leading_constant * pow_five_sixths(x), 128);
  }
};

class DivergentProduct : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline DensityPrediction predicted_count(const CongruenceFamily& fam, u64 euler_cutoff = 1'000'000,
                                         const Rational& zeta_width = Rational(1, 1000000000000LL)) {
  DensityPrediction out;
  out.family = fam.name();
  const Interval zeta = zeta_10(zeta_width).value;
  const Rational sign = fam.family_positive_a() ? Rational(1, 2) : Rational(1);

  if (fam.default_rule().kind == DefaultRule::Kind::None) {
    Rational d = sign;
    for (const auto& [l, c] : fam.explicit_conditions()) d *= local_density(c);
    out.exact_rational_part = d;
    out.density = Interval(d);
    out.leading_constant = round_outward(Interval(d * 4) / zeta, 256);
    return out;
  }

  if (!fam.default_rule().deficit_tail)
    throw DivergentProduct("family " + fam.name() +
                           ": default rule has no summable deficit bound; the Euler product is not known to converge");

  // prod over all primes of d_l = zeta(10) * prod_l minimal_measure_l.
  Rational explicit_part = sign;
  for (const auto& [l, c] : fam.explicit_conditions()) explicit_part *= minimal_measure(c);
  out.exact_rational_part = explicit_part;

  Interval defaults(Rational(1));
  if (fam.default_rule().kind == DefaultRule::Kind::Pi) {
    for (u64 l : {2ull, 3ull, 5ull}) {
      if (fam.explicit_conditions().count(l)) continue;
      Rational f = minimal_measure(pi_condition(l));
      if (l < 5) out.enumerated_default_factors[l] = f;
      defaults = defaults * Interval(f);
    }
    Interval p7 = euler_product_ge7(euler_cutoff).value;
    for (const auto& [l, c] : fam.explicit_conditions())
      if (l >= 7) p7 = p7 / Interval(pi_closed_form_measure(l));
    defaults = defaults * p7;
  } else {
    // Custom: enumerate every default factor up to the cutoff.
    Rational part = 1;
    for (u64 l : primes_up_to(euler_cutoff)) {
      if (fam.explicit_conditions().count(l)) continue;
      part *= minimal_measure(fam.default_rule().make(l));
    }
    Rational tail = fam.default_rule().deficit_tail(euler_cutoff);
    defaults = Interval(part) * Interval(std::max(Rational(0), Rational(1 - tail)), Rational(1));
  }
  Interval prod_minimal = Interval(explicit_part) * defaults;
  out.density = round_outward(zeta * prod_minimal, 256);
  out.leading_constant = round_outward(Interval(Rational(4)) * prod_minimal, 256);
  return out;
}

// Text format, one condition per line:
//   ell m (a,b) (a,b) ...
//   sign A>0
// Blank lines and '#' comments are ignored.
inline CongruenceFamily parse_family(std::istream& in, const std::string& name) {
  std::vector<LocalCondition> conds;
  bool positive = false;
  std::string line;
  int lineno = 0;
  static const std::regex pair_re(R"(\(\s*(\d+)\s*,\s*(\d+)\s*\))");
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "sign") {
      std::string what;
      ls >> what;
      if (what != "A>0") throw std::invalid_argument(name + ":" + std::to_string(lineno) + ": unknown sign rider");
      positive = true;
      continue;
    }
    u64 l = 0;
    unsigned m = 0;
    try {
      l = std::stoull(first);
    } catch (const std::exception&) {
      throw std::invalid_argument(name + ":" + std::to_string(lineno) + ": expected prime");
    }
    if (!(ls >> m) || m < 1) throw std::invalid_argument(name + ":" + std::to_string(lineno) + ": expected exponent");
    if (!is_prime_u64(l)) throw std::invalid_argument(name + ":" + std::to_string(lineno) + ": not a prime");
    const u64 mm = ipow_u64(l, m);
    auto set = std::make_shared<std::set<std::pair<u64, u64>>>();
    std::string rest((std::istreambuf_iterator<char>(ls)), std::istreambuf_iterator<char>());
    for (std::sregex_iterator it(rest.begin(), rest.end(), pair_re), end; it != end; ++it) {
      u64 a = std::stoull((*it)[1]), b = std::stoull((*it)[2]);
      if (a >= mm || b >= mm)
        throw std::invalid_argument(name + ":" + std::to_string(lineno) + ": residue out of range");
      set->emplace(a, b);
    }
    LocalCondition c;
    c.ell = l;
    c.m = m;
    c.name = name + "@" + std::to_string(l);
    c.predicate = [set](u64 a, u64 b) { return set->count({a, b}) > 0; };
    conds.push_back(std::move(c));
  }
  return CongruenceFamily(name, std::move(conds), DefaultRule::none(), positive);
}

inline CongruenceFamily load_family(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open family file " + path);
  return parse_family(in, path);
}

}  // namespace iwc
