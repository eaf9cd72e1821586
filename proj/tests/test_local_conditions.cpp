// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

#include "iwacensus/local_conditions.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace iwc;

namespace {

// Pairs mod l^2 with l^2 not dividing 4a^3 + 27b^2, evaluated exactly
// (4 a^3 + 27 b^2 < 2^45 for l < 100).
u64 pi_count_oracle(u64 l) {
  const u64 l2 = l * l;
  u64 n = 0;
  for (u64 a = 0; a < l2; ++a)
    for (u64 b = 0; b < l2; ++b)
      if ((4 * a * a * a + 27 * b * b) % l2 != 0) ++n;
  return n;
}

Rational one_minus_l10(u64 l) { return Rational(1) - Rational(1, ipow(BigInt(l), 10)); }

}  // namespace

TEST(LocalDensity, PiCountsMatchClosedForm) {
  for (u64 l : primes_up_to(97)) {
    if (l < 7) continue;
    MeasureCount k = count_measure(pi_condition(l));
    EXPECT_EQ(k.satisfied, pi_count_oracle(l)) << l;
    EXPECT_EQ(k.satisfied, l * l * l * l - 2 * l * l + l) << l;
    EXPECT_EQ(k.pullback_hits, 0u);
    EXPECT_EQ(minimal_measure(pi_condition(l)), pi_closed_form_measure(l));
  }
  EXPECT_EQ(count_measure(pi_condition(7)).satisfied, 2310u);
  EXPECT_EQ(minimal_measure(pi_condition(7)), Rational(330, 343));
  EXPECT_EQ(local_density(pi_condition(7)), Rational(330, 343) / one_minus_l10(7));
}

TEST(LocalDensity, PiAtThreeIsTwoThirds) {
  MeasureCount k = count_measure(pi_condition(3));
  EXPECT_EQ(k.satisfied, 54u);
  EXPECT_EQ(k.total, 81u);
  EXPECT_EQ(k.satisfied, pi_count_oracle(3));
  EXPECT_EQ(minimal_measure(pi_condition(3)), Rational(2, 3));
  // 27B^2 = 0 mod 9, so the condition is exactly 3 not dividing A.
  for (u64 a = 0; a < 9; ++a)
    for (u64 b = 0; b < 9; ++b) EXPECT_EQ(pi_condition(3).predicate(a, b), a % 3 != 0);
}

TEST(LocalDensity, FamilyEConditions) {
  EXPECT_EQ(minimal_measure(e2_condition()), Rational(1, 4194304));
  EXPECT_EQ(local_density(e2_condition()) * one_minus_l10(2), Rational(1, 4194304));
  EXPECT_EQ(local_density(e5_condition()) * one_minus_l10(5), Rational(2, 25));
  MeasureCount k2 = count_measure(e2_condition());
  // 4 A-classes times 2 B-classes mod 4096.
  EXPECT_EQ(k2.satisfied, 8u);
  EXPECT_EQ(k2.total, 4096u * 4096u);
  EXPECT_EQ(k2.pullback_hits, 0u);
  EXPECT_EQ(count_measure(e5_condition()).satisfied, 2u);
}

TEST(LocalDensity, AlwaysInUnitInterval) {
  std::vector<LocalCondition> conds{e2_condition(), e5_condition()};
  for (u64 l : primes_up_to(97)) conds.push_back(pi_condition(l));
  LocalCondition everything;
  everything.ell = 3;
  everything.m = 1;
  everything.predicate = [](u64, u64) { return true; };
  everything.name = "all";
  conds.push_back(everything);
  for (const auto& c : conds) {
    Rational d = local_density(c);
    EXPECT_GE(d, 0) << c.name;
    EXPECT_LE(d, 1) << c.name;
  }
  // "No condition" in the minimal universe has density exactly 1.
  EXPECT_EQ(local_density(everything), 1);
  everything.m = 7;  // pullback through l^4 and l^6
  EXPECT_EQ(local_density(everything), 1);
}

TEST(LocalDensity, PullbackWeighting) {
  // A = 0 mod 2^4 and B = 0 mod 2^6 at m = 6: every such pair is non-minimal,
  // so the minimal measure is 2^-4 2^-6 - 2^-10 = 0.
  LocalCondition c;
  c.ell = 2;
  c.m = 6;
  c.name = "nonminimal";
  c.predicate = [](u64 a, u64 b) { return a % 16 == 0 && b == 0; };
  EXPECT_EQ(minimal_measure(c), 0);
  LocalCondition big;
  big.ell = 5;
  big.m = 6;
  big.name = "too large";
  big.predicate = [](u64, u64) { return true; };
  EXPECT_THROW(minimal_measure(big), DensityError);
  big.closed_form_measure = Rational(1) - Rational(1, ipow(BigInt(5), 10));
  EXPECT_EQ(local_density(big), 1);
}

TEST(Family, Membership) {
  CongruenceFamily e = family_E();
  // 31^2 does not divide 31.
  EXPECT_TRUE(pi_condition(31).holds(1, 1));
  EXPECT_FALSE(pi_condition(31).holds(BigInt(-3) * 961 * 961, BigInt(2) * 961 * 961 * 961 + 961));
  EXPECT_FALSE(pi_condition(3).holds(3, 1));
  EXPECT_FALSE(e.contains(new_curve(1, 1)));
  CurveModel m = new_curve(756, 16);
  EXPECT_EQ(e.explicit_holds(m), true);
  EXPECT_EQ(e.explicit_holds(new_curve(-268, 16)), false);  // -268 = 756 mod 1024 but A <= 0
}

TEST(FamilyProperty, TwistClosureOfE) {
  CongruenceFamily e = family_E();
  HeightBound h(BigInt(1000000000000LL));
  int members = 0;
  for (const auto& c : enumerate_in_lattice(e.lattice_classes(), h, true)) {
    EXPECT_NE(c.b(), 0);
    bool in = e.contains(c);
    EXPECT_EQ(in, e.contains(twist_by_minus_one(c)));
    members += in;
  }
  EXPECT_GT(members, 100);
}

TEST(FamilyProperty, PredicatePathMatchesFactorizationPath) {
  std::vector<CongruenceFamily> fams;
  fams.push_back(CongruenceFamily("squarefree", {}, DefaultRule::pi()));
  fams.push_back(CongruenceFamily("E5-squarefree", {e5_condition()}, DefaultRule::pi()));
  fams.push_back(family_E());
  fams.push_back(family_pi(7));
  HeightBound h(BigInt(10000));
  for (const auto& f : fams) {
    int in = 0;
    for (const auto& c : enumerate_curves(h)) {
      bool x = f.contains(c), y = f.contains_by_predicates(c);
      ASSERT_EQ(x, y) << f.name() << " " << c;
      in += x;
    }
    if (f.name() != "E") EXPECT_GT(in, 0) << f.name();
  }
}

TEST(Prediction, FiniteFamilies) {
  Interval zeta = zeta_10(Rational(1, 1000000000000LL)).value;
  DensityPrediction empty = predicted_count(family_all());
  EXPECT_EQ(*empty.exact_rational_part, 1);
  EXPECT_EQ(empty.leading_constant.lo, round_outward(Interval(Rational(4)) / zeta, 256).lo);
  EXPECT_TRUE(empty.leading_constant.contains(Interval(Rational(4)) / zeta));

  DensityPrediction p7 = predicted_count(family_pi(7));
  Rational d7 = Rational(330, 343) / one_minus_l10(7);
  EXPECT_EQ(*p7.exact_rational_part, d7);
  EXPECT_TRUE(p7.leading_constant.contains(Interval(d7 * 4) / zeta));
  EXPECT_LT(p7.leading_constant.width(), Rational(1, 100000000000LL));  // 4 d(Pi_7) times the zeta width
}

TEST(Prediction, FamilyE) {
  DensityPrediction e = predicted_count(family_E(), 10000);
  EXPECT_EQ(*e.exact_rational_part, Rational(1, 52428800));
  ASSERT_EQ(e.enumerated_default_factors.size(), 1u);
  EXPECT_EQ(e.enumerated_default_factors.at(3), Rational(2, 3));
  EXPECT_TRUE(e.density.positive());
  // density = zeta(10) * (1/52428800) * (2/3) * P7.
  Interval expect = zeta_10(Rational(1, 1000000000000LL)).value * Interval(Rational(1, 52428800) * Rational(2, 3)) *
                    euler_product_ge7(10000).value;
  EXPECT_LT(e.density.lo, expect.hi);
  EXPECT_GT(e.density.hi, expect.lo);
}

TEST(Prediction, RefusesUnboundedProducts) {
  DefaultRule r;
  r.kind = DefaultRule::Kind::Custom;
  r.make = [](u64 l) {
    LocalCondition c;
    c.ell = l;
    c.m = 1;
    c.name = "half";
    c.predicate = [](u64 a, u64) { return a % 2 == 0; };
    return c;
  };
  EXPECT_THROW(predicted_count(CongruenceFamily("no-tail", {}, r)), DivergentProduct);
  r.make = pi_condition;
  r.deficit_tail = [](u64 z) { return Rational(2, z); };
  DensityPrediction custom = predicted_count(CongruenceFamily("pi-custom", {}, r), 50);
  DensityPrediction builtin = predicted_count(CongruenceFamily("pi-builtin", {}, DefaultRule::pi()), 1000);
  EXPECT_LT(custom.density.lo, builtin.density.hi);
  EXPECT_GT(custom.density.hi, builtin.density.lo);
}

TEST(FamilyFile, ParsesAndRejects) {
  std::istringstream in(
      "# E at 5 only\n"
      "5 1 (1,1) (1,4)\n"
      "sign A>0\n");
  CongruenceFamily f = parse_family(in, "e5");
  EXPECT_TRUE(f.family_positive_a());
  ASSERT_EQ(f.explicit_conditions().size(), 1u);
  EXPECT_EQ(minimal_measure(f.explicit_conditions().at(5)), Rational(2, 25));
  EXPECT_EQ(*predicted_count(f).exact_rational_part, Rational(1, 25) / one_minus_l10(5));
  EXPECT_TRUE(f.contains(new_curve(1, 1)));
  EXPECT_FALSE(f.contains(new_curve(-4, 1)));
  std::istringstream bad1("4 1 (0,0)\n"), bad2("5 1 (5,0)\n"), bad3("sign B>0\n"), dup("5 1 (1,1)\n5 1 (1,4)\n");
  EXPECT_THROW(parse_family(bad1, "x"), std::invalid_argument);
  EXPECT_THROW(parse_family(bad2, "x"), std::invalid_argument);
  EXPECT_THROW(parse_family(bad3, "x"), std::invalid_argument);
  EXPECT_THROW(parse_family(dup, "x"), std::invalid_argument);
}
