// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

#include "iwacensus/iwasawa_criterion.hpp"
#include "iwacensus/reduction.hpp"
#include "iwacensus/enumeration.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

using namespace iwc;

namespace {

const std::string kData = IWC_TEST_DATA_DIR;

// #E(F_p) by listing affine solutions of y^2 = x^3 + ax + b, plus infinity.
i64 count_points(i64 a, i64 b, i64 p) {
  i64 n = 1;
  for (i64 x = 0; x < p; ++x) {
    i64 rhs = ((x * x % p * x + a * x + b) % p + p) % p;
    for (i64 y = 0; y < p; ++y)
      if (y * y % p == rhs) ++n;
  }
  return n;
}

void expect_consistent(const ReductionData& r, const CurveModel& c) {
  SCOPED_TRACE(c.a().str() + "," + c.b().str() + " at " + r.ell.str());
  using K = Kodaira::Kind;
  const bool good = r.type == ReductionType::Good;
  EXPECT_EQ(good, r.kodaira.kind == K::I0);
  EXPECT_EQ(good, r.f == 0);
  EXPECT_EQ(good, r.v_min == 0);
  const bool mult = r.type == ReductionType::SplitMultiplicative || r.type == ReductionType::NonsplitMultiplicative;
  EXPECT_EQ(mult, r.kodaira.kind == K::In);
  EXPECT_EQ(mult, r.f == 1);
  if (r.type == ReductionType::SplitMultiplicative) EXPECT_EQ(r.c, r.kodaira.n);
  if (r.type == ReductionType::NonsplitMultiplicative) EXPECT_EQ(r.c, r.kodaira.n % 2 == 0 ? 2 : 1);
  if (mult) EXPECT_EQ(r.v_min, r.kodaira.n);
  if (r.type == ReductionType::Additive) {
    EXPECT_GE(r.f, 2);
    EXPECT_GE(r.c, 1);
    EXPECT_LE(r.c, 4);
  }
  EXPECT_EQ(valuation(c.curve_discriminant(), r.ell), r.v_min + 12 * r.restarts);
}

}  // namespace

TEST(Kodaira, RoundTrip) {
  for (std::string s : {"I0", "I1", "I17", "II", "III", "IV", "I0*", "I3*", "IV*", "III*", "II*"})
    EXPECT_EQ(to_string(parse_kodaira(s)), s);
  EXPECT_THROW(parse_kodaira("V"), std::invalid_argument);
  EXPECT_THROW(parse_kodaira("I*x"), std::invalid_argument);
  EXPECT_EQ(Kodaira::IStar(2).components(), 7);
}

TEST(Tate, FrozenExamples) {
  CurveModel c = new_curve(1, 1);
  ReductionData r31 = tate_local(c, 31);
  EXPECT_EQ(r31.type, ReductionType::NonsplitMultiplicative);  // a_31 = -1
  EXPECT_EQ(r31.kodaira, Kodaira::I(1));
  EXPECT_EQ(r31.f, 1);
  EXPECT_EQ(r31.c, 1);
  ReductionData r7 = tate_local(c, 7);
  EXPECT_EQ(r7.type, ReductionType::Good);
  EXPECT_EQ(r7.c, 1);
  ReductionData r2 = tate_local(c, 2);
  EXPECT_EQ(r2.type, ReductionType::Additive);
  EXPECT_EQ(r2.kodaira.kind, Kodaira::Kind::II);
  EXPECT_EQ(r2.f, 4);
  EXPECT_EQ(r2.c, 1);
  ReductionData t = tate_local(new_curve(-1, 0), 2);
  EXPECT_EQ(to_string(t.kodaira), "III");
  EXPECT_EQ(t.f, 5);
  EXPECT_EQ(t.c, 2);
  ReductionData u = tate_local(new_curve(0, 1), 2);
  EXPECT_EQ(to_string(u.kodaira), "IV");
  EXPECT_EQ(u.c, 3);
  EXPECT_EQ(bad_primes(c), (std::vector<BigInt>{2, 31}));
  EXPECT_EQ(tamagawa_product_mod(c, 5), 1u);
}

TEST(Tate, MinimalityRestarts) {
  // X_0(11) in short form: non-minimal at 2 and at 3, good at both.
  CurveModel c = new_curve(-13392, -1080432);
  for (int l : {2, 3}) {
    ReductionData r = tate_local(c, l);
    EXPECT_EQ(r.type, ReductionType::Good) << l;
    EXPECT_EQ(r.restarts, 1) << l;
    expect_consistent(r, c);
  }
  ReductionData r11 = tate_local(c, 11);
  EXPECT_EQ(r11.type, ReductionType::SplitMultiplicative);
  EXPECT_EQ(r11.kodaira, Kodaira::I(5));
  EXPECT_EQ(r11.c, 5);
  EXPECT_EQ(tamagawa_product_mod(c, 5), 0u);
  // PARI: (-195, -2946) good at 2 after one rescaling.
  ReductionData g = tate_local(new_curve(-195, -2946), 2);
  EXPECT_EQ(g.type, ReductionType::Good);
  EXPECT_EQ(g.restarts, 1);
  // PARI: (-1161, -7830) is I1 and (-1161, -7479) is I3 with c = 3 at 3, each after one rescaling.
  ReductionData h = tate_local(new_curve(-1161, -7830), 3);
  EXPECT_EQ(h.kodaira, Kodaira::I(1));
  EXPECT_EQ(h.restarts, 1);
  ReductionData k = tate_local(new_curve(-1161, -7479), 3);
  EXPECT_EQ(k.kodaira, Kodaira::I(3));
  EXPECT_EQ(k.c, 3);
  EXPECT_EQ(k.restarts, 1);
}

TEST(Tate, ReferenceCorpusMatches) {
  ReductionTable t = ingest_reference_reduction(kData + "/reference_reduction.csv");
  EXPECT_TRUE(t.malformed.empty());
  ASSERT_GE(t.rows.size(), 100u);
  std::set<std::string> kinds;
  for (const auto& row : t.rows) {
    CurveModel c = new_curve(row.a, row.b);
    ReductionData r = tate_local(c, row.ell);
    EXPECT_EQ(r.kodaira, row.kodaira) << c << " at " << row.ell;
    EXPECT_EQ(r.f, row.conductor_exponent) << c << " at " << row.ell;
    EXPECT_EQ(r.c, row.tamagawa) << c << " at " << row.ell;
    expect_consistent(r, c);
    using K = Kodaira::Kind;
    K k = row.kodaira.kind;
    kinds.insert(k == K::In ? "In" : (k == K::InStar || k == K::I0Star) ? "In*" : to_string(row.kodaira));
  }
  for (std::string k : {"In", "II", "III", "IV", "In*", "IV*", "III*", "II*"}) EXPECT_TRUE(kinds.count(k)) << k;
}

TEST(TateProperty, AllCurvesUpToHeight10000) {
  ReductionTable t = ingest_reference_reduction(kData + "/pari_height_10000.csv");
  ASSERT_TRUE(t.malformed.empty());
  std::map<std::pair<CurveKey, BigInt>, const ReferenceReduction*> ref;
  for (const auto& row : t.rows) ref[{{row.a, row.b}, row.ell}] = &row;
  std::size_t seen = 0;
  for (const auto& c : enumerate_curves(HeightBound(BigInt(10000)))) {
    for (const auto& r : local_reduction_all(c)) {
      expect_consistent(r, c);
      auto it = ref.find(std::make_pair(CurveKey{c.a(), c.b()}, r.ell));
      if (it == ref.end()) {
        // 2 is always examined; PARI lists it only when it is bad.
        EXPECT_EQ(r.type, ReductionType::Good) << c << " at " << r.ell;
        continue;
      }
      ++seen;
      ASSERT_EQ(r.kodaira, it->second->kodaira) << c << " at " << r.ell;
      ASSERT_EQ(r.f, it->second->conductor_exponent) << c << " at " << r.ell;
      ASSERT_EQ(r.c, it->second->tamagawa) << c << " at " << r.ell;
    }
  }
  EXPECT_EQ(seen, t.rows.size());
}

TEST(Tate, LargeCoefficients) {
  BigInt a = ipow(BigInt(2), 127) * 3 + 5, b = ipow(BigInt(7), 50) * 4 + 1;
  CurveModel c = new_curve(a, b);
  for (u64 l : {2ull, 3ull, 5ull, 7ull}) expect_consistent(tate_local(c, l), c);
  BigInt p("1000000007");
  // p | A and p | B: additive at a prime beyond 2^29.
  CurveModel d = new_curve(p * 3, p * p * 2);
  ReductionData r = tate_local(d, p);
  EXPECT_EQ(r.type, ReductionType::Additive);
  expect_consistent(r, d);
}

TEST(Frobenius, FrozenExamples) {
  FrobeniusData f = frobenius(new_curve(1, 1), 5);
  EXPECT_EQ(f.a_p, -3);
  EXPECT_EQ(f.n_p, 9u);
  EXPECT_TRUE(f.ordinary);
  EXPECT_FALSE(f.anomalous);
  FrobeniusData g = frobenius(new_curve(1, -1), 5);
  EXPECT_EQ(g.a_p, -3);
  EXPECT_EQ(g.n_p, 9u);
  FrobeniusData s = frobenius(new_curve(0, 1), 5);
  EXPECT_EQ(s.a_p, 0);
  EXPECT_EQ(s.n_p, 6u);
  EXPECT_FALSE(s.ordinary);
  EXPECT_EQ(frobenius(new_curve(1, 1), 7).n_p, 5u);
  EXPECT_TRUE(frobenius(new_curve(1, 1), 7).anomalous == false);
  EXPECT_THROW(frobenius(new_curve(1, 1), 31), BadReduction);
}

TEST(FrobeniusProperty, MatchesPointCountTwistLawAndHasse) {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<i64> da(-1000000, 1000000), db(-1000000000, 1000000000);
  int curves = 0;
  while (curves < 1000) {
    i64 a = da(rng), b = db(rng);
    CurveModel c = CurveModel::trusted(0, 1);
    try {
      c = new_curve(a, b);
    } catch (const InvalidCurve&) {
      continue;
    }
    ++curves;
    CurveModel t = twist_by_minus_one(c);
    for (u64 p : primes_up_to(100)) {
      if (p == 2 || c.curve_discriminant() % p == 0) continue;
      FrobeniusData f = frobenius(c, p), ft = frobenius(t, p);
      if (curves <= 50) ASSERT_EQ(i64(f.n_p), count_points(a % i64(p), b % i64(p), i64(p)));
      i64 chi = p % 4 == 1 ? 1 : -1;
      ASSERT_EQ(ft.a_p, chi * f.a_p) << c << " p=" << p;
      ASSERT_LE(f.a_p * f.a_p, i64(4 * p));
      ASSERT_EQ(i64(f.n_p), i64(p) + 1 - f.a_p);
      ASSERT_EQ(f.anomalous, f.n_p % p == 0);
      if (p >= 5) ASSERT_EQ(f.ordinary, f.a_p % i64(p) != 0);
    }
  }
}

TEST(Torsion, OneSidedTest) {
  CurveModel c = new_curve(1, 1);
  // n_3 = 4 already certifies; confirm against the point count.
  EXPECT_EQ(count_points(1, 1, 3), 4);
  EXPECT_EQ(rules_out_rational_5_torsion(c, 3), TorsionTest::Yes);
  EXPECT_EQ(rules_out_rational_5_torsion(c, 0), TorsionTest::Inconclusive);
  // X_0(11) has a rational 5-torsion point: never "yes".
  CurveModel x011 = new_curve(-13392, -1080432);
  EXPECT_EQ(rules_out_rational_5_torsion(x011, 1000), TorsionTest::Inconclusive);
}
