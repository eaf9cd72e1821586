// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

#include "iwacensus/iwasawa_criterion.hpp"
#include "iwacensus/local_conditions.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace iwc;

namespace {

std::optional<CurveModel> first_member_of_E() {
  CongruenceFamily e = family_E();
  for (const auto& c : enumerate_in_lattice(e.lattice_classes(), HeightBound(BigInt(1000000000000LL)), true))
    if (e.contains(c)) return c;
  return std::nullopt;
}

}  // namespace

TEST(Verdict, TruthTableHasExactlyOneProvenRow) {
  const std::vector<std::optional<unsigned>> ranks{std::nullopt, 0u, 1u};
  const Tri three[] = {Tri::Unknown, Tri::Yes, Tri::No};
  const Tri two[] = {Tri::Yes, Tri::No};
  const Tri torsion[] = {Tri::Yes, Tri::Unknown};
  int rows = 0, proven = 0;
  for (auto rank : ranks)
    for (Tri sha : three)
      for (Tri tor : torsion)
        for (Tri ord : two)
          for (Tri anom : two)
            for (Tri tam : two) {
              CriterionInputs in;
              in.rank = rank;
              in.sha_trivial = sha;
              in.torsion_free = tor;
              in.good_ordinary = ord;
              in.non_anomalous = anom;
              in.tamagawa_prime_to_p = tam;
              Verdict v = decide(in);
              ++rows;
              bool all = rank == 0u && sha == Tri::Yes && tor == Tri::Yes && ord == Tri::Yes && anom == Tri::Yes &&
                         tam == Tri::Yes;
              EXPECT_EQ(v.outcome == Outcome::ProvenVanishing, all);
              proven += v.outcome == Outcome::ProvenVanishing;
              bool local_fail = ord == Tri::No || anom == Tri::No || tam == Tri::No;
              EXPECT_EQ(v.outcome == Outcome::FailsLocalCondition, local_fail);
              if (!all && !local_fail) EXPECT_EQ(v.outcome, Outcome::Inconclusive);
              ASSERT_NE(v.find("selmer_vanishes"), nullptr);
              EXPECT_EQ(v.find("selmer_vanishes")->status == CheckStatus::Passed,
                        rank == 0u && sha == Tri::Yes && tor == Tri::Yes);
            }
  EXPECT_EQ(rows, 3 * 3 * 2 * 2 * 2 * 2);
  EXPECT_EQ(proven, 1);
}

TEST(VerdictProperty, RefinementIsMonotone) {
  std::mt19937_64 rng(2024);
  auto pick = [&](bool allow_unknown) {
    int r = int(rng() % (allow_unknown ? 3 : 2));
    return r == 0 ? Tri::Yes : r == 1 ? Tri::No : Tri::Unknown;
  };
  int steps = 0;
  while (steps < 10000) {
    CriterionInputs in;
    in.good_ordinary = pick(true);
    in.non_anomalous = pick(true);
    in.tamagawa_prime_to_p = pick(true);
    in.torsion_free = rng() % 2 ? Tri::Yes : Tri::Unknown;
    in.sha_trivial = pick(true);
    if (rng() % 3) in.rank = unsigned(rng() % 3 == 0 ? 1 : 0);
    // Refine until nothing is unknown.
    for (;;) {
      Verdict before = decide(in);
      std::vector<int> unknown;
      if (in.good_ordinary == Tri::Unknown) unknown.push_back(0);
      if (in.non_anomalous == Tri::Unknown) unknown.push_back(1);
      if (in.tamagawa_prime_to_p == Tri::Unknown) unknown.push_back(2);
      if (in.torsion_free == Tri::Unknown) unknown.push_back(3);
      if (in.sha_trivial == Tri::Unknown) unknown.push_back(4);
      if (!in.rank) unknown.push_back(5);
      if (unknown.empty()) break;
      switch (unknown[rng() % unknown.size()]) {
        case 0: in.good_ordinary = pick(false); break;
        case 1: in.non_anomalous = pick(false); break;
        case 2: in.tamagawa_prime_to_p = pick(false); break;
        case 3: in.torsion_free = Tri::Yes; break;
        case 4: in.sha_trivial = pick(false); break;
        case 5: in.rank = unsigned(rng() % 2); break;
      }
      Verdict after = decide(in);
      ++steps;
      if (before.outcome == Outcome::ProvenVanishing) ASSERT_EQ(after.outcome, Outcome::ProvenVanishing);
      if (before.outcome == Outcome::FailsLocalCondition) ASSERT_NE(after.outcome, Outcome::ProvenVanishing);
    }
  }
}

TEST(Greenberg, Examples) {
  Verdict s = greenberg_check(new_curve(0, 1), {});
  EXPECT_EQ(s.outcome, Outcome::FailsLocalCondition);
  EXPECT_EQ(s.find("good_ordinary")->status, CheckStatus::Failed);

  auto m = first_member_of_E();
  ASSERT_TRUE(m.has_value());
  Verdict absent = greenberg_check(*m, {});
  EXPECT_EQ(absent.outcome, Outcome::Inconclusive);
  EXPECT_EQ(absent.find("non_anomalous")->status, CheckStatus::Passed);
  EXPECT_EQ(absent.find("tamagawa")->status, CheckStatus::Passed);
  EXPECT_EQ(absent.find("good_ordinary")->status, CheckStatus::Passed);

  SelmerFact known;
  known.rank = 0;
  known.sha_trivial = Tri::Yes;
  known.source = FactSource::ReferenceFile;
  Verdict proven = greenberg_check(*m, known);
  EXPECT_EQ(proven.outcome, Outcome::ProvenVanishing) << proven.reason;

  known.rank = 1;
  EXPECT_EQ(greenberg_check(*m, known).outcome, Outcome::Inconclusive);

  // Bad reduction at 5 fails condition (a).
  EXPECT_EQ(greenberg_check(new_curve(5, 5), known).outcome, Outcome::FailsLocalCondition);
  // X_0(11): 5 divides c_11.
  Verdict x = greenberg_check(new_curve(-13392, -1080432), known);
  EXPECT_EQ(x.outcome, Outcome::FailsLocalCondition);
  EXPECT_EQ(x.find("tamagawa")->status, CheckStatus::Failed);

  GreenbergOptions three;
  three.p = 3;
  EXPECT_THROW(greenberg_check(*m, known, three), std::invalid_argument);
  GreenbergOptions seven;
  seven.p = 7;
  EXPECT_NO_THROW(greenberg_check(*m, known, seven));
}

TEST(ReferenceFacts, Parsing) {
  std::istringstream in(
      "A,B,rank,sha5_trivial\n"
      "1,1,0,1\n"
      "1,-1,?,?\n"
      "2,3,1,0\n"
      "oops,3,1,0\n"
      "4,5,1\n"
      "6,7,-1,1\n"
      "8,9,0,2\n"
      "1,1,0,1\n"
      "\n");
  FactsTable t = parse_reference_facts(in);
  ASSERT_EQ(t.facts.size(), 3u);
  const SelmerFact& a = t.facts.at({1, 1});
  EXPECT_EQ(a.rank, 0u);
  EXPECT_EQ(a.sha_trivial, Tri::Yes);
  EXPECT_EQ(a.source, FactSource::ReferenceFile);
  EXPECT_FALSE(t.facts.at({1, -1}).rank.has_value());
  EXPECT_EQ(t.facts.at({1, -1}).sha_trivial, Tri::Unknown);
  EXPECT_EQ(t.facts.at({2, 3}).sha_trivial, Tri::No);
  ASSERT_EQ(t.malformed.size(), 4u);
  EXPECT_EQ(t.malformed[0].line, 5);
  EXPECT_EQ(t.malformed[3].line, 8);
}

TEST(ReferenceFacts, ConflictsAndHeaders) {
  std::istringstream conflict("A,B,rank,sha5_trivial\n1,1,0,1\n2,2,0,1\n1,1,1,1\n");
  try {
    parse_reference_facts(conflict);
    FAIL() << "expected conflict";
  } catch (const ReferenceFileError& e) {
    std::string what = e.what();
    EXPECT_NE(what.find("lines 2 and 4"), std::string::npos) << what;
  }
  std::istringstream header("A,B,rank\n1,1,0\n");
  EXPECT_THROW(parse_reference_facts(header), ReferenceFileError);
  std::istringstream empty("");
  EXPECT_THROW(parse_reference_facts(empty), ReferenceFileError);
  EXPECT_THROW(ingest_reference_facts("/nonexistent/facts.csv"), ReferenceFileError);
  std::istringstream crlf("A,B,rank,sha5_trivial\r\n3,4,0,1\r\n");
  EXPECT_EQ(parse_reference_facts(crlf).facts.at({3, 4}).rank, 0u);
}

TEST(ReferenceReduction, Parsing) {
  std::istringstream in(
      "A,B,ell,kodaira,conductor_exponent,tamagawa\n"
      "1,1,31,I1,1,1\n"
      "1,1,2,XX,4,1\n");
  ReductionTable t = parse_reference_reduction(in);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].kodaira, Kodaira::I(1));
  ASSERT_EQ(t.malformed.size(), 1u);
  EXPECT_EQ(t.malformed[0].line, 3);
}
