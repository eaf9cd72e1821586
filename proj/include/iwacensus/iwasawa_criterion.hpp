// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

// Greenberg's sufficient criterion for mu_p(E) = lambda_p(E) = 0 at a prime
// p >= 5 of good ordinary reduction:
//   (1) Sel_p(E/Q) = 0,
//   (2) p does not divide #E~(F_p),
//   (3) p does not divide c_l(E) for every l != p.
// Condition (1) is taken from external facts (rank 0 and Sha[p] = 0)
// together with a locally computed proof that E(Q)[p] = 0. The
// criterion is one-sided: missing facts give Inconclusive.

#pragma once

#include "iwacensus/curve_model.hpp"
#include "iwacensus/reduction.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace iwc {

enum class Tri { Unknown, Yes, No };

inline std::string to_string(Tri t) {
  switch (t) {
    case Tri::Yes: return "yes";
    case Tri::No: return "no";
    case Tri::Unknown: return "unknown";
  }
  return "?";
}

enum class FactSource { Absent, ReferenceFile, Remote };

inline std::string to_string(FactSource s) {
  switch (s) {
    case FactSource::Absent: return "absent";
    case FactSource::ReferenceFile: return "reference";
    case FactSource::Remote: return "remote";
  }
  return "?";
}

struct SelmerFact {
  std::optional<unsigned> rank;  // nullopt: unknown
  Tri sha_trivial = Tri::Unknown;  // Sha(E/Q)[p] = 0
  FactSource source = FactSource::Absent;

  friend bool operator==(const SelmerFact& x, const SelmerFact& y) {
    return x.rank == y.rank && x.sha_trivial == y.sha_trivial;
  }
};

// Everything the decision depends on, so the decision itself is a pure
// function that can be tested exhaustively.
struct CriterionInputs {
  Tri good_ordinary = Tri::Unknown;
  Tri non_anomalous = Tri::Unknown;
  Tri tamagawa_prime_to_p = Tri::Unknown;
  Tri torsion_free = Tri::Unknown;  // E(Q)[p] = 0 proven locally
  std::optional<unsigned> rank;
  Tri sha_trivial = Tri::Unknown;
};

enum class Outcome { ProvenVanishing, FailsLocalCondition, Inconclusive };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::ProvenVanishing: return "proven";
    case Outcome::FailsLocalCondition: return "fails_local";
    case Outcome::Inconclusive: return "inconclusive";
  }
  return "?";
}

enum class CheckStatus { Passed, Failed, Unknown };

inline std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Passed: return "pass";
    case CheckStatus::Failed: return "fail";
    case CheckStatus::Unknown: return "unknown";
  }
  return "?";
}

struct ConditionCheck {
  std::string name;
  CheckStatus status = CheckStatus::Unknown;
  std::string detail;
};

struct Verdict {
  Outcome outcome = Outcome::Inconclusive;
  std::string reason;
  std::vector<ConditionCheck> evidence;

  const ConditionCheck* find(const std::string& name) const {
    for (const auto& c : evidence)
      if (c.name == name) return &c;
    return nullptr;
  }

  std::string summary() const {
    std::string s;
    for (const auto& c : evidence) {
      if (!s.empty()) s += ";";
      s += c.name + "=" + to_string(c.status);
    }
    return s;
  }
};

inline CheckStatus status_of(Tri t) {
  return t == Tri::Yes ? CheckStatus::Passed : t == Tri::No ? CheckStatus::Failed : CheckStatus::Unknown;
}

inline Verdict decide(const CriterionInputs& in) {
  Verdict v;
  v.evidence.push_back({"good_ordinary", status_of(in.good_ordinary), ""});
  v.evidence.push_back({"non_anomalous", status_of(in.non_anomalous), ""});
  v.evidence.push_back({"tamagawa", status_of(in.tamagawa_prime_to_p), ""});
  Tri rank0 = !in.rank ? Tri::Unknown : (*in.rank == 0 ? Tri::Yes : Tri::No);
  v.evidence.push_back({"rank_zero", status_of(rank0), in.rank ? std::to_string(*in.rank) : "?"});
  v.evidence.push_back({"sha_trivial", status_of(in.sha_trivial), ""});
  v.evidence.push_back({"torsion_trivial", status_of(in.torsion_free), ""});
  Tri selmer = (rank0 == Tri::Yes && in.sha_trivial == Tri::Yes && in.torsion_free == Tri::Yes) ? Tri::Yes
                                                                                                 : Tri::Unknown;
  v.evidence.push_back({"selmer_vanishes", status_of(selmer), ""});

  if (in.good_ordinary == Tri::No) {
    v.outcome = Outcome::FailsLocalCondition;
    v.reason = "not good ordinary at p";
  } else if (in.non_anomalous == Tri::No) {
    v.outcome = Outcome::FailsLocalCondition;
    v.reason = "p is anomalous";
  } else if (in.tamagawa_prime_to_p == Tri::No) {
    v.outcome = Outcome::FailsLocalCondition;
    v.reason = "p divides a Tamagawa number";
  } else if (in.good_ordinary == Tri::Yes && in.non_anomalous == Tri::Yes && in.tamagawa_prime_to_p == Tri::Yes &&
             selmer == Tri::Yes) {
    v.outcome = Outcome::ProvenVanishing;
    v.reason = "all conditions established";
  } else {
    v.outcome = Outcome::Inconclusive;
    std::string missing;
    for (const auto& c : v.evidence)
      if (c.status != CheckStatus::Passed && c.name != "selmer_vanishes")
        missing += (missing.empty() ? "" : ",") + c.name;
    v.reason = "missing or negative: " + missing;
  }
  return v;
}

struct GreenbergOptions {
  u64 p = 5;
  u64 torsion_budget = 200;
};

// Local facts for the criterion at p, computed from the curve. Pass the
// output of local_reduction_all to skip recomputing it.
inline CriterionInputs local_inputs(const CurveModel& c, const GreenbergOptions& opt, std::string* diagnostic = nullptr,
                                    const std::vector<ReductionData>* reductions = nullptr) {
  CriterionInputs in;
  const u64 p = opt.p;
  if (c.curve_discriminant() % p == 0) {
    in.good_ordinary = Tri::No;
  } else {
    FrobeniusData fr = frobenius(c, p);
    in.good_ordinary = fr.ordinary ? Tri::Yes : Tri::No;
    in.non_anomalous = fr.anomalous ? Tri::No : Tri::Yes;
  }
  try {
    bool divisible = false;
    std::vector<ReductionData> computed;
    if (!reductions) computed = local_reduction_all(c);
    for (const auto& rd : reductions ? *reductions : computed) {
      if (rd.ell == p) continue;
      if (rd.c % p == 0) divisible = true;
    }
    in.tamagawa_prime_to_p = divisible ? Tri::No : Tri::Yes;
  } catch (const FactorizationError& e) {
    if (diagnostic) *diagnostic = e.what();
    in.tamagawa_prime_to_p = Tri::Unknown;
  }
  if (p == 5) {
    in.torsion_free = rules_out_rational_5_torsion(c, opt.torsion_budget) == TorsionTest::Yes ? Tri::Yes : Tri::Unknown;
  } else {
    // Same injectivity argument for a general p.
    in.torsion_free = Tri::Unknown;
    for (u64 l = 3; l <= opt.torsion_budget; l += 2) {
      if (l == p || !is_prime_u64(l) || c.curve_discriminant() % l == 0) continue;
      if (frobenius(c, l).n_p % p != 0) {
        in.torsion_free = Tri::Yes;
        break;
      }
    }
  }
  return in;
}

inline Verdict greenberg_check(const CurveModel& c, const SelmerFact& facts, const GreenbergOptions& opt = {}) {
  if (opt.p < 5 || !is_prime_u64(opt.p))
    throw std::invalid_argument("greenberg_check: p must be a prime >= 5 (p = 3 is not supported)");
  std::string diag;
  CriterionInputs in = local_inputs(c, opt, &diag);
  in.rank = facts.rank;
  in.sha_trivial = facts.sha_trivial;
  Verdict v = decide(in);
  if (!diag.empty()) v.reason += " [" + diag + "]";
  return v;
}

// ---- Reference files ------------------------------------------------------

using CurveKey = std::pair<BigInt, BigInt>;

struct RowDiagnostic {
  int line = 0;
  std::string message;
};

struct FactsTable {
  std::map<CurveKey, SelmerFact> facts;
  std::vector<RowDiagnostic> malformed;
};

class ReferenceFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    auto b = f.find_first_not_of(" \t");
    auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? "" : f.substr(b, e - b + 1);
  }
  return out;
}

// CSV with header A,B,rank,sha5_trivial; rank in {n, ?}, sha5_trivial in {0, 1, ?}.
inline FactsTable parse_reference_facts(std::istream& in) {
  FactsTable out;
  std::map<CurveKey, int> seen_at;
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ReferenceFileError("reference facts: empty file");
  ++lineno;
  if (!line.empty() && static_cast<unsigned char>(line[0]) == 0xEF) line = line.substr(3);  // BOM
  if (split_csv_line(line) != std::vector<std::string>{"A", "B", "rank", "sha5_trivial"})
    throw ReferenceFileError("reference facts: header must be A,B,rank,sha5_trivial");
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto f = split_csv_line(line);
    if (f.size() != 4) {
      out.malformed.push_back({lineno, "expected 4 fields"});
      continue;
    }
    SelmerFact fact;
    fact.source = FactSource::ReferenceFile;
    CurveKey key;
    try {
      key = {parse_bigint(f[0]), parse_bigint(f[1])};
      if (f[2] != "?") {
        BigInt r = parse_bigint(f[2]);
        if (r < 0) throw std::invalid_argument("negative rank");
        fact.rank = r.convert_to<unsigned>();
      }
      if (f[3] == "1")
        fact.sha_trivial = Tri::Yes;
      else if (f[3] == "0")
        fact.sha_trivial = Tri::No;
      else if (f[3] != "?")
        throw std::invalid_argument("sha5_trivial must be 0, 1 or ?");
    } catch (const std::exception& e) {
      out.malformed.push_back({lineno, e.what()});
      continue;
    }
    if (auto it = out.facts.find(key); it != out.facts.end()) {
      if (!(it->second == fact))
        throw ReferenceFileError("conflicting facts for (" + key.first.str() + "," + key.second.str() + ") on lines " +
                                 std::to_string(seen_at[key]) + " and " + std::to_string(lineno));
      continue;
    }
    out.facts.emplace(key, fact);
    seen_at[key] = lineno;
  }
  return out;
}

inline FactsTable ingest_reference_facts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ReferenceFileError("cannot read " + path);
  return parse_reference_facts(in);
}

struct ReferenceReduction {
  BigInt a, b;
  BigInt ell;
  Kodaira kodaira;
  int conductor_exponent = 0;
  int tamagawa = 1;
};

struct ReductionTable {
  std::vector<ReferenceReduction> rows;
  std::vector<RowDiagnostic> malformed;
};

// CSV with header A,B,ell,kodaira,conductor_exponent,tamagawa.
inline ReductionTable parse_reference_reduction(std::istream& in) {
  ReductionTable out;
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ReferenceFileError("reference reduction: empty file");
  ++lineno;
  if (split_csv_line(line) !=
      std::vector<std::string>{"A", "B", "ell", "kodaira", "conductor_exponent", "tamagawa"})
    throw ReferenceFileError("reference reduction: header must be A,B,ell,kodaira,conductor_exponent,tamagawa");
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto f = split_csv_line(line);
    if (f.size() != 6) {
      out.malformed.push_back({lineno, "expected 6 fields"});
      continue;
    }
    try {
      out.rows.push_back({parse_bigint(f[0]), parse_bigint(f[1]), parse_bigint(f[2]), parse_kodaira(f[3]),
                          std::stoi(f[4]), std::stoi(f[5])});
    } catch (const std::exception& e) {
      out.malformed.push_back({lineno, e.what()});
    }
  }
  return out;
}

inline ReductionTable ingest_reference_reduction(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ReferenceFileError("cannot read " + path);
  return parse_reference_reduction(in);
}

}  // namespace iwc
