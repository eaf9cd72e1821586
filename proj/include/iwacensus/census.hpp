// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

// Census orchestration: experiments, sharded execution with checkpoints,
// and table emission. CSV is canonical; JSON carries the same strings.

#pragma once

#include "iwacensus/enumeration.hpp"
#include "iwacensus/iwasawa_criterion.hpp"
#include "iwacensus/local_conditions.hpp"
#include "iwacensus/reduction.hpp"
#include "iwacensus/remote_facts.hpp"

#include <json.hpp>

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace iwc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { Brumer, Density, AuditE, Greenberg, Constants };
enum class Format { Csv, Json };

inline std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Brumer: return "brumer";
    case Experiment::Density: return "density";
    case Experiment::AuditE: return "audit-E";
    case Experiment::Greenberg: return "greenberg";
    case Experiment::Constants: return "constants";
  }
  return "?";
}

inline Experiment parse_experiment(const std::string& s) {
  for (Experiment e : {Experiment::Brumer, Experiment::Density, Experiment::AuditE, Experiment::Greenberg,
                       Experiment::Constants})
    if (to_string(e) == s) return e;
  throw ConfigError("unknown experiment '" + s + "'");
}

// Accepts 12345, 1e8 and 10^8.
inline BigInt parse_height(const std::string& s) {
  auto digits = [&](const std::string& t) {
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("bad height bound '" + s + "'");
    return BigInt(t);
  };
  if (auto e = s.find_first_of("eE"); e != std::string::npos)
    return digits(s.substr(0, e)) * ipow(BigInt(10), digits(s.substr(e + 1)).convert_to<unsigned>());
  if (auto c = s.find('^'); c != std::string::npos)
    return ipow(digits(s.substr(0, c)), digits(s.substr(c + 1)).convert_to<unsigned>());
  return digits(s);
}

struct CensusConfig {
  Experiment experiment = Experiment::Constants;
  std::vector<BigInt> heights;  // empty: experiment default
  std::string family = "all";   // all | E | pi:<l> | file:<path>
  unsigned jobs = 1;
  std::string output;  // empty: stdout
  Format format = Format::Csv;
  std::string reference_facts;
  std::string reference_reduction;
  i64 checkpoint_rows = 64;  // A-rows per shard
  u64 euler_cutoff = 1'000'000;
  std::string checkpoint_dir;
  bool allow_network = false;
  std::string remote_endpoint = "https://www.lmfdb.org/api/ec_curvedata/";
  GreenbergOptions greenberg;

  void validate() const {
    for (const auto& x : heights)
      if (x < 1) throw ConfigError("height bound must be >= 1");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (euler_cutoff < 7) throw ConfigError("euler cutoff must be >= 7");
    if (checkpoint_rows < 1) throw ConfigError("checkpoint interval must be >= 1");
  }

  std::vector<BigInt> effective_heights() const {
    if (!heights.empty()) return heights;
    auto p = [](unsigned e) { return ipow(BigInt(10), e); };
    switch (experiment) {
      case Experiment::Brumer: return {p(8)};
      case Experiment::Density: return family == "E" ? std::vector<BigInt>{p(11), p(12), p(13)}
                                                     : std::vector<BigInt>{p(6), p(7), p(8)};
      case Experiment::AuditE: return {p(13)};
      case Experiment::Greenberg: return {p(4)};
      case Experiment::Constants: return {};
    }
    return {};
  }
};

// ---- Tables ---------------------------------------------------------------

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& fs) {
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fs[i]);
    }
    out += '\n';
  };
  line(t.columns);
  for (const auto& r : t.rows) line(r);
  return out;
}

inline std::string to_json(const Table& t) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) o[t.columns[i]] = i < r.size() ? r[i] : "";
    arr.push_back(std::move(o));
  }
  return arr.dump(1) + "\n";
}

inline std::string render(const Table& t, Format f) { return f == Format::Csv ? to_csv(t) : to_json(t); }

// Reads what to_csv writes (quoted fields, embedded newlines).
inline Table parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> cur;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      cur.push_back(field);
      field.clear();
      any = true;
    } else if (c == '\n') {
      cur.push_back(field);
      lines.push_back(cur);
      cur.clear();
      field.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
      any = true;
    }
  }
  if (any) {
    cur.push_back(field);
    lines.push_back(cur);
  }
  Table t;
  if (lines.empty()) return t;
  t.columns = lines[0];
  t.rows.assign(lines.begin() + 1, lines.end());
  return t;
}

// Write via a temporary sibling and rename; the temporary is removed on failure.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
      out << content;
      out.flush();
      if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---- Sharded execution ------------------------------------------------------

struct Checkpoint {
  std::filesystem::path dir;
  std::string fingerprint;
};

// Runs work(i) for i in [0, n) on `jobs` threads and returns the payloads in
// index order. With a checkpoint, finished payloads are persisted per shard
// and reused on the next run with the same fingerprint. after_shard(k) is
// called by the coordinator after the k-th completion; throwing from it
// stops the run.
inline std::vector<std::string> run_shards(std::size_t n, unsigned jobs,
                                           const std::function<std::string(std::size_t)>& work,
                                           const std::optional<Checkpoint>& ckpt = std::nullopt,
                                           const std::function<void(std::size_t)>& after_shard = {}) {
  namespace fs = std::filesystem;
  std::vector<std::optional<std::string>> out(n);
  auto shard_path = [&](std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof name, "shard-%06zu.part", i);
    return ckpt->dir / name;
  };
  std::size_t completed = 0;
  if (ckpt) {
    fs::create_directories(ckpt->dir);
    fs::path manifest = ckpt->dir / "manifest";
    const std::string expect = ckpt->fingerprint + "\nshards " + std::to_string(n) + "\n";
    if (fs::exists(manifest)) {
      if (read_file(manifest) != expect)
        throw ConfigError("checkpoint directory " + ckpt->dir.string() + " belongs to a different run");
    } else {
      write_atomic(manifest, expect);
    }
    for (std::size_t i = 0; i < n; ++i)
      if (fs::exists(shard_path(i))) {
        out[i] = read_file(shard_path(i));
        ++completed;
      }
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::exception_ptr err;
  auto fail = [&](std::exception_ptr e) {
    std::lock_guard<std::mutex> g(mu);
    if (!err) err = e;
    stop = true;
  };
  auto worker = [&] {
    for (;;) {
      if (stop) return;
      std::size_t i = next++;
      if (i >= n) return;
      if (out[i]) continue;
      std::string payload;
      try {
        payload = work(i);
      } catch (...) {
        fail(std::current_exception());
        return;
      }
      std::lock_guard<std::mutex> g(mu);
      if (stop) return;
      try {
        if (ckpt) write_atomic(shard_path(i), payload);
        out[i] = std::move(payload);
        ++completed;
        if (after_shard) after_shard(completed);
      } catch (...) {
        if (!err) err = std::current_exception();
        stop = true;
        return;
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);
  std::vector<std::string> result;
  result.reserve(n);
  for (auto& o : out) result.push_back(std::move(*o));
  return result;
}

// ---- Family selection ---------------------------------------------------------

struct FamilySelection {
  enum class Kind { All, E, Pi, File };
  Kind kind = Kind::All;
  std::string selector;
  CongruenceFamily family = family_all();
};

inline FamilySelection select_family(const std::string& selector) {
  FamilySelection s;
  s.selector = selector;
  if (selector == "all") return s;
  if (selector == "E") {
    s.kind = FamilySelection::Kind::E;
    s.family = family_E();
    return s;
  }
  if (selector.rfind("pi:", 0) == 0) {
    u64 l = 0;
    try {
      l = std::stoull(selector.substr(3));
    } catch (const std::exception&) {
      throw ConfigError("bad family '" + selector + "'");
    }
    if (!is_prime_u64(l)) throw ConfigError("family " + selector + ": not a prime");
    s.kind = FamilySelection::Kind::Pi;
    s.family = family_pi(l);
    return s;
  }
  if (selector.rfind("file:", 0) == 0) {
    s.kind = FamilySelection::Kind::File;
    try {
      s.family = load_family(selector.substr(5));
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    return s;
  }
  throw ConfigError("unknown family '" + selector + "' (expected all, E, pi:<l> or file:<path>)");
}

// Explicit conditions evaluated on machine integers (no default rule).
inline bool explicit_holds_fast(const CongruenceFamily& f, i64 a, i64 b) {
  if (f.family_positive_a() && a <= 0) return false;
  for (const auto& [l, c] : f.explicit_conditions()) {
    if (c.positive_a && a <= 0) return false;
    const i64 m = i64(c.modulus());
    if (!c.predicate(u64(((a % m) + m) % m), u64(((b % m) + m) % m))) return false;
  }
  return true;
}

// ---- Records ------------------------------------------------------------------

struct CensusRecord {
  BigInt a, b, height, disc_ab;
  std::string in_E;        // 1, 0 or ? (factorization failed)
  std::string bad_primes;  // l:kodaira:f:c;...
  std::string a5, n5, ordinary, anomalous;  // empty when bad at 5
  std::string torsion5;
  std::string verdict;
  std::string evidence;

  static std::vector<std::string> columns() {
    return {"A",  "B",        "height",    "disc_ab",  "in_E",    "bad_primes", "a5",
            "n5", "ordinary", "anomalous", "torsion5", "verdict", "evidence"};
  }
  std::vector<std::string> fields() const {
    return {a.str(), b.str(), height.str(), disc_ab.str(), in_E,    bad_primes, a5,
            n5,      ordinary, anomalous,   torsion5,      verdict, evidence};
  }
};

struct CurveAnalysis {
  CensusRecord record;
  std::optional<std::vector<ReductionData>> reductions;
  std::optional<FrobeniusData> frob5;
  Verdict verdict;
};

inline CurveAnalysis analyze_curve(const CurveModel& c, const SelmerFact& facts, const GreenbergOptions& opt,
                                   std::optional<bool> in_E = std::nullopt) {
  CurveAnalysis out;
  CensusRecord& r = out.record;
  r.a = c.a();
  r.b = c.b();
  r.height = c.height();
  r.disc_ab = c.naive_discriminant();
  std::string diag;
  try {
    out.reductions = local_reduction_all(c);
    for (const auto& rd : *out.reductions) {
      if (rd.type == ReductionType::Good) continue;
      if (!r.bad_primes.empty()) r.bad_primes += ";";
      r.bad_primes += rd.ell.str() + ":" + to_string(rd.kodaira) + ":" + std::to_string(rd.f) + ":" +
                      std::to_string(rd.c);
    }
  } catch (const FactorizationError& e) {
    r.bad_primes = "?";
    diag = e.what();
  }
  if (in_E) {
    r.in_E = *in_E ? "1" : "0";
  } else {
    try {
      r.in_E = family_E().contains(c) ? "1" : "0";
    } catch (const FactorizationError&) {
      r.in_E = "?";
    }
  }
  if (c.curve_discriminant() % 5 != 0) {
    out.frob5 = frobenius(c, 5);
    r.a5 = std::to_string(out.frob5->a_p);
    r.n5 = std::to_string(out.frob5->n_p);
    r.ordinary = out.frob5->ordinary ? "1" : "0";
    r.anomalous = out.frob5->anomalous ? "1" : "0";
  }
  r.torsion5 = rules_out_rational_5_torsion(c, opt.torsion_budget) == TorsionTest::Yes ? "yes" : "inconclusive";
  CriterionInputs in = out.reductions ? local_inputs(c, opt, &diag, &*out.reductions) : local_inputs(c, opt, &diag);
  in.rank = facts.rank;
  in.sha_trivial = facts.sha_trivial;
  out.verdict = decide(in);
  if (!diag.empty()) out.verdict.reason += " [" + diag + "]";
  r.verdict = to_string(out.verdict.outcome);
  r.evidence = out.verdict.summary();
  return out;
}

// ---- Audit of E -----------------------------------------------------------------

struct AuditViolation {
  CensusRecord record;
  std::vector<std::string> failed;
};

// Properties every member of E must have. Empty result means all hold.
inline std::vector<std::string> audit_member(const CurveModel& c, const CurveAnalysis& an,
                                             const CongruenceFamily& e) {
  std::vector<std::string> failed;
  const ReductionData* at2 = nullptr;
  if (an.reductions)
    for (const auto& rd : *an.reductions)
      if (rd.ell == 2) at2 = &rd;
  if (!at2 || at2->type != ReductionType::Additive) failed.push_back("additive_at_2");
  if (j_valuation(c, 2) != 0) failed.push_back("v2_j_zero");
  OddPart op = odd_part_of_naive_discriminant(c);
  if (!(op.odd > 0 && mod(op.odd, BigInt(4)) == 1)) failed.push_back("odd_disc_positive_1_mod_4");
  if (!an.frob5 || an.frob5->a_p != -3 || an.frob5->n_p != 9 || !an.frob5->ordinary || an.frob5->anomalous)
    failed.push_back("a5_minus_3_n5_9");
  bool tam_ok = an.reductions.has_value();
  if (an.reductions)
    for (const auto& rd : *an.reductions)
      if (rd.c % 5 == 0) tam_ok = false;
  if (!tam_ok) failed.push_back("tamagawa_prime_to_5");
  for (const char* name : {"non_anomalous", "tamagawa"}) {
    const ConditionCheck* chk = an.verdict.find(name);
    if (!chk || chk->status != CheckStatus::Passed) failed.push_back(std::string("evidence_") + name);
  }
  try {
    if (!e.contains(twist_by_minus_one(c))) failed.push_back("twist_closure");
  } catch (const FactorizationError&) {
    failed.push_back("twist_closure");
  }
  return failed;
}

// ---- Runner ---------------------------------------------------------------------

struct RunResult {
  Table table;
  std::vector<std::string> notes;  // human-readable summary lines
  int exit_code = 0;
};

struct RunHooks {
  std::function<void(std::size_t)> after_shard;
};

namespace detail {

inline std::optional<Checkpoint> checkpoint_for(const CensusConfig& cfg, const BigInt& x, const std::string& extra) {
  if (cfg.checkpoint_dir.empty()) return std::nullopt;
  std::string tag = to_string(cfg.experiment) + "-X" + x.str();
  std::string fp = "iwacensus-checkpoint v1\nexperiment " + to_string(cfg.experiment) + "\nX " + x.str() +
                   "\nfamily " + cfg.family + "\nrows " + std::to_string(cfg.checkpoint_rows) + "\n" + extra;
  return Checkpoint{std::filesystem::path(cfg.checkpoint_dir) / tag, fp};
}

inline std::vector<u64> parse_counts(const std::string& payload) {
  std::vector<u64> v;
  std::istringstream in(payload);
  std::string tok;
  while (std::getline(in, tok, ',')) v.push_back(std::stoull(tok));
  return v;
}

inline std::string interval_str(const Interval& v) { return to_string(v, 12); }

struct FactSources {
  FactsTable file;
  std::unique_ptr<RemoteFactClient> remote;
  std::mutex warn_mu;
  std::vector<std::string> warnings;
  std::size_t network_calls = 0, cache_hits = 0;
};

// A shard's records as CSV body lines (no header).
inline std::string records_payload(const std::vector<CensusRecord>& recs) {
  Table t;
  t.columns = {};
  std::string out;
  for (const auto& r : recs) {
    auto fs = r.fields();
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fs[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::vector<CurveModel> shard_curves(const FamilySelection& fam, const std::vector<ResidueClassSet>* lattice,
                                           const HeightBound& h, const RangeShard& s) {
  std::vector<CurveModel> out;
  if (lattice) {
    for_each_in_lattice(*lattice, h, true,
                        [&](i64 a, i64 b) { out.push_back(CurveModel::trusted(a, b)); }, s.a_lo, s.a_hi);
    return out;
  }
  for_each_pair(h, s.a_lo, s.a_hi, [&](i64 a, i64 b) {
    if (explicit_holds_fast(fam.family, a, b)) out.push_back(CurveModel::trusted(a, b));
  });
  return out;
}

inline SelmerFact lookup_fact(FactSources& src, const CurveKey& k) {
  if (auto it = src.file.facts.find(k); it != src.file.facts.end()) return it->second;
  return {};
}

}  // namespace detail

inline RunResult run_brumer(const CensusConfig& cfg, const RunHooks& hooks = {}) {
  RunResult res;
  res.table.columns = {"X", "count", "prediction", "ratio"};
  const Interval zeta = zeta_10(Rational(1, 1000000000000LL)).value;
  for (const auto& x : cfg.effective_heights()) {
    HeightBound h(x);
    auto shards = shard_by_rows(h, cfg.checkpoint_rows);
    auto payloads = run_shards(
        shards.size(), cfg.jobs,
        [&](std::size_t i) { return std::to_string(count_pairs(h, shards[i].a_lo, shards[i].a_hi)); },
        detail::checkpoint_for(cfg, x, ""), hooks.after_shard);
    u64 total = 0;
    for (const auto& p : payloads) total += std::stoull(p);
    Interval pred = brumer_prediction(x, zeta);
    Interval ratio = round_outward(Interval(Rational(total)) / pred, 128);
    res.table.rows.push_back({x.str(), std::to_string(total), detail::interval_str(pred), detail::interval_str(ratio)});
    res.notes.push_back("brumer X=" + x.str() + " count=" + std::to_string(total) + " ratio=" +
                        detail::interval_str(ratio));
  }
  return res;
}

inline RunResult run_density(const CensusConfig& cfg, const RunHooks& hooks = {}) {
  RunResult res;
  res.table.columns = {"family",           "variant",           "X",             "members",
                       "population",       "empirical_density", "predicted_density", "density_ratio",
                       "predicted_count",  "count_ratio"};
  FamilySelection fam = select_family(cfg.family);
  const Interval zeta = zeta_10(Rational(1, 1000000000000LL)).value;
  for (const auto& x : cfg.effective_heights()) {
    HeightBound h(x);
    auto shards = shard_by_rows(h, cfg.checkpoint_rows);
    const Interval x56 = pow_five_sixths(x);
    if (fam.kind == FamilySelection::Kind::E) {
      const auto classes = fam.family.lattice_classes();
      auto payloads = run_shards(
          shards.size(), cfg.jobs,
          [&](std::size_t i) {
            u64 lattice = 0, members = 0;
            for_each_in_lattice(classes, h, true, [&](i64 a, i64 b) {
              ++lattice;
              if (fam.family.contains(CurveModel::trusted(a, b))) ++members;
            }, shards[i].a_lo, shards[i].a_hi);
            return std::to_string(lattice) + "," + std::to_string(members);
          },
          detail::checkpoint_for(cfg, x, ""), hooks.after_shard);
      u64 lattice = 0, members = 0;
      for (const auto& p : payloads) {
        auto v = detail::parse_counts(p);
        lattice += v.at(0);
        members += v.at(1);
      }
      // Within the lattice (minimal pairs meeting the conditions at 2 and 5),
      // the remaining conditions have density
      //   zeta(10) (1 - 2^-10)(1 - 5^-10) x_3 prod_{l>=7}(1 - 2l^-2 + l^-3).
      const Interval p7 = euler_product_ge7(cfg.euler_cutoff).value;
      const Rational corr = (1 - Rational(1, 1024)) * (1 - Rational(1, 9765625));
      for (const auto& [variant, x3] : {std::pair<std::string, Rational>{"enumerated", minimal_measure(pi_condition(3))},
                                        {"published", local3_published()}}) {
        Interval cond = round_outward(zeta * Interval(corr * x3) * p7, 256);
        Interval lead = round_outward(Interval(Rational(4) * e_explicit_part() * x3) * p7, 256);
        Interval pc = round_outward(lead * x56, 128);
        std::string emp = lattice ? to_string(Rational(members, lattice)) : "";
        std::string dr = lattice ? detail::interval_str(round_outward(Interval(Rational(members, lattice)) / cond, 128)) : "";
        res.table.rows.push_back({fam.selector, variant, x.str(), std::to_string(members), std::to_string(lattice), emp,
                                  detail::interval_str(cond), dr, detail::interval_str(pc),
                                  detail::interval_str(round_outward(Interval(Rational(members)) / pc, 128))});
      }
      res.notes.push_back("density E X=" + x.str() + " lattice=" + std::to_string(lattice) +
                          " members=" + std::to_string(members));
      continue;
    }
    auto payloads = run_shards(
        shards.size(), cfg.jobs,
        [&](std::size_t i) {
          u64 pop = 0, members = 0;
          for_each_pair(h, shards[i].a_lo, shards[i].a_hi, [&](i64 a, i64 b) {
            ++pop;
            if (explicit_holds_fast(fam.family, a, b)) ++members;
          });
          return std::to_string(pop) + "," + std::to_string(members);
        },
        detail::checkpoint_for(cfg, x, ""), hooks.after_shard);
    u64 pop = 0, members = 0;
    for (const auto& p : payloads) {
      auto v = detail::parse_counts(p);
      pop += v.at(0);
      members += v.at(1);
    }
    DensityPrediction pred = predicted_count(fam.family, cfg.euler_cutoff);
    Interval pc = pred.predicted_count(x);
    Rational emp(members, pop);
    res.table.rows.push_back({fam.selector, "exact", x.str(), std::to_string(members), std::to_string(pop),
                              to_string(emp), detail::interval_str(pred.density),
                              detail::interval_str(round_outward(Interval(emp) / pred.density, 128)),
                              detail::interval_str(pc),
                              detail::interval_str(round_outward(Interval(Rational(members)) / pc, 128))});
    res.notes.push_back("density " + fam.selector + " X=" + x.str() + " members=" + std::to_string(members) + "/" +
                        std::to_string(pop));
  }
  return res;
}

inline RunResult run_constants(const CensusConfig& cfg) {
  RunResult res;
  res.table.columns = {"quantity", "value", "kind"};
  auto& rows = res.table.rows;
  auto exact = [&](const std::string& n, const Rational& v) { rows.push_back({n, to_string(v), "exact"}); };
  auto interval = [&](const std::string& n, const Interval& v) {
    rows.push_back({n, detail::interval_str(v), "interval"});
  };
  const EulerProductValue z = zeta_10(Rational(1, 1000000000000LL));
  const Interval cf = zeta_10_closed_form();
  const EulerProductValue p7 = euler_product_ge7(cfg.euler_cutoff);
  interval("zeta_10", z.value);
  rows.push_back({"zeta_10_width", to_scientific(z.value.width(), 3, Round::Up), "upper_bound"});
  interval("zeta_10_closed_form", cf);
  rows.push_back({"zeta_10_contains_closed_form", z.value.contains(cf) ? "holds" : "fails", "check"});
  interval("euler_product_ge7", p7.value);
  rows.push_back({"euler_product_ge7_cutoff", std::to_string(cfg.euler_cutoff), "exact"});
  rows.push_back({"euler_product_ge7_width", to_scientific(p7.value.width(), 3, Round::Up), "upper_bound"});
  exact("measure_E2", minimal_measure(e2_condition()));
  exact("measure_E5", minimal_measure(e5_condition()));
  exact("density_E2", local_density(e2_condition()));
  exact("density_E5", local_density(e5_condition()));
  exact("explicit_part_E", minimal_measure(e2_condition()) * minimal_measure(e5_condition()));
  MeasureCount k3 = count_measure(pi_condition(3));
  rows.push_back({"pi_3_residue_count", std::to_string(k3.satisfied) + "/" + std::to_string(k3.total), "exact"});
  const Rational x3_enum = minimal_measure(pi_condition(3));
  exact("local_factor_3_enumerated", x3_enum);
  exact("local_factor_3_published", local3_published());
  rows.push_back({"local_factor_3_agreement", x3_enum == local3_published() ? "agree" : "DISCREPANCY", "check"});
  MeasureCount k7 = count_measure(pi_condition(7));
  rows.push_back({"pi_7_residue_count", std::to_string(k7.satisfied) + "/" + std::to_string(k7.total), "exact"});
  for (const auto& [variant, x3] :
       {std::pair<std::string, Rational>{"enumerated", x3_enum}, {"published", local3_published()}}) {
    Interval d = round_outward(z.value * Interval(e_explicit_part() * x3) * p7.value, 256);
    interval("density_E_" + variant, d);
  }
  interval("bound_constant", bound_constant(cfg.euler_cutoff).value);
  exact("bound_rational_part", bound_rational_part());
  for (const auto& id : constant_identities())
    rows.push_back({"identity:" + id.name, id.holds() ? "holds" : "fails", "check"});
  for (const auto& r : rows) res.notes.push_back(r[0] + " = " + r[1]);
  bool ok = true;
  for (const auto& id : constant_identities()) ok = ok && id.holds();
  if (!ok || !z.value.contains(cf)) res.exit_code = 2;
  return res;
}

// Greenberg census and the E audit share the per-curve record pipeline.
inline RunResult run_records(const CensusConfig& cfg, const RunHooks& hooks = {}) {
  RunResult res;
  res.table.columns = CensusRecord::columns();
  const bool audit = cfg.experiment == Experiment::AuditE;
  FamilySelection fam = select_family(audit ? "E" : cfg.family);
  detail::FactSources src;
  if (!cfg.reference_facts.empty()) {
    src.file = ingest_reference_facts(cfg.reference_facts);
    for (const auto& m : src.file.malformed)
      res.notes.push_back("reference facts line " + std::to_string(m.line) + ": " + m.message);
  }
  RemoteConfig rc;
  rc.endpoint = cfg.remote_endpoint;
  rc.cache_dir = default_cache_dir();
  rc.allow_network = cfg.allow_network;
  const bool use_remote = cfg.allow_network || std::filesystem::exists(rc.cache_dir);
  if (use_remote) src.remote = std::make_unique<RemoteFactClient>(rc);

  std::optional<std::vector<ResidueClassSet>> lattice;
  if (fam.kind == FamilySelection::Kind::E) lattice = fam.family.lattice_classes();
  u64 members_total = 0, violations_total = 0;
  std::map<std::string, u64> kodaira_at_2;
  std::mutex agg_mu;
  for (const auto& x : cfg.effective_heights()) {
    HeightBound h(x);
    auto shards = shard_by_rows(h, cfg.checkpoint_rows);
    std::string extra = "facts " + cfg.reference_facts + "\nremote " + (use_remote ? "1" : "0") + "\np " +
                        std::to_string(cfg.greenberg.p) + "\ntorsion " + std::to_string(cfg.greenberg.torsion_budget) +
                        "\n";
    // Shard payload: record lines, then a trailer "#stats members violations k2..." for aggregation.
    auto payloads = run_shards(
        shards.size(), cfg.jobs,
        [&](std::size_t i) {
          std::vector<CurveModel> curves = detail::shard_curves(fam, lattice ? &*lattice : nullptr, h, shards[i]);
          std::vector<CurveModel> kept;
          std::vector<bool> membership;
          for (const auto& c : curves) {
            if (fam.kind == FamilySelection::Kind::E) {
              bool in = false;
              try {
                in = fam.family.contains(c);
              } catch (const FactorizationError&) {
              }
              if (!in) continue;
              membership.push_back(true);
            } else {
              membership.push_back(false);
            }
            kept.push_back(c);
          }
          std::map<CurveKey, SelmerFact> remote;
          if (src.remote) {
            std::vector<CurveKey> want;
            for (const auto& c : kept)
              if (!src.file.facts.count({c.a(), c.b()})) want.push_back({c.a(), c.b()});
            if (!want.empty()) {
              RemoteResult rr = src.remote->fetch(want);
              remote = std::move(rr.facts);
              std::lock_guard<std::mutex> g(src.warn_mu);
              src.warnings.insert(src.warnings.end(), rr.warnings.begin(), rr.warnings.end());
              src.network_calls += rr.network_calls;
              src.cache_hits += rr.cache_hits;
            }
          }
          std::vector<CensusRecord> recs;
          std::string violations;
          u64 nviol = 0;
          std::map<std::string, u64> k2;
          for (std::size_t j = 0; j < kept.size(); ++j) {
            const CurveModel& c = kept[j];
            CurveKey key{c.a(), c.b()};
            SelmerFact f = detail::lookup_fact(src, key);
            if (f.source == FactSource::Absent)
              if (auto it = remote.find(key); it != remote.end()) f = it->second;
            std::optional<bool> in_e;
            if (fam.kind == FamilySelection::Kind::E) in_e = membership[j];
            CurveAnalysis an = analyze_curve(c, f, cfg.greenberg, in_e);
            if (audit) {
              auto failed = audit_member(c, an, fam.family);
              if (!failed.empty()) {
                ++nviol;
                std::string why;
                for (const auto& s : failed) why += (why.empty() ? "" : "|") + s;
                violations += "#violation " + why + " " + detail::records_payload({an.record});
              }
              if (an.reductions)
                for (const auto& rd : *an.reductions)
                  if (rd.ell == 2) ++k2[to_string(rd.kodaira)];
            }
            recs.push_back(std::move(an.record));
          }
          std::string payload = detail::records_payload(recs) + violations + "#stats " + std::to_string(recs.size()) +
                                " " + std::to_string(nviol);
          for (const auto& [k, n] : k2) payload += " " + k + "=" + std::to_string(n);
          return payload + "\n";
        },
        detail::checkpoint_for(cfg, x, extra), hooks.after_shard);
    std::string body;
    for (const auto& p : payloads) {
      std::istringstream in(p);
      std::string line;
      std::string pending;
      while (std::getline(in, line)) {
        if (line.rfind("#stats ", 0) == 0) {
          std::istringstream ls(line.substr(7));
          u64 m = 0, v = 0;
          ls >> m >> v;
          members_total += m;
          violations_total += v;
          std::string kv;
          while (ls >> kv) {
            auto eq = kv.find('=');
            kodaira_at_2[kv.substr(0, eq)] += std::stoull(kv.substr(eq + 1));
          }
        } else if (line.rfind("#violation ", 0) == 0) {
          res.notes.push_back(line.substr(1));
        } else {
          body += line + "\n";
        }
      }
    }
    Table part = parse_csv(to_csv(Table{CensusRecord::columns(), {}}) + body);
    for (auto& r : part.rows) res.table.rows.push_back(std::move(r));
  }
  std::lock_guard<std::mutex> g(agg_mu);
  if (audit) {
    res.notes.insert(res.notes.begin(), "audit-E members=" + std::to_string(members_total) +
                                            " violations=" + std::to_string(violations_total));
    std::string dist = "audit-E kodaira_at_2";
    for (const auto& [k, n] : kodaira_at_2) dist += " " + k + "=" + std::to_string(n);
    res.notes.push_back(dist);
    if (violations_total) res.exit_code = 2;
  } else {
    std::map<std::string, u64> outcomes;
    for (const auto& r : res.table.rows) ++outcomes[r[11]];
    std::string s = "greenberg curves=" + std::to_string(res.table.rows.size());
    for (const auto& [k, n] : outcomes) s += " " + k + "=" + std::to_string(n);
    res.notes.push_back(s);
  }
  for (const auto& w : src.warnings) res.notes.push_back("remote: " + w);
  if (src.remote)
    res.notes.push_back("remote network_calls=" + std::to_string(src.network_calls) +
                        " cache_hits=" + std::to_string(src.cache_hits));
  return res;
}

inline RunResult run(const CensusConfig& cfg, const RunHooks& hooks = {}) {
  cfg.validate();
  switch (cfg.experiment) {
    case Experiment::Brumer: return run_brumer(cfg, hooks);
    case Experiment::Density: return run_density(cfg, hooks);
    case Experiment::Constants: return run_constants(cfg);
    case Experiment::AuditE:
    case Experiment::Greenberg: return run_records(cfg, hooks);
  }
  return {};
}

// Render and write the table; partial files are removed on failure.
inline void emit(const Table& t, Format f, const std::string& path) {
  const std::string text = render(t, f);
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  write_atomic(path, text);
}

}  // namespace iwc
