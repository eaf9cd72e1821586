// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

// iwacensus: run one census experiment and emit its table.
// Exit status: 0 ok, 1 configuration or IO error, 2 the experiment found
// violations (audit-E) or failed identities (constants).

#include "iwacensus/census.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Elliptic curve census over short Weierstrass models ordered by naive height"};
  iwc::CensusConfig cfg;
  std::string experiment = "constants", format = "csv";
  std::vector<std::string> heights;
  app.add_option("--experiment", experiment, "brumer | density | audit-E | greenberg | constants")
      ->check(CLI::IsMember({"brumer", "density", "audit-E", "greenberg", "constants"}));
  app.add_option("--height-bound", heights, "height bound X (12345, 1e8, 10^8); repeatable or comma separated")
      ->delimiter(',');
  app.add_option("--family", cfg.family, "all | E | pi:<l> | file:<path>");
  app.add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--output", cfg.output, "output file (default stdout)");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--reference-facts", cfg.reference_facts, "CSV of A,B,rank,sha5_trivial");
  app.add_option("--reference-reduction", cfg.reference_reduction,
                 "CSV of A,B,ell,kodaira,conductor_exponent,tamagawa to cross-check against");
  app.add_option("--euler-cutoff", cfg.euler_cutoff, "prime cutoff Z for Euler products");
  app.add_option("--checkpoint-dir", cfg.checkpoint_dir, "directory for resumable shard results");
  app.add_option("--checkpoint-rows", cfg.checkpoint_rows, "A values per shard");
  app.add_flag("--allow-network", cfg.allow_network, "fetch missing rank/Sha facts over HTTP");
  app.add_option("--remote-endpoint", cfg.remote_endpoint, "base URL for remote facts");
  CLI11_PARSE(app, argc, argv);

  try {
    cfg.experiment = iwc::parse_experiment(experiment);
    cfg.format = format == "json" ? iwc::Format::Json : iwc::Format::Csv;
    for (const auto& h : heights) cfg.heights.push_back(iwc::parse_height(h));
    iwc::RunResult res = iwc::run(cfg);
    if (!cfg.reference_reduction.empty()) {
      iwc::ReductionTable ref = iwc::ingest_reference_reduction(cfg.reference_reduction);
      std::size_t mismatches = 0;
      for (const auto& row : ref.rows) {
        iwc::ReductionData r = iwc::tate_local(iwc::new_curve(row.a, row.b), row.ell);
        if (r.kodaira != row.kodaira || r.f != row.conductor_exponent || r.c != row.tamagawa) {
          ++mismatches;
          res.notes.push_back("reduction mismatch " + row.a.str() + "," + row.b.str() + " at " + row.ell.str());
        }
      }
      for (const auto& m : ref.malformed)
        res.notes.push_back("reference reduction line " + std::to_string(m.line) + ": " + m.message);
      res.notes.push_back("reference reduction rows=" + std::to_string(ref.rows.size()) +
                          " mismatches=" + std::to_string(mismatches));
      if (mismatches) res.exit_code = 2;
    }
    iwc::emit(res.table, cfg.format, cfg.output);
    for (const auto& n : res.notes) std::cerr << n << "\n";
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "iwacensus: error: " << e.what() << "\n";
    return 1;
  }
}
