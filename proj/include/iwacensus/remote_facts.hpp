// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

// Optional Selmer facts from an LMFDB-style REST endpoint.
//
// Request:  GET <endpoint>?ainvs=0,0,0,A,B&_format=json
// Response: {"data": [{"rank": r, "sha": s, ...}]}
//
// Bodies are cached verbatim as <cache_dir>/<A>_<B>.json; a cached body is
// always used in preference to the network. Any failure degrades to an
// unknown fact with a warning.

#pragma once

#include "iwacensus/iwasawa_criterion.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace iwc {

struct RemoteConfig {
  std::string endpoint;  // e.g. https://www.lmfdb.org/api/ec_curvedata/
  std::filesystem::path cache_dir;
  bool allow_network = false;
  std::chrono::milliseconds min_interval{250};
  std::chrono::seconds timeout{10};
};

// IWACENSUS_CACHE_DIR overrides the default cache location.
inline std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("IWACENSUS_CACHE_DIR"); env && *env) return env;
  return std::filesystem::path(".iwacensus-cache");
}

struct RemoteResult {
  std::map<CurveKey, SelmerFact> facts;
  std::vector<std::string> warnings;
  std::size_t network_calls = 0;
  std::size_t cache_hits = 0;
};

// Parse one cached or fetched body. Missing fields stay unknown.
inline SelmerFact parse_remote_body(const std::string& body, u64 p = 5) {
  SelmerFact f;
  f.source = FactSource::Remote;
  auto j = nlohmann::json::parse(body);
  const nlohmann::json* rec = nullptr;
  if (j.is_object() && j.contains("data") && j["data"].is_array() && !j["data"].empty())
    rec = &j["data"][0];
  else if (j.is_object())
    rec = &j;
  if (!rec) return f;
  if (rec->contains("rank") && (*rec)["rank"].is_number_integer() && (*rec)["rank"].get<long long>() >= 0)
    f.rank = (*rec)["rank"].get<unsigned>();
  if (rec->contains("sha") && (*rec)["sha"].is_number_integer()) {
    long long sha = (*rec)["sha"].get<long long>();
    f.sha_trivial = sha % static_cast<long long>(p) == 0 ? Tri::No : Tri::Yes;
  }
  return f;
}

class RemoteFactClient {
 public:
  explicit RemoteFactClient(RemoteConfig cfg) : cfg_(std::move(cfg)) {
    auto pos = cfg_.endpoint.find("://");
    std::size_t slash = cfg_.endpoint.find('/', pos == std::string::npos ? 0 : pos + 3);
    base_ = slash == std::string::npos ? cfg_.endpoint : cfg_.endpoint.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : cfg_.endpoint.substr(slash);
  }

  std::filesystem::path cache_path(const CurveKey& k) const {
    return cfg_.cache_dir / (k.first.str() + "_" + k.second.str() + ".json");
  }

  RemoteResult fetch(const std::vector<CurveKey>& curves) {
    std::lock_guard<std::mutex> lock(mu_);
    RemoteResult out;
    for (const auto& k : curves) {
      SelmerFact unknown;
      unknown.source = FactSource::Remote;
      std::string body;
      if (read_cache(k, body)) {
        ++out.cache_hits;
      } else if (!cfg_.allow_network) {
        out.facts[k] = unknown;
        continue;
      } else {
        ++out.network_calls;
        std::string err;
        if (!get(k, body, err)) {
          out.warnings.push_back("(" + k.first.str() + "," + k.second.str() + "): " + err);
          out.facts[k] = unknown;
          continue;
        }
        write_cache(k, body);
      }
      try {
        out.facts[k] = parse_remote_body(body);
      } catch (const std::exception& e) {
        out.warnings.push_back("(" + k.first.str() + "," + k.second.str() + "): unparsable response: " + e.what());
        out.facts[k] = unknown;
      }
    }
    return out;
  }

 private:
  bool read_cache(const CurveKey& k, std::string& body) const {
    std::ifstream in(cache_path(k), std::ios::binary);
    if (!in) return false;
    body.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return true;
  }

  void write_cache(const CurveKey& k, const std::string& body) const {
    std::error_code ec;
    std::filesystem::create_directories(cfg_.cache_dir, ec);
    auto final_path = cache_path(k);
    auto tmp = final_path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      out << body;
    }
    std::filesystem::rename(tmp, final_path, ec);
  }

  bool get(const CurveKey& k, std::string& body, std::string& err) {
    auto now = std::chrono::steady_clock::now();
    if (last_ && now - *last_ < cfg_.min_interval) std::this_thread::sleep_for(cfg_.min_interval - (now - *last_));
    last_ = std::chrono::steady_clock::now();
    try {
      httplib::Client cli(base_);
      cli.set_connection_timeout(cfg_.timeout);
      cli.set_read_timeout(cfg_.timeout);
      std::string query = path_ + "?ainvs=0,0,0," + k.first.str() + "," + k.second.str() + "&_format=json";
      auto res = cli.Get(query);
      if (!res) {
        err = "request failed: " + httplib::to_string(res.error());
        return false;
      }
      if (res->status != 200) {
        err = "HTTP " + std::to_string(res->status);
        return false;
      }
      body = res->body;
      return true;
    } catch (const std::exception& e) {
      err = e.what();
      return false;
    }
  }

  RemoteConfig cfg_;
  std::string base_;
  std::string path_;
  std::mutex mu_;
  std::optional<std::chrono::steady_clock::time_point> last_;
};

inline RemoteResult fetch_remote_facts(const std::vector<CurveKey>& curves, const RemoteConfig& cfg) {
  RemoteFactClient client(cfg);
  return client.fetch(curves);
}

}  // namespace iwc
