// Copyright 2026 The iwacensus Authors
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).
// This file may not be copied, modified, or distributed
// except according to those terms.

#include "iwacensus/remote_facts.hpp"

#include <gtest/gtest.h>

#include <atomic>

using namespace iwc;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("iwacensus-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// Local stand-in for the REST endpoint.
class FakeEndpoint {
 public:
  FakeEndpoint() {
    server_.Get("/api/ec_curvedata/", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      std::string ainvs = req.get_param_value("ainvs");
      if (ainvs == "0,0,0,1,1")
        res.set_content(R"({"data": [{"rank": 0, "sha": 1, "conductor": 496}]})", "application/json");
      else if (ainvs == "0,0,0,2,3")
        res.set_content(R"({"data": [{"rank": 1}]})", "application/json");
      else if (ainvs == "0,0,0,4,5")
        res.set_content(R"({"data": [{"rank": 0, "sha": 25}]})", "application/json");
      else if (ainvs == "0,0,0,6,7")
        res.set_content("not json", "text/plain");
      else if (ainvs == "0,0,0,8,9")
        res.set_content(R"({"data": []})", "application/json");
      else
        res.status = 404;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/api/ec_curvedata/"; }
  int hits() const { return hits_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
};

RemoteConfig config(const std::string& endpoint, const fs::path& cache, bool network) {
  RemoteConfig c;
  c.endpoint = endpoint;
  c.cache_dir = cache;
  c.allow_network = network;
  c.min_interval = std::chrono::milliseconds(0);
  c.timeout = std::chrono::seconds(2);
  return c;
}

}  // namespace

TEST(RemoteBody, Parsing) {
  SelmerFact f = parse_remote_body(R"({"data": [{"rank": 2, "sha": 1}]})");
  EXPECT_EQ(f.rank, 2u);
  EXPECT_EQ(f.sha_trivial, Tri::Yes);
  EXPECT_EQ(f.source, FactSource::Remote);
  EXPECT_EQ(parse_remote_body(R"({"rank": 0, "sha": 5})").sha_trivial, Tri::No);
  // Sha of order 4 has no 5-part.
  EXPECT_EQ(parse_remote_body(R"({"rank": 0, "sha": 4})").sha_trivial, Tri::Yes);
  SelmerFact missing = parse_remote_body(R"({"data": [{"rank": 0}]})");
  EXPECT_EQ(missing.rank, 0u);
  EXPECT_EQ(missing.sha_trivial, Tri::Unknown);
  EXPECT_FALSE(parse_remote_body(R"({"data": [{"rank": -1, "sha": "x"}]})").rank.has_value());
  EXPECT_ANY_THROW(parse_remote_body("{"));
}

TEST(RemoteClient, FetchesCachesAndDegrades) {
  FakeEndpoint server;
  fs::path cache = fresh_dir("cache");
  RemoteFactClient client(config(server.endpoint(), cache, true));
  std::vector<CurveKey> keys{{1, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}, {10, 11}};
  RemoteResult r = client.fetch(keys);
  EXPECT_EQ(r.network_calls, keys.size());
  EXPECT_EQ(r.cache_hits, 0u);
  EXPECT_EQ(r.facts.at({1, 1}).rank, 0u);
  EXPECT_EQ(r.facts.at({1, 1}).sha_trivial, Tri::Yes);
  EXPECT_EQ(r.facts.at({2, 3}).rank, 1u);
  EXPECT_EQ(r.facts.at({2, 3}).sha_trivial, Tri::Unknown);
  EXPECT_EQ(r.facts.at({4, 5}).sha_trivial, Tri::No);
  EXPECT_FALSE(r.facts.at({6, 7}).rank.has_value());
  EXPECT_FALSE(r.facts.at({8, 9}).rank.has_value());
  EXPECT_FALSE(r.facts.at({10, 11}).rank.has_value());
  // Unparsable body and HTTP 404 are reported; the empty result is not an error.
  EXPECT_EQ(r.warnings.size(), 2u);
  EXPECT_TRUE(fs::exists(client.cache_path({1, 1})));
  EXPECT_FALSE(fs::exists(client.cache_path({10, 11})));

  // Second pass: cached keys never touch the network, even when it is disabled.
  const int before = server.hits();
  RemoteFactClient offline(config(server.endpoint(), cache, false));
  RemoteResult again = offline.fetch({{1, 1}, {2, 3}, {10, 11}});
  EXPECT_EQ(server.hits(), before);
  EXPECT_EQ(again.network_calls, 0u);
  EXPECT_EQ(again.cache_hits, 2u);
  EXPECT_EQ(again.facts.at({1, 1}).rank, 0u);
  EXPECT_FALSE(again.facts.at({10, 11}).rank.has_value());
  fs::remove_all(cache);
}

TEST(RemoteClient, UnreachableEndpointGivesUnknown) {
  // Bind a port and release it so nothing is listening there.
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  fs::path cache = fresh_dir("unreachable");
  RemoteResult r = fetch_remote_facts({{1, 1}},
                                      config("http://127.0.0.1:" + std::to_string(port) + "/api/", cache, true));
  EXPECT_EQ(r.network_calls, 1u);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_FALSE(r.facts.at({1, 1}).rank.has_value());
  EXPECT_EQ(r.facts.at({1, 1}).sha_trivial, Tri::Unknown);
  fs::remove_all(cache);
}

TEST(RemoteClient, CacheDirectoryOverride) {
  ::setenv("IWACENSUS_CACHE_DIR", "/tmp/iwacensus-override", 1);
  EXPECT_EQ(default_cache_dir(), fs::path("/tmp/iwacensus-override"));
  ::unsetenv("IWACENSUS_CACHE_DIR");
  EXPECT_EQ(default_cache_dir(), fs::path(".iwacensus-cache"));
}
