//
// Copyright 2026 The Nanoscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "nanoscope/api.h"

#include <atomic>
#include <thread>

#include "gtest/gtest.h"
#include "test_util.h"

namespace nanoscope {
namespace {

using Query = std::multimap<std::string, std::string>;

class ApiTest : public ::testing::Test {
 protected:
  ApiTest()
      : population_(testing::Toy()),
        index_(InvertedIndex::Build(population_)),
        service_(population_, index_, Options()) {}

  static ApiOptions Options() {
    ApiOptions o;
    o.report_resamples = 20;
    return o;
  }

  ApiResponse Get(const std::string& path, Query query = {}) {
    return service_.Handle("GET", path, query, "");
  }
  ApiResponse Post(const std::string& path, const std::string& body) {
    return service_.Handle("POST", path, {}, body);
  }

  Population population_;
  InvertedIndex index_;
  ApiService service_;
};

TEST_F(ApiTest, Health) {
  ApiResponse r = Get("/api/health");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["status"], "ok");
  EXPECT_EQ(r.body["n_users"], 3);
  EXPECT_EQ(r.body["population_digest"], population_.ContentDigest());
  EXPECT_EQ(Get("/api/v1/health").body, r.body);
}

TEST_F(ApiTest, RisksSortedByAudience) {
  ApiResponse r = Get("/api/users/3/risks");
  ASSERT_EQ(r.status, 200);
  ASSERT_EQ(r.body.size(), 3u);
  EXPECT_EQ(r.body[0]["interest_id"], testing::kC);
  EXPECT_EQ(r.body[1]["interest_id"], testing::kB);
  EXPECT_EQ(r.body[2]["interest_id"], testing::kA);
  EXPECT_EQ(r.body[0]["level"], "red");
  EXPECT_EQ(r.body[0]["status"], "active");
}

TEST_F(ApiTest, RemoveRestoreWithVersions) {
  ApiResponse removed = Post("/api/users/3/interests/1/remove", R"({"version": 0})");
  ASSERT_EQ(removed.status, 200) << removed.body;
  EXPECT_EQ(removed.body["version"], 1);
  EXPECT_EQ(removed.body["removed"], Json::array({1}));
  EXPECT_EQ(Get("/api/users/3/risks").body[1]["status"], "inactive");

  ApiResponse stale = Post("/api/users/3/interests/1/restore", R"({"version": 0})");
  EXPECT_EQ(stale.status, 409);
  EXPECT_EQ(stale.body["error"]["code"], "stale_version");
  EXPECT_EQ(stale.body["error"]["current_version"], 1);

  ApiResponse restored = Post("/api/v1/users/3/interests/1/restore", R"({"version": 1})");
  ASSERT_EQ(restored.status, 200);
  EXPECT_EQ(restored.body["active_count"], 3);
  EXPECT_EQ(Get("/api/users/3/session").body["version"], 2);
}

TEST_F(ApiTest, WhatIfReflectsSession) {
  ApiResponse before = Get("/api/users/3/whatif", {{"floor", "1"}});
  ASSERT_EQ(before.status, 200) << before.body;
  EXPECT_EQ(before.body["unique_at"], 1);
  ASSERT_EQ(Post("/api/users/3/interests/2/remove", R"({"version": 0})").status, 200);
  ApiResponse after = Get("/api/users/3/whatif", {{"floor", "1"}});
  EXPECT_TRUE(after.body["unique_at"].is_null());
  EXPECT_EQ(after.body["version"], 1);
  EXPECT_EQ(Get("/api/users/3/whatif").body["floor"], 20);
}

TEST_F(ApiTest, ErrorCodes) {
  EXPECT_EQ(Get("/api/users/9/risks").status, 404);
  EXPECT_EQ(Get("/api/users/abc/risks").status, 400);
  EXPECT_EQ(Get("/api/nothing").status, 404);
  EXPECT_EQ(Get("/elsewhere").status, 404);
  EXPECT_EQ(Post("/api/users/2/interests/2/remove", R"({"version": 0})").status, 404);
  EXPECT_EQ(Post("/api/users/2/interests/0/remove", "not json").status, 400);
  EXPECT_EQ(Post("/api/users/2/interests/0/remove", R"({"version": -1})").status, 400);
  EXPECT_EQ(Get("/api/users/3/whatif", {{"strategy", "popular"}}).status, 400);
  EXPECT_EQ(Get("/api/users/3/whatif", {{"floor", "0"}}).status, 400);
  ApiResponse e = Get("/api/report", {{"p", "x"}});
  EXPECT_EQ(e.status, 400);
  EXPECT_EQ(e.body["error"]["code"], "invalid_argument");
  EXPECT_EQ(ErrorResponse(absl::InternalError("boom")).status, 500);
  EXPECT_EQ(ErrorResponse(absl::AbortedError("old")).status, 409);
}

TEST(Report, CachedAndStable) {
  auto p = GeneratePopulation(testing::SmallConfig(600, 150, 3));
  ASSERT_TRUE(p.ok()) << p.status();
  InvertedIndex index = InvertedIndex::Build(*p);
  ApiOptions options;
  options.report_resamples = 50;
  ApiService service(*p, index, options);
  const Query query = {{"strategy", "lp"}, {"p", "0.5,0.9"}};
  ApiResponse first = service.Handle("GET", "/api/report", query, "");
  ASSERT_EQ(first.status, 200) << first.body;
  EXPECT_EQ(first.body["format"], "nanoscope-report/1");
  EXPECT_EQ(first.body["rows"].size(), 2u);
  EXPECT_EQ(service.Handle("GET", "/api/report", query, "").body, first.body);
  ApiService fresh(*p, index, options);
  EXPECT_EQ(fresh.Handle("GET", "/api/report", query, "").body, first.body);
}

TEST_F(ApiTest, ConcurrentMutationsSerialize) {
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  std::atomic<int> conflicts{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      ApiResponse r = service_.Handle("POST", "/api/users/1/interests/0/remove", {},
                                      R"({"version": 0})");
      (r.status == 200 ? ok : conflicts)++;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 1);
  EXPECT_EQ(conflicts.load(), 7);
}

TEST(Cors, DefaultAllowsLoopbackOnly) {
  Population p = testing::Toy();
  InvertedIndex index = InvertedIndex::Build(p);
  ApiService open(p, index, ApiOptions{});
  EXPECT_TRUE(open.OriginAllowed("http://localhost:5173"));
  EXPECT_TRUE(open.OriginAllowed("https://127.0.0.1"));
  EXPECT_TRUE(open.OriginAllowed("http://[::1]:3000"));
  EXPECT_FALSE(open.OriginAllowed("http://example.com"));
  EXPECT_FALSE(open.OriginAllowed("http://localhost.evil.com"));
  EXPECT_FALSE(open.OriginAllowed(""));

  ApiOptions listed;
  listed.cors_origins = {"https://app.example"};
  ApiService strict(p, index, listed);
  EXPECT_TRUE(strict.OriginAllowed("https://app.example"));
  EXPECT_FALSE(strict.OriginAllowed("http://localhost:5173"));
}

}  // namespace
}  // namespace nanoscope
