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

#ifndef NANOSCOPE_API_H_
#define NANOSCOPE_API_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "nanoscope/audience_index.h"
#include "nanoscope/population.h"
#include "nanoscope/risk.h"
#include "nanoscope/serialize.h"

namespace nanoscope {

struct ApiResponse {
  int status = 200;
  Json body;
};

struct ApiOptions {
  // Exact origins; empty means any http(s)://localhost or 127.0.0.1 origin.
  std::vector<std::string> cors_origins;
  RiskThresholds thresholds;
  uint64_t default_floor = kLegacyFloor;  // what-if only; reports default to 1
  uint64_t random_seed = 0;
  int report_resamples = 10000;
  uint64_t report_seed = 0;
};

// Routes under /api and /api/v1. Sessions live in memory, keyed by user.
class ApiService {
 public:
  ApiService(const Population& population, const InvertedIndex& index, ApiOptions options);

  ApiResponse Handle(std::string_view method, std::string_view path,
                     const std::multimap<std::string, std::string>& query,
                     std::string_view body);

  bool OriginAllowed(std::string_view origin) const;
  const std::string& population_digest() const { return digest_; }

 private:
  struct Slot {
    std::mutex mu;
    ProfileSession session;
    explicit Slot(ProfileSession s) : session(std::move(s)) {}
  };

  absl::StatusOr<Slot*> SlotFor(UserId user);
  ApiResponse Risks(UserId user);
  ApiResponse Session(UserId user);
  ApiResponse Mutate(UserId user, InterestId interest, bool remove, std::string_view body);
  ApiResponse WhatIf(UserId user, const std::multimap<std::string, std::string>& query);
  ApiResponse Report(const std::multimap<std::string, std::string>& query);

  const Population& population_;
  const InvertedIndex& index_;
  ApiOptions options_;
  AudienceTable table_;
  std::string digest_;

  std::mutex sessions_mu_;
  std::map<UserId, std::unique_ptr<Slot>> sessions_;

  std::mutex report_mu_;
  std::map<std::string, Json> report_cache_;
};

ApiResponse ErrorResponse(const absl::Status& status);
ApiResponse ErrorResponse(int http_status, std::string_view code, std::string_view message);

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;  // optional web client
};

// Blocks until the server stops.
absl::Status Serve(ApiService& service, const ServeOptions& options);

}  // namespace nanoscope

#endif  // NANOSCOPE_API_H_
