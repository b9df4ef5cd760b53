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

#ifndef NANOSCOPE_RISK_H_
#define NANOSCOPE_RISK_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "nanoscope/audience_index.h"
#include "nanoscope/population.h"
#include "nanoscope/selection.h"

namespace nanoscope {

// Declared from lowest to highest risk.
enum class RiskLevel { kGreen, kYellow, kOrange, kRed };

const char* RiskLevelName(RiskLevel level);  // "green", "yellow", "orange", "red"

// [0, red_max] red, (red_max, orange_max] orange, (orange_max, green_min)
// yellow, [green_min, inf) green.
struct RiskThresholds {
  uint64_t red_max = 10000;
  uint64_t orange_max = 100000;
  uint64_t green_min = 1000000;

  static absl::StatusOr<RiskThresholds> Create(uint64_t red_max, uint64_t orange_max,
                                               uint64_t green_min);
};

RiskLevel Classify(uint64_t audience, const RiskThresholds& thresholds = {});

// Interest id -> (name, audience). Either taken from a population catalog or
// read from an exported `interest_id,audience_size[,name]` table.
class AudienceTable {
 public:
  static AudienceTable FromCatalog(const Catalog& catalog);
  static absl::StatusOr<AudienceTable> ReadCsv(std::istream& in, std::string_view source);

  struct Entry {
    std::string name;
    uint64_t audience = 0;
  };

  const Entry* Find(InterestId id) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<InterestId, Entry> entries_;
};

class ProfileSession {
 public:
  ProfileSession(UserId user_id, std::vector<InterestId> interests);

  UserId user_id() const { return user_id_; }
  const std::vector<InterestId>& original() const { return original_; }
  const std::set<InterestId>& removed() const { return removed_; }
  uint64_t version() const { return version_; }

  // Both bump the version even when the state does not change.
  absl::Status Remove(InterestId id);
  absl::Status Restore(InterestId id);

  bool IsActive(InterestId id) const { return !removed_.contains(id); }
  std::vector<InterestId> ActiveInterests() const;

 private:
  absl::Status CheckOwned(InterestId id) const;

  UserId user_id_;
  std::vector<InterestId> original_;  // sorted
  std::set<InterestId> removed_;
  uint64_t version_ = 0;
};

struct RiskEntry {
  InterestId interest_id = 0;
  std::string name;
  uint64_t audience = 0;
  RiskLevel level = RiskLevel::kRed;
  bool active = true;
};

// Every original interest, ascending by (audience, interest_id).
absl::StatusOr<std::vector<RiskEntry>> RiskList(const ProfileSession& session,
                                                const AudienceTable& table,
                                                const RiskThresholds& thresholds = {});

struct WhatIfReport {
  UserId user_id = 0;
  uint64_t version = 0;
  std::string strategy;
  uint64_t floor = 1;
  std::size_t active_count = 0;
  std::vector<InterestId> ordered_interests;
  std::vector<uint64_t> prefix_sizes;    // true audiences
  std::optional<int> unique_at;          // smallest N with a true audience of 1
  std::vector<uint64_t> censored_sizes;  // what an advertiser sees
};

// The strategy orders the user's full original set once; removed interests
// are then dropped from that order, so the relative order of the remaining
// interests never changes between session versions.
absl::StatusOr<WhatIfReport> WhatIfUniqueness(const ProfileSession& session,
                                              const Population& population,
                                              const InvertedIndex& index,
                                              const SelectionStrategy& strategy,
                                              CensorPolicy policy);

}  // namespace nanoscope

#endif  // NANOSCOPE_RISK_H_
