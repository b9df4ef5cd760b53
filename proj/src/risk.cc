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

#include "nanoscope/risk.h"

#include <algorithm>
#include <string>
#include <tuple>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "nanoscope/population_io.h"

namespace nanoscope {

const char* RiskLevelName(RiskLevel level) {
  switch (level) {
    case RiskLevel::kGreen:
      return "green";
    case RiskLevel::kYellow:
      return "yellow";
    case RiskLevel::kOrange:
      return "orange";
    case RiskLevel::kRed:
      return "red";
  }
  return "red";
}

absl::StatusOr<RiskThresholds> RiskThresholds::Create(uint64_t red_max, uint64_t orange_max,
                                                      uint64_t green_min) {
  if (!(red_max < orange_max && orange_max < green_min)) {
    return absl::InvalidArgumentError(absl::StrCat("risk thresholds must be ascending, got ",
                                                   red_max, ", ", orange_max, ", ", green_min));
  }
  return RiskThresholds{red_max, orange_max, green_min};
}

RiskLevel Classify(uint64_t audience, const RiskThresholds& t) {
  if (audience <= t.red_max) return RiskLevel::kRed;
  if (audience <= t.orange_max) return RiskLevel::kOrange;
  if (audience < t.green_min) return RiskLevel::kYellow;
  return RiskLevel::kGreen;
}

AudienceTable AudienceTable::FromCatalog(const Catalog& catalog) {
  AudienceTable table;
  table.entries_.reserve(catalog.size());
  for (const InterestRecord& r : catalog.records()) {
    table.entries_.emplace(r.interest_id, Entry{r.name, r.global_audience});
  }
  return table;
}

absl::StatusOr<AudienceTable> AudienceTable::ReadCsv(std::istream& in, std::string_view source) {
  AudienceTable table;
  std::string line;
  std::size_t line_no = 0;
  int name_column = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = absl::StrCat(std::string(source), ":", line_no, ": ");
    auto fields = SplitCsvLine(line);
    if (!fields.ok()) return absl::InvalidArgumentError(where + std::string(fields.status().message()));
    if (line_no == 1) {
      if (fields->size() < 2 || (*fields)[0] != "interest_id" || (*fields)[1] != "audience_size") {
        return absl::InvalidArgumentError(where + "expected header interest_id,audience_size");
      }
      for (std::size_t i = 2; i < fields->size(); ++i) {
        if ((*fields)[i] == "name") name_column = static_cast<int>(i);
      }
      continue;
    }
    if (line.empty()) continue;
    if (fields->size() < 2) return absl::InvalidArgumentError(where + "expected 2 columns");
    InterestId id = 0;
    uint64_t audience = 0;
    if (!absl::SimpleAtoi((*fields)[0], &id)) {
      return absl::InvalidArgumentError(where + "bad interest_id '" + (*fields)[0] + "'");
    }
    if (!absl::SimpleAtoi((*fields)[1], &audience)) {
      return absl::InvalidArgumentError(where + "bad audience_size '" + (*fields)[1] + "'");
    }
    std::string name = name_column >= 0 && static_cast<std::size_t>(name_column) < fields->size()
                           ? (*fields)[static_cast<std::size_t>(name_column)]
                           : absl::StrCat("interest-", id);
    if (!table.entries_.emplace(id, Entry{std::move(name), audience}).second) {
      return absl::InvalidArgumentError(absl::StrCat(where, "duplicate interest_id ", id));
    }
  }
  if (line_no == 0) return absl::InvalidArgumentError(absl::StrCat(std::string(source), ": empty file"));
  return table;
}

const AudienceTable::Entry* AudienceTable::Find(InterestId id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

ProfileSession::ProfileSession(UserId user_id, std::vector<InterestId> interests)
    : user_id_(user_id), original_(std::move(interests)) {
  std::sort(original_.begin(), original_.end());
  original_.erase(std::unique(original_.begin(), original_.end()), original_.end());
}

absl::Status ProfileSession::CheckOwned(InterestId id) const {
  if (!std::binary_search(original_.begin(), original_.end(), id)) {
    return absl::InvalidArgumentError(
        absl::StrCat("interest ", id, " does not belong to user ", user_id_));
  }
  return absl::OkStatus();
}

absl::Status ProfileSession::Remove(InterestId id) {
  if (absl::Status s = CheckOwned(id); !s.ok()) return s;
  removed_.insert(id);
  ++version_;
  return absl::OkStatus();
}

absl::Status ProfileSession::Restore(InterestId id) {
  if (absl::Status s = CheckOwned(id); !s.ok()) return s;
  removed_.erase(id);
  ++version_;
  return absl::OkStatus();
}

std::vector<InterestId> ProfileSession::ActiveInterests() const {
  std::vector<InterestId> active;
  active.reserve(original_.size() - removed_.size());
  for (InterestId id : original_) {
    if (!removed_.contains(id)) active.push_back(id);
  }
  return active;
}

absl::StatusOr<std::vector<RiskEntry>> RiskList(const ProfileSession& session,
                                                const AudienceTable& table,
                                                const RiskThresholds& thresholds) {
  std::vector<RiskEntry> entries;
  entries.reserve(session.original().size());
  for (InterestId id : session.original()) {
    const AudienceTable::Entry* e = table.Find(id);
    if (e == nullptr) {
      return absl::NotFoundError(absl::StrCat("no audience size for interest ", id));
    }
    entries.push_back(RiskEntry{id, e->name, e->audience, Classify(e->audience, thresholds),
                                session.IsActive(id)});
  }
  std::sort(entries.begin(), entries.end(), [](const RiskEntry& a, const RiskEntry& b) {
    return std::tie(a.audience, a.interest_id) < std::tie(b.audience, b.interest_id);
  });
  return entries;
}

absl::StatusOr<WhatIfReport> WhatIfUniqueness(const ProfileSession& session,
                                              const Population& population,
                                              const InvertedIndex& index,
                                              const SelectionStrategy& strategy,
                                              CensorPolicy policy) {
  const UserProfile* profile = population.FindUser(session.user_id());
  if (profile == nullptr) {
    return absl::NotFoundError(absl::StrCat("unknown user ", session.user_id()));
  }
  const std::size_t n_max = static_cast<std::size_t>(std::clamp(
      strategy.n_max, 1, static_cast<int>(kMaxQueryInterests)));

  WhatIfReport report;
  report.user_id = session.user_id();
  report.version = session.version();
  report.strategy = strategy.Name();
  report.floor = policy.floor;
  report.active_count = session.original().size() - session.removed().size();
  if (report.active_count == 0) {
    return absl::FailedPreconditionError(
        absl::StrCat("user ", session.user_id(), " has no active interests"));
  }

  for (InterestId id : OrderInterests(*profile, population.catalog(), strategy,
                                      profile->interests.size())) {
    if (!session.IsActive(id)) continue;
    report.ordered_interests.push_back(id);
    if (report.ordered_interests.size() == n_max) break;
  }
  auto counts = index.PrefixCounts(report.ordered_interests);
  if (!counts.ok()) return counts.status();
  report.prefix_sizes = *std::move(counts);
  for (std::size_t i = 0; i < report.prefix_sizes.size(); ++i) {
    if (!report.unique_at && report.prefix_sizes[i] == 1) report.unique_at = static_cast<int>(i + 1);
    report.censored_sizes.push_back(ReportedSize(report.prefix_sizes[i], policy));
  }
  return report;
}

}  // namespace nanoscope
