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

#ifndef NANOSCOPE_AUDIENCE_INDEX_H_
#define NANOSCOPE_AUDIENCE_INDEX_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "nanoscope/population.h"

namespace nanoscope {

// Targeting APIs accept at most this many interests per audience.
inline constexpr std::size_t kMaxQueryInterests = 25;

struct AudienceQuery {
  std::vector<InterestId> interests;
  std::optional<DemographicFilter> demographic_filter;
};

// Minimum audience size an advertiser-facing reach estimate will show.
struct CensorPolicy {
  uint64_t floor = 1;

  static absl::StatusOr<CensorPolicy> Create(uint64_t floor);
  bool operator==(const CensorPolicy&) const = default;
};

inline constexpr uint64_t kUncensoredFloor = 1;
inline constexpr uint64_t kLegacyFloor = 20;
inline constexpr uint64_t kWorkaroundFloor = 100;
inline constexpr uint64_t kCurrentFloor = 1000;

inline uint64_t ReportedSize(uint64_t true_count, CensorPolicy policy) {
  return true_count < policy.floor ? policy.floor : true_count;
}

struct MemberSet {
  std::vector<UserId> users;  // ascending
  bool truncated = false;
};

// Per-interest postings of dense user positions. Every posting is kept as a
// sorted array; postings holding more than 1/32 of the population also get a
// bitmap so membership tests against popular interests are O(1).
//
// Immutable after Build(); concurrent queries are lock-free.
class InvertedIndex {
 public:
  static InvertedIndex Build(const Population& population);

  std::size_t user_count() const { return user_ids_.size(); }
  std::size_t interest_count() const { return offsets_.size() - 1; }
  uint64_t total_postings() const { return postings_.size(); }

  // Sorted dense user positions of one catalog interest.
  absl::StatusOr<std::span<const uint32_t>> Posting(InterestId id) const;
  UserId UserAt(uint32_t position) const { return user_ids_[position]; }

  absl::Status Validate(const AudienceQuery& query) const;

  // Exact number of users holding every query interest (and passing the
  // demographic filter). Intersects smallest posting first.
  absl::StatusOr<uint64_t> AudienceSize(const AudienceQuery& query) const;

  absl::StatusOr<MemberSet> AudienceMembers(const AudienceQuery& query,
                                            std::optional<std::size_t> cap = std::nullopt) const;

  // counts[k] = audience of ordered[0..k], evaluated incrementally in the
  // given order. Accepts up to kMaxQueryInterests entries.
  absl::StatusOr<std::vector<uint64_t>> PrefixCounts(
      std::span<const InterestId> ordered,
      const DemographicFilter* filter = nullptr) const;

 private:
  struct Resolved {
    std::span<const uint32_t> posting;
    const uint64_t* bitmap = nullptr;  // null when sparse
  };

  absl::StatusOr<std::vector<Resolved>> Resolve(std::span<const InterestId> ids) const;
  bool Contains(const Resolved& r, uint32_t position, std::size_t& cursor) const;

  // Visits every matching position in ascending order until visit() returns
  // false.
  template <typename Visitor>
  absl::Status ForEachMatch(const AudienceQuery& query, Visitor&& visit) const;

  std::shared_ptr<const Catalog> catalog_;
  std::vector<UserId> user_ids_;
  std::vector<Demographics> demographics_;
  std::vector<uint64_t> offsets_;   // catalog position -> start in postings_
  std::vector<uint32_t> postings_;  // concatenated sorted postings
  std::vector<int64_t> bitmap_slot_;  // catalog position -> bitmap index or -1
  std::vector<std::vector<uint64_t>> bitmaps_;
};

}  // namespace nanoscope

#endif  // NANOSCOPE_AUDIENCE_INDEX_H_
