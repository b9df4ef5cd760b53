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

#ifndef NANOSCOPE_SELECTION_H_
#define NANOSCOPE_SELECTION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nanoscope/audience_index.h"
#include "nanoscope/population.h"

namespace nanoscope {

enum class SelectionKind { kLeastPopular, kRandom };

// How an attacker picks which of a user's interests to combine.
struct SelectionStrategy {
  SelectionKind kind = SelectionKind::kLeastPopular;
  uint64_t seed = 0;  // kRandom only
  int n_max = static_cast<int>(kMaxQueryInterests);

  static absl::StatusOr<SelectionStrategy> Create(SelectionKind kind, uint64_t seed = 0,
                                                  int n_max = kMaxQueryInterests);
  static SelectionStrategy LeastPopular(int n_max = kMaxQueryInterests) {
    return {SelectionKind::kLeastPopular, 0, n_max};
  }
  static SelectionStrategy Random(uint64_t seed, int n_max = kMaxQueryInterests) {
    return {SelectionKind::kRandom, seed, n_max};
  }
  std::string Name() const;  // "lp" or "random"
};

absl::StatusOr<SelectionKind> ParseSelectionKind(std::string_view name);

// LP: ascending global_audience, ties by ascending id, truncated to n_max.
// Random: uniform sample without replacement of min(n_max, |interests|) in
// draw order, from a stream seeded by (seed, user_id) only.
std::vector<InterestId> SelectInterests(const UserProfile& profile, const Catalog& catalog,
                                        const SelectionStrategy& strategy);

// The first `limit` interests of the strategy order, ignoring n_max.
// SelectInterests is the n_max prefix of this order.
std::vector<InterestId> OrderInterests(const UserProfile& profile, const Catalog& catalog,
                                       const SelectionStrategy& strategy, std::size_t limit);

struct PrefixAudiences {
  UserId user_id = 0;
  std::vector<InterestId> ordered_interests;
  std::vector<uint64_t> sizes;  // sizes[N-1]: censored audience of the first N
};

absl::StatusOr<PrefixAudiences> ComputePrefixAudiences(const InvertedIndex& index,
                                                       UserId user_id,
                                                       std::vector<InterestId> ordered,
                                                       CensorPolicy policy,
                                                       const DemographicFilter* filter = nullptr);

}  // namespace nanoscope

#endif  // NANOSCOPE_SELECTION_H_
