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

#include "nanoscope/selection.h"

#include <algorithm>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "nanoscope/random.h"

namespace nanoscope {

absl::StatusOr<SelectionStrategy> SelectionStrategy::Create(SelectionKind kind, uint64_t seed,
                                                            int n_max) {
  if (n_max < 1 || n_max > static_cast<int>(kMaxQueryInterests)) {
    return absl::InvalidArgumentError(
        absl::StrCat("n_max must be in [1, ", kMaxQueryInterests, "], got ", n_max));
  }
  return SelectionStrategy{kind, seed, n_max};
}

std::string SelectionStrategy::Name() const {
  return kind == SelectionKind::kLeastPopular ? "lp" : "random";
}

absl::StatusOr<SelectionKind> ParseSelectionKind(std::string_view name) {
  if (name == "lp" || name == "least-popular") return SelectionKind::kLeastPopular;
  if (name == "random" || name == "r") return SelectionKind::kRandom;
  return absl::InvalidArgumentError(absl::StrCat("unknown selection strategy '", std::string(name), "'"));
}

std::vector<InterestId> SelectInterests(const UserProfile& profile, const Catalog& catalog,
                                        const SelectionStrategy& strategy) {
  return OrderInterests(profile, catalog, strategy, static_cast<std::size_t>(strategy.n_max));
}

std::vector<InterestId> OrderInterests(const UserProfile& profile, const Catalog& catalog,
                                       const SelectionStrategy& strategy, std::size_t limit) {
  const std::size_t take = std::min(limit, profile.interests.size());
  std::vector<InterestId> selected;
  if (strategy.kind == SelectionKind::kLeastPopular) {
    std::vector<std::pair<uint64_t, InterestId>> keyed;
    keyed.reserve(profile.interests.size());
    for (InterestId id : profile.interests) {
      const InterestRecord* record = catalog.Find(id);
      keyed.emplace_back(record != nullptr ? record->global_audience : 0, id);
    }
    std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(take),
                      keyed.end());
    selected.reserve(take);
    for (std::size_t i = 0; i < take; ++i) selected.push_back(keyed[i].second);
    return selected;
  }

  // Partial Fisher-Yates; the first N draws are themselves a uniform
  // N-subset, so shorter campaigns are prefixes of longer ones.
  std::vector<InterestId> pool = profile.interests;
  Rng rng(DeriveSeed(strategy.seed, profile.user_id));
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.Below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  return pool;
}

absl::StatusOr<PrefixAudiences> ComputePrefixAudiences(const InvertedIndex& index,
                                                       UserId user_id,
                                                       std::vector<InterestId> ordered,
                                                       CensorPolicy policy,
                                                       const DemographicFilter* filter) {
  auto counts = index.PrefixCounts(ordered, filter);
  if (!counts.ok()) return counts.status();
  PrefixAudiences row;
  row.user_id = user_id;
  row.ordered_interests = std::move(ordered);
  row.sizes.reserve(counts->size());
  for (uint64_t count : *counts) row.sizes.push_back(ReportedSize(count, policy));
  return row;
}

}  // namespace nanoscope
