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

#include "nanoscope/audience_index.h"

#include <algorithm>
#include <bit>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace nanoscope {

absl::StatusOr<CensorPolicy> CensorPolicy::Create(uint64_t floor) {
  if (floor < 1) return absl::InvalidArgumentError("censoring floor must be >= 1");
  return CensorPolicy{floor};
}

InvertedIndex InvertedIndex::Build(const Population& population) {
  InvertedIndex index;
  index.catalog_ = population.shared_catalog();
  const Catalog& catalog = *index.catalog_;
  const auto& users = population.users();

  index.user_ids_.reserve(users.size());
  index.demographics_.reserve(users.size());
  std::vector<uint64_t> counts(catalog.size() + 1, 0);
  for (const UserProfile& user : users) {
    index.user_ids_.push_back(user.user_id);
    index.demographics_.push_back(user.demographics);
    for (InterestId id : user.interests) ++counts[*catalog.PositionOf(id) + 1];
  }
  index.offsets_.assign(catalog.size() + 1, 0);
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    index.offsets_[i + 1] = index.offsets_[i] + counts[i + 1];
  }
  index.postings_.resize(index.offsets_.back());
  std::vector<uint64_t> cursor(index.offsets_.begin(), index.offsets_.end() - 1);
  // Users are visited in position order, so each posting comes out sorted.
  for (uint32_t pos = 0; pos < users.size(); ++pos) {
    for (InterestId id : users[pos].interests) {
      index.postings_[cursor[*catalog.PositionOf(id)]++] = pos;
    }
  }

  const std::size_t words = (users.size() + 63) / 64;
  const uint64_t dense_threshold = std::max<uint64_t>(64, users.size() / 32);
  index.bitmap_slot_.assign(catalog.size(), -1);
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const uint64_t length = index.offsets_[i + 1] - index.offsets_[i];
    if (length < dense_threshold) continue;
    std::vector<uint64_t> bits(words, 0);
    for (uint64_t k = index.offsets_[i]; k < index.offsets_[i + 1]; ++k) {
      const uint32_t pos = index.postings_[k];
      bits[pos >> 6] |= uint64_t{1} << (pos & 63);
    }
    index.bitmap_slot_[i] = static_cast<int64_t>(index.bitmaps_.size());
    index.bitmaps_.push_back(std::move(bits));
  }
  return index;
}

absl::StatusOr<std::span<const uint32_t>> InvertedIndex::Posting(InterestId id) const {
  auto pos = catalog_->PositionOf(id);
  if (!pos) return absl::NotFoundError(absl::StrCat("unknown interest ", id));
  return std::span<const uint32_t>(postings_.data() + offsets_[*pos],
                                   offsets_[*pos + 1] - offsets_[*pos]);
}

absl::Status InvertedIndex::Validate(const AudienceQuery& query) const {
  if (query.interests.empty()) {
    return absl::InvalidArgumentError("audience query needs at least one interest");
  }
  if (query.interests.size() > kMaxQueryInterests) {
    return absl::InvalidArgumentError(absl::StrCat("audience query has ", query.interests.size(),
                                                   " interests; at most ", kMaxQueryInterests,
                                                   " are allowed"));
  }
  for (InterestId id : query.interests) {
    if (!catalog_->PositionOf(id)) {
      return absl::NotFoundError(absl::StrCat("unknown interest ", id));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<InvertedIndex::Resolved>> InvertedIndex::Resolve(
    std::span<const InterestId> ids) const {
  std::vector<Resolved> resolved;
  resolved.reserve(ids.size());
  for (InterestId id : ids) {
    auto pos = catalog_->PositionOf(id);
    if (!pos) return absl::NotFoundError(absl::StrCat("unknown interest ", id));
    Resolved r;
    r.posting = std::span<const uint32_t>(postings_.data() + offsets_[*pos],
                                          offsets_[*pos + 1] - offsets_[*pos]);
    if (bitmap_slot_[*pos] >= 0) r.bitmap = bitmaps_[bitmap_slot_[*pos]].data();
    resolved.push_back(r);
  }
  return resolved;
}

// Membership of `position` in r. For sparse postings `cursor` only moves
// forward, so a run of ascending probes costs one galloping pass overall.
bool InvertedIndex::Contains(const Resolved& r, uint32_t position, std::size_t& cursor) const {
  if (r.bitmap != nullptr) return (r.bitmap[position >> 6] >> (position & 63)) & 1;
  const std::size_t n = r.posting.size();
  if (cursor >= n) return false;
  if (r.posting[cursor] >= position) return r.posting[cursor] == position;
  std::size_t step = 1;
  std::size_t lo = cursor;
  std::size_t hi = cursor + 1;
  while (hi < n && r.posting[hi] < position) {
    lo = hi;
    step <<= 1;
    hi = lo + step;
  }
  if (hi > n) hi = n;
  cursor = static_cast<std::size_t>(
      std::lower_bound(r.posting.begin() + static_cast<std::ptrdiff_t>(lo + 1),
                       r.posting.begin() + static_cast<std::ptrdiff_t>(hi), position) -
      r.posting.begin());
  return cursor < n && r.posting[cursor] == position;
}

template <typename Visitor>
absl::Status InvertedIndex::ForEachMatch(const AudienceQuery& query, Visitor&& visit) const {
  if (absl::Status status = Validate(query); !status.ok()) return status;
  auto resolved = Resolve(query.interests);
  if (!resolved.ok()) return resolved.status();
  std::vector<Resolved>& lists = *resolved;
  std::sort(lists.begin(), lists.end(), [](const Resolved& a, const Resolved& b) {
    return a.posting.size() < b.posting.size();
  });
  if (lists.front().posting.empty()) return absl::OkStatus();

  const DemographicFilter* filter =
      query.demographic_filter && !query.demographic_filter->empty()
          ? &*query.demographic_filter
          : nullptr;
  std::vector<std::size_t> cursors(lists.size(), 0);
  for (uint32_t position : lists.front().posting) {
    bool matches = true;
    for (std::size_t j = 1; j < lists.size(); ++j) {
      if (!Contains(lists[j], position, cursors[j])) {
        matches = false;
        break;
      }
    }
    if (!matches) continue;
    if (filter != nullptr && !filter->Matches(demographics_[position])) continue;
    if (!visit(position)) break;
  }
  return absl::OkStatus();
}

absl::StatusOr<uint64_t> InvertedIndex::AudienceSize(const AudienceQuery& query) const {
  uint64_t count = 0;
  absl::Status status = ForEachMatch(query, [&count](uint32_t) {
    ++count;
    return true;
  });
  if (!status.ok()) return status;
  return count;
}

absl::StatusOr<MemberSet> InvertedIndex::AudienceMembers(const AudienceQuery& query,
                                                         std::optional<std::size_t> cap) const {
  MemberSet members;
  absl::Status status = ForEachMatch(query, [&](uint32_t position) {
    if (cap && members.users.size() >= *cap) {
      members.truncated = true;
      return false;
    }
    members.users.push_back(user_ids_[position]);
    return true;
  });
  if (!status.ok()) return status;
  std::sort(members.users.begin(), members.users.end());
  return members;
}

absl::StatusOr<std::vector<uint64_t>> InvertedIndex::PrefixCounts(
    std::span<const InterestId> ordered, const DemographicFilter* filter) const {
  if (ordered.empty()) {
    return absl::InvalidArgumentError("prefix query needs at least one interest");
  }
  if (ordered.size() > kMaxQueryInterests) {
    return absl::InvalidArgumentError(absl::StrCat("prefix query has ", ordered.size(),
                                                   " interests; at most ", kMaxQueryInterests,
                                                   " are allowed"));
  }
  auto resolved = Resolve(ordered);
  if (!resolved.ok()) return resolved.status();
  if (filter != nullptr && filter->empty()) filter = nullptr;

  // The running intersection stays a bitmap while both it and the next
  // posting are dense (word-wise AND), and drops to a sorted array after.
  const std::size_t words = (user_ids_.size() + 63) / 64;
  const uint64_t sparse_below = std::max<uint64_t>(64, user_ids_.size() / 32);
  std::vector<uint64_t> dense;
  std::vector<uint32_t> sparse;
  bool is_dense = false;

  const Resolved& first = resolved->front();
  if (filter == nullptr && first.bitmap != nullptr) {
    dense.assign(first.bitmap, first.bitmap + words);
    is_dense = true;
  } else {
    sparse.reserve(first.posting.size());
    for (uint32_t position : first.posting) {
      if (filter == nullptr || filter->Matches(demographics_[position])) {
        sparse.push_back(position);
      }
    }
  }
  std::vector<uint64_t> counts;
  counts.reserve(ordered.size());
  counts.push_back(is_dense ? first.posting.size() : sparse.size());

  for (std::size_t k = 1; k < resolved->size(); ++k) {
    const Resolved& next = (*resolved)[k];
    if (is_dense && next.bitmap != nullptr) {
      uint64_t count = 0;
      for (std::size_t w = 0; w < words; ++w) {
        dense[w] &= next.bitmap[w];
        count += static_cast<uint64_t>(std::popcount(dense[w]));
      }
      counts.push_back(count);
      if (count < sparse_below) {
        sparse.clear();
        for (std::size_t w = 0; w < words; ++w) {
          for (uint64_t bits = dense[w]; bits != 0; bits &= bits - 1) {
            sparse.push_back(static_cast<uint32_t>(w * 64 + std::countr_zero(bits)));
          }
        }
        is_dense = false;
      }
      continue;
    }
    if (is_dense) {
      sparse.clear();
      for (uint32_t position : next.posting) {
        if ((dense[position >> 6] >> (position & 63)) & 1) sparse.push_back(position);
      }
      is_dense = false;
    } else {
      std::size_t cursor = 0;
      std::size_t kept = 0;
      for (uint32_t position : sparse) {
        if (Contains(next, position, cursor)) sparse[kept++] = position;
      }
      sparse.resize(kept);
    }
    counts.push_back(sparse.size());
  }
  return counts;
}

}  // namespace nanoscope
