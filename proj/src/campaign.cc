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

#include "nanoscope/campaign.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "nanoscope/parallel.h"
#include "nanoscope/random.h"
#include <nlohmann/json.hpp>

namespace nanoscope {
namespace {

absl::Status CheckInterestCount(int n) {
  if (n < 1 || n > static_cast<int>(kMaxQueryInterests)) {
    return absl::InvalidArgumentError(
        absl::StrCat("n_interests must be in [1, ", kMaxQueryInterests, "], got ", n));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<InterestId>> CampaignInterests(const Population& population,
                                                          const CampaignSpec& spec,
                                                          const UserProfile** profile_out) {
  if (absl::Status s = CheckInterestCount(spec.n_interests); !s.ok()) return s;
  const UserProfile* profile = population.FindUser(spec.target);
  if (profile == nullptr) {
    return absl::NotFoundError(absl::StrCat("unknown target user ", spec.target));
  }
  SelectionStrategy full = spec.strategy;
  full.n_max = static_cast<int>(kMaxQueryInterests);
  std::vector<InterestId> ids = SelectInterests(*profile, population.catalog(), full);
  if (ids.size() > static_cast<std::size_t>(spec.n_interests)) {
    ids.resize(static_cast<std::size_t>(spec.n_interests));
  }
  if (profile_out != nullptr) *profile_out = profile;
  return ids;
}

bool HoldsAll(const UserProfile& profile, std::span<const InterestId> ids) {
  return std::all_of(ids.begin(), ids.end(), [&](InterestId id) {
    return std::binary_search(profile.interests.begin(), profile.interests.end(), id);
  });
}

template <typename T>
absl::StatusOr<std::vector<T>> CollectParallel(
    std::size_t n, int workers, const std::function<absl::StatusOr<T>(std::size_t)>& body) {
  std::vector<T> results(n);
  std::vector<absl::Status> errors(n);
  ParallelFor(n, workers, [&](std::size_t i) {
    absl::StatusOr<T> r = body(i);
    if (r.ok()) {
      results[i] = *std::move(r);
    } else {
      errors[i] = r.status();
    }
  });
  for (const absl::Status& s : errors) {
    if (!s.ok()) return s;
  }
  return results;
}

}  // namespace

absl::StatusOr<CampaignOutcome> RunCampaign(const InvertedIndex& index,
                                            const Population& population,
                                            const CampaignSpec& spec) {
  const UserProfile* profile = nullptr;
  auto ids = CampaignInterests(population, spec, &profile);
  if (!ids.ok()) return ids.status();

  CampaignOutcome outcome;
  outcome.target = spec.target;
  outcome.n_interests = spec.n_interests;
  outcome.shortened = ids->size() < static_cast<std::size_t>(spec.n_interests);
  outcome.interests_used = *std::move(ids);

  AudienceQuery query{outcome.interests_used, std::nullopt};
  auto count = index.AudienceSize(query);
  if (!count.ok()) return count.status();
  outcome.reached_count = *count;
  outcome.reported_reach = ReportedSize(*count, spec.policy);
  if (*count == 1) {
    auto members = index.AudienceMembers(query, 1);
    if (!members.ok()) return members.status();
    outcome.target_reached = !members->users.empty() && members->users[0] == spec.target;
  } else {
    outcome.target_reached = *count > 0 && HoldsAll(*profile, outcome.interests_used);
  }
  outcome.success = outcome.reached_count == 1 && outcome.target_reached;
  return outcome;
}

absl::StatusOr<GateDecision> ApplyPolicy(const CampaignSpec& spec, const PolicyGate& gate,
                                         const InvertedIndex& index,
                                         const Population& population) {
  GateDecision decision;
  if (gate.max_interests && spec.n_interests > *gate.max_interests) {
    decision.accepted = false;
    decision.reason = "max_interests";
    decision.detail = absl::StrCat(spec.n_interests, " interests exceeds the limit of ",
                                   *gate.max_interests);
    return decision;
  }
  if (gate.min_active_audience) {
    auto ids = CampaignInterests(population, spec, nullptr);
    if (!ids.ok()) return ids.status();
    auto count = index.AudienceSize(AudienceQuery{*ids, std::nullopt});
    if (!count.ok()) return count.status();
    if (*count < *gate.min_active_audience) {
      decision.accepted = false;
      decision.reason = "min_active_audience";
      decision.detail = absl::StrCat("active audience ", *count, " is below ",
                                     *gate.min_active_audience);
    }
  }
  return decision;
}

absl::StatusOr<std::vector<UserId>> SampleTargets(const Population& population,
                                                  std::size_t n_targets, uint64_t seed) {
  if (n_targets == 0) return absl::InvalidArgumentError("n_targets must be at least 1");
  const auto& users = population.users();
  Rng rng(seed);
  std::vector<UserId> targets;
  targets.reserve(n_targets);
  if (n_targets > users.size()) {
    for (std::size_t i = 0; i < n_targets; ++i) {
      targets.push_back(users[rng.Below(users.size())].user_id);
    }
    return targets;
  }
  std::vector<std::size_t> pool(users.size());
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < n_targets; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.Below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    targets.push_back(users[pool[i]].user_id);
  }
  return targets;
}

absl::StatusOr<double> SuccessRate(const InvertedIndex& index, const Population& population,
                                   const SelectionStrategy& strategy, int n_interests,
                                   std::size_t n_targets, uint64_t seed, int workers) {
  SweepOptions options;
  options.strategy = strategy;
  options.n_values = {n_interests};
  options.n_targets = n_targets;
  options.target_seed = seed;
  options.workers = workers;
  auto sweep = RunSweep(index, population, options);
  if (!sweep.ok()) return sweep.status();
  return sweep->rows[0].success_rate;
}

absl::StatusOr<SweepResult> RunSweep(const InvertedIndex& index, const Population& population,
                                     const SweepOptions& options) {
  if (options.n_values.empty()) return absl::InvalidArgumentError("no interest counts given");
  for (int n : options.n_values) {
    if (absl::Status s = CheckInterestCount(n); !s.ok()) return s;
  }
  auto targets = SampleTargets(population, options.n_targets, options.target_seed);
  if (!targets.ok()) return targets.status();

  const std::size_t per_target = options.n_values.size();
  using Entry = std::pair<CampaignOutcome, GateDecision>;
  auto campaigns = CollectParallel<Entry>(
      targets->size() * per_target, options.workers,
      [&](std::size_t i) -> absl::StatusOr<Entry> {
        CampaignSpec spec{(*targets)[i / per_target], options.strategy,
                          options.n_values[i % per_target], options.policy};
        auto decision = ApplyPolicy(spec, options.gate, index, population);
        if (!decision.ok()) return decision.status();
        auto outcome = RunCampaign(index, population, spec);
        if (!outcome.ok()) return outcome.status();
        return Entry{*std::move(outcome), *std::move(decision)};
      });
  if (!campaigns.ok()) return campaigns.status();

  SweepResult result;
  for (std::size_t k = 0; k < per_target; ++k) {
    SweepRow row;
    row.n_interests = options.n_values[k];
    row.n_targets = targets->size();
    for (std::size_t t = 0; t < targets->size(); ++t) {
      const auto& [outcome, decision] = (*campaigns)[t * per_target + k];
      if (outcome.shortened) ++row.n_shortened;
      if (!decision.accepted) continue;
      ++row.n_accepted;
      if (outcome.success) ++row.n_success;
    }
    row.success_rate =
        static_cast<double>(row.n_success) / static_cast<double>(row.n_targets);
    result.rows.push_back(row);
  }
  result.campaigns = *std::move(campaigns);
  return result;
}

absl::StatusOr<std::vector<BatchRecord>> ReadBatchJsonl(std::istream& in,
                                                        std::string_view source) {
  std::vector<BatchRecord> batch;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = absl::StrCat(std::string(source), ":", line_no, ": ");
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      return absl::InvalidArgumentError(where + "not a JSON object");
    }
    BatchRecord record;
    try {
      record.target = j.at("target").get<UserId>();
      auto kind = ParseSelectionKind(j.at("strategy").get<std::string>());
      if (!kind.ok()) return absl::InvalidArgumentError(where + std::string(kind.status().message()));
      record.strategy = *kind;
      record.seed = j.value("seed", uint64_t{0});
      record.n_interests = j.at("n_interests").get<int>();
    } catch (const nlohmann::json::exception& e) {
      return absl::InvalidArgumentError(where + e.what());
    }
    if (absl::Status s = CheckInterestCount(record.n_interests); !s.ok()) {
      return absl::InvalidArgumentError(where + std::string(s.message()));
    }
    batch.push_back(record);
  }
  return batch;
}

absl::StatusOr<std::vector<std::pair<CampaignOutcome, GateDecision>>> RunBatch(
    const InvertedIndex& index, const Population& population,
    std::span<const BatchRecord> batch, CensorPolicy policy, const PolicyGate& gate,
    int workers) {
  using Entry = std::pair<CampaignOutcome, GateDecision>;
  return CollectParallel<Entry>(batch.size(), workers, [&](std::size_t i) -> absl::StatusOr<Entry> {
    const BatchRecord& r = batch[i];
    CampaignSpec spec{r.target, SelectionStrategy{r.strategy, r.seed, static_cast<int>(kMaxQueryInterests)},
                      r.n_interests, policy};
    auto decision = ApplyPolicy(spec, gate, index, population);
    if (!decision.ok()) return decision.status();
    auto outcome = RunCampaign(index, population, spec);
    if (!outcome.ok()) return outcome.status();
    return Entry{*std::move(outcome), *std::move(decision)};
  });
}

std::string OutcomesCsv(std::span<const std::pair<CampaignOutcome, GateDecision>> outcomes) {
  std::string csv = "target,n_interests,reached_count,reported_reach,success,gate\n";
  for (const auto& [o, d] : outcomes) {
    absl::StrAppendFormat(&csv, "%d,%d,%d,%d,%s,%s\n", o.target, o.n_interests, o.reached_count,
                          o.reported_reach, o.success ? "true" : "false",
                          d.accepted ? "accepted" : d.reason);
  }
  return csv;
}

}  // namespace nanoscope
