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

#ifndef NANOSCOPE_CAMPAIGN_H_
#define NANOSCOPE_CAMPAIGN_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nanoscope/audience_index.h"
#include "nanoscope/population.h"
#include "nanoscope/selection.h"

namespace nanoscope {

struct CampaignSpec {
  UserId target = 0;
  SelectionStrategy strategy;
  int n_interests = 1;
  CensorPolicy policy;
};

struct CampaignOutcome {
  UserId target = 0;
  int n_interests = 0;  // as requested
  std::vector<InterestId> interests_used;
  bool shortened = false;  // target holds fewer than n_interests
  uint64_t reached_count = 0;
  uint64_t reported_reach = 0;
  bool target_reached = false;
  bool success = false;
};

// Interests come from one full-length selection per (seed, target), so the
// list for N is always a prefix of the list for N + k.
absl::StatusOr<CampaignOutcome> RunCampaign(const InvertedIndex& index,
                                            const Population& population,
                                            const CampaignSpec& spec);

struct PolicyGate {
  std::optional<int> max_interests;
  std::optional<uint64_t> min_active_audience;

  bool pass_through() const { return !max_interests && !min_active_audience; }
};

struct GateDecision {
  bool accepted = true;
  std::string reason;  // "max_interests" or "min_active_audience" when rejected
  std::string detail;
};

// The audience gate looks at the true (uncensored) audience.
absl::StatusOr<GateDecision> ApplyPolicy(const CampaignSpec& spec, const PolicyGate& gate,
                                         const InvertedIndex& index,
                                         const Population& population);

// Targets drawn without replacement unless n_targets exceeds the population.
absl::StatusOr<std::vector<UserId>> SampleTargets(const Population& population,
                                                  std::size_t n_targets, uint64_t seed);

absl::StatusOr<double> SuccessRate(const InvertedIndex& index, const Population& population,
                                   const SelectionStrategy& strategy, int n_interests,
                                   std::size_t n_targets, uint64_t seed, int workers = 0);

struct SweepRow {
  int n_interests = 0;
  std::size_t n_targets = 0;
  std::size_t n_accepted = 0;
  std::size_t n_success = 0;
  std::size_t n_shortened = 0;
  double success_rate = 0.0;  // successes over all targets
};

struct SweepOptions {
  SelectionStrategy strategy;
  std::vector<int> n_values;
  std::size_t n_targets = 1000;
  uint64_t target_seed = 0;
  CensorPolicy policy;
  PolicyGate gate;
  int workers = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::pair<CampaignOutcome, GateDecision>> campaigns;  // target-major
};

absl::StatusOr<SweepResult> RunSweep(const InvertedIndex& index, const Population& population,
                                     const SweepOptions& options);

struct BatchRecord {
  UserId target = 0;
  SelectionKind strategy = SelectionKind::kRandom;
  uint64_t seed = 0;
  int n_interests = 1;
};

// One JSON object per line: {"target", "strategy", "seed", "n_interests"}.
absl::StatusOr<std::vector<BatchRecord>> ReadBatchJsonl(std::istream& in,
                                                        std::string_view source);

absl::StatusOr<std::vector<std::pair<CampaignOutcome, GateDecision>>> RunBatch(
    const InvertedIndex& index, const Population& population,
    std::span<const BatchRecord> batch, CensorPolicy policy, const PolicyGate& gate,
    int workers = 0);

std::string OutcomesCsv(std::span<const std::pair<CampaignOutcome, GateDecision>> outcomes);

}  // namespace nanoscope

#endif  // NANOSCOPE_CAMPAIGN_H_
