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

#ifndef NANOSCOPE_POPULATION_H_
#define NANOSCOPE_POPULATION_H_

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"

namespace nanoscope {

using InterestId = uint64_t;
using UserId = uint64_t;

enum class Gender { kMale, kFemale, kUndisclosed };

// Life-stage bands used for demographic breakdowns.
enum class AgeBand { kAdolescence, kEarlyAdulthood, kAdulthood, kMaturity };

inline constexpr int kMinimumAge = 13;

struct Demographics {
  Gender gender = Gender::kUndisclosed;
  std::optional<int> age_years;
  std::optional<std::string> country;  // ISO-3166 alpha-2

  bool operator==(const Demographics&) const = default;
};

std::optional<AgeBand> AgeBandOf(std::optional<int> age_years);
const char* GenderCode(Gender gender);  // "m", "f", "u"
std::optional<Gender> ParseGenderCode(std::string_view code);
const char* GenderName(Gender gender);
const char* AgeBandName(AgeBand band);
std::optional<AgeBand> ParseAgeBand(std::string_view name);
inline constexpr AgeBand kAllAgeBands[] = {AgeBand::kAdolescence, AgeBand::kEarlyAdulthood,
                                           AgeBand::kAdulthood, AgeBand::kMaturity};

struct InterestRecord {
  InterestId interest_id = 0;
  std::string name;
  uint64_t global_audience = 0;

  bool operator==(const InterestRecord&) const = default;
};

struct UserProfile {
  UserId user_id = 0;
  Demographics demographics;
  std::vector<InterestId> interests;  // sorted ascending, unique

  bool operator==(const UserProfile&) const = default;
};

// Interest catalog with O(1) id lookup. Positions are dense in [0, size()).
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<InterestRecord> records);

  std::size_t size() const { return records_.size(); }
  const std::vector<InterestRecord>& records() const { return records_; }
  const InterestRecord& at(std::size_t position) const { return records_[position]; }
  std::optional<std::size_t> PositionOf(InterestId id) const;
  const InterestRecord* Find(InterestId id) const;

 private:
  friend class Population;
  std::vector<InterestRecord> records_;
  std::unordered_map<InterestId, std::size_t> position_;
};

struct Provenance {
  enum class Kind { kGenerated, kIngested };
  Kind kind = Kind::kGenerated;
  uint64_t seed = 0;   // generated only
  std::string digest;  // config digest (generated) or input digest (ingested)

  bool operator==(const Provenance&) const = default;
};

// A demographic predicate; unset fields match everything.
struct DemographicFilter {
  std::optional<Gender> gender;
  std::optional<AgeBand> age_band;
  std::optional<std::pair<int, int>> age_range;  // inclusive
  std::optional<std::set<std::string>> countries;

  bool Matches(const Demographics& d) const;
  bool empty() const { return !gender && !age_band && !age_range && !countries; }
  std::string Describe() const;
};

// The analysis universe. Immutable once built; safe for concurrent readers.
//
// A subgroup view shares the catalog of the population it came from, so
// every global_audience value keeps referring to the full universe.
class Population {
 public:
  // Validates user invariants and recomputes every global_audience from the
  // user interest sets (any incoming counts are ignored).
  static absl::StatusOr<Population> Create(std::vector<InterestRecord> catalog,
                                           std::vector<UserProfile> users,
                                           Provenance provenance);

  const Catalog& catalog() const { return *catalog_; }
  std::shared_ptr<const Catalog> shared_catalog() const { return catalog_; }
  const std::vector<UserProfile>& users() const { return *users_; }
  const Provenance& provenance() const { return provenance_; }
  bool is_subgroup() const { return subgroup_; }

  const UserProfile* FindUser(UserId id) const;
  uint64_t total_occurrences() const;

  // Restricted view; fails when the predicate matches no user.
  absl::StatusOr<Population> FilterSubgroup(const DemographicFilter& filter) const;

  // Stable content digest (FNV-1a over the canonical serialization).
  std::string ContentDigest() const;

 private:
  Population() = default;

  std::shared_ptr<const Catalog> catalog_;
  std::shared_ptr<const std::vector<UserProfile>> users_;
  std::shared_ptr<const std::unordered_map<UserId, std::size_t>> user_position_;
  Provenance provenance_;
  bool subgroup_ = false;
};

// Audit used by tests and ingestion: recount every interest from users.
bool CatalogMatchesUsers(const Catalog& catalog, std::span<const UserProfile> users);

struct GeneratorConfig {
  uint64_t n_users = 100000;
  uint64_t n_interests = 10000;
  double popularity_exponent = 1.0;
  double interests_mu = 0.0;  // log-normal location of interests per user
  double interests_sigma = 1.0;
  uint64_t interests_min = 1;
  uint64_t interests_max = 1;
  uint64_t seed = 0;

  absl::Status Validate() const;
  // Canonical key=value text; also the on-disk config format.
  std::string ToText() const;
  static absl::StatusOr<GeneratorConfig> FromText(std::string_view text);
  std::string Digest() const;
};

// Desk-scale calibration profile: a 10k-interest catalog with Zipf(1.0)
// popularity and a log-normal interests-per-user count (median 200, capped
// at 30% of the catalog). At 100k users random-interest uniqueness needs
// roughly 13 (median user) to 23 (90th percentile) interests.
inline constexpr uint64_t kCalibratedInterests = 10000;
inline constexpr double kCalibratedExponent = 1.0;
inline constexpr double kCalibratedMu = 5.298317366548036;  // ln(200)
inline constexpr double kCalibratedSigma = 0.9;
inline constexpr uint64_t kCalibratedMaxInterests = 3000;

// Shipped desk-scale calibration profile.
GeneratorConfig CalibratedConfig(uint64_t n_users = 100000, uint64_t seed = 0);

absl::StatusOr<Population> GeneratePopulation(const GeneratorConfig& config);

struct PercentileSummary {
  std::map<int, double> values;  // percentile -> nearest-rank value
  uint64_t min = 0;
  uint64_t max = 0;
  std::size_t count = 0;
};

struct StatsReport {
  std::size_t n_users = 0;
  std::size_t n_interests = 0;
  std::size_t n_held_interests = 0;  // interests with global_audience > 0
  uint64_t total_occurrences = 0;
  PercentileSummary interests_per_user;
  PercentileSummary interest_audience;  // over held interests
  std::map<std::string, std::size_t> gender;
  std::map<std::string, std::size_t> age_band;  // plus "undisclosed"
  std::map<std::string, std::size_t> country;   // plus "undisclosed"
};

inline constexpr int kStatsPercentiles[] = {1, 5, 25, 50, 75, 95, 99};

absl::StatusOr<StatsReport> SummaryStats(const Population& population);

// Nearest-rank percentile of an ascending-sorted sample: the element at
// 1-based rank ceil(q/100 * n), clamped to [1, n].
template <typename T>
T NearestRank(std::span<const T> sorted, double q) {
  const std::size_t n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) / 100.0));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

}  // namespace nanoscope

#endif  // NANOSCOPE_POPULATION_H_
