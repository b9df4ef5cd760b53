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

#include "nanoscope/population.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "nanoscope/digest.h"
#include "nanoscope/random.h"

namespace nanoscope {

std::optional<AgeBand> AgeBandOf(std::optional<int> age_years) {
  if (!age_years) return std::nullopt;
  const int age = *age_years;
  if (age < kMinimumAge) return std::nullopt;
  if (age <= 19) return AgeBand::kAdolescence;
  if (age <= 39) return AgeBand::kEarlyAdulthood;
  if (age <= 64) return AgeBand::kAdulthood;
  return AgeBand::kMaturity;
}

const char* GenderCode(Gender gender) {
  switch (gender) {
    case Gender::kMale: return "m";
    case Gender::kFemale: return "f";
    case Gender::kUndisclosed: return "u";
  }
  return "u";
}

std::optional<Gender> ParseGenderCode(std::string_view code) {
  if (code == "m" || code == "male") return Gender::kMale;
  if (code == "f" || code == "female") return Gender::kFemale;
  if (code == "u" || code == "undisclosed") return Gender::kUndisclosed;
  return std::nullopt;
}

const char* GenderName(Gender gender) {
  switch (gender) {
    case Gender::kMale: return "male";
    case Gender::kFemale: return "female";
    case Gender::kUndisclosed: return "undisclosed";
  }
  return "undisclosed";
}

const char* AgeBandName(AgeBand band) {
  switch (band) {
    case AgeBand::kAdolescence: return "13-19";
    case AgeBand::kEarlyAdulthood: return "20-39";
    case AgeBand::kAdulthood: return "40-64";
    case AgeBand::kMaturity: return "65+";
  }
  return "";
}

std::optional<AgeBand> ParseAgeBand(std::string_view name) {
  for (AgeBand band : kAllAgeBands) {
    if (name == AgeBandName(band)) return band;
  }
  if (name == "adolescence") return AgeBand::kAdolescence;
  if (name == "early-adulthood") return AgeBand::kEarlyAdulthood;
  if (name == "adulthood") return AgeBand::kAdulthood;
  if (name == "maturity") return AgeBand::kMaturity;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Catalog

Catalog::Catalog(std::vector<InterestRecord> records) : records_(std::move(records)) {
  position_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    position_.emplace(records_[i].interest_id, i);
  }
}

std::optional<std::size_t> Catalog::PositionOf(InterestId id) const {
  auto it = position_.find(id);
  if (it == position_.end()) return std::nullopt;
  return it->second;
}

const InterestRecord* Catalog::Find(InterestId id) const {
  auto it = position_.find(id);
  return it == position_.end() ? nullptr : &records_[it->second];
}

bool CatalogMatchesUsers(const Catalog& catalog, std::span<const UserProfile> users) {
  std::vector<uint64_t> counts(catalog.size(), 0);
  for (const UserProfile& user : users) {
    for (InterestId id : user.interests) {
      auto pos = catalog.PositionOf(id);
      if (!pos) return false;
      ++counts[*pos];
    }
  }
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (counts[i] != catalog.at(i).global_audience) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// DemographicFilter

bool DemographicFilter::Matches(const Demographics& d) const {
  if (gender && d.gender != *gender) return false;
  if (age_band) {
    auto band = AgeBandOf(d.age_years);
    if (!band || *band != *age_band) return false;
  }
  if (age_range) {
    if (!d.age_years) return false;
    if (*d.age_years < age_range->first || *d.age_years > age_range->second) return false;
  }
  if (countries) {
    if (!d.country || !countries->contains(*d.country)) return false;
  }
  return true;
}

std::string DemographicFilter::Describe() const {
  std::vector<std::string> parts;
  if (gender) parts.push_back(absl::StrCat("gender=", GenderName(*gender)));
  if (age_band) parts.push_back(absl::StrCat("age_band=", AgeBandName(*age_band)));
  if (age_range) {
    parts.push_back(absl::StrFormat("age=[%d,%d]", age_range->first, age_range->second));
  }
  if (countries) parts.push_back(absl::StrCat("country=", absl::StrJoin(*countries, "|")));
  return parts.empty() ? "all" : absl::StrJoin(parts, ",");
}

// ---------------------------------------------------------------------------
// Population

absl::StatusOr<Population> Population::Create(std::vector<InterestRecord> catalog,
                                              std::vector<UserProfile> users,
                                              Provenance provenance) {
  auto owned_catalog = std::make_shared<Catalog>(std::move(catalog));
  if (owned_catalog->position_.size() != owned_catalog->records_.size()) {
    return absl::InvalidArgumentError("duplicate interest_id in catalog");
  }
  for (InterestRecord& record : owned_catalog->records_) record.global_audience = 0;

  auto positions = std::make_shared<std::unordered_map<UserId, std::size_t>>();
  positions->reserve(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    UserProfile& user = users[i];
    if (!positions->emplace(user.user_id, i).second) {
      return absl::InvalidArgumentError(absl::StrCat("duplicate user_id ", user.user_id));
    }
    if (user.interests.empty()) {
      return absl::InvalidArgumentError(absl::StrCat("user ", user.user_id, " has no interests"));
    }
    if (user.demographics.age_years && *user.demographics.age_years < kMinimumAge) {
      return absl::InvalidArgumentError(
          absl::StrCat("user ", user.user_id, " is younger than ", kMinimumAge));
    }
    std::sort(user.interests.begin(), user.interests.end());
    if (std::adjacent_find(user.interests.begin(), user.interests.end()) !=
        user.interests.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("user ", user.user_id, " lists an interest twice"));
    }
    for (InterestId id : user.interests) {
      auto pos = owned_catalog->PositionOf(id);
      if (!pos) {
        return absl::InvalidArgumentError(
            absl::StrCat("user ", user.user_id, " references unknown interest ", id));
      }
      ++owned_catalog->records_[*pos].global_audience;
    }
  }

  Population population;
  population.catalog_ = std::move(owned_catalog);
  population.users_ = std::make_shared<const std::vector<UserProfile>>(std::move(users));
  population.user_position_ = std::move(positions);
  population.provenance_ = std::move(provenance);
  return population;
}

const UserProfile* Population::FindUser(UserId id) const {
  auto it = user_position_->find(id);
  return it == user_position_->end() ? nullptr : &(*users_)[it->second];
}

uint64_t Population::total_occurrences() const {
  uint64_t total = 0;
  for (const UserProfile& user : *users_) total += user.interests.size();
  return total;
}

absl::StatusOr<Population> Population::FilterSubgroup(const DemographicFilter& filter) const {
  std::vector<UserProfile> selected;
  for (const UserProfile& user : *users_) {
    if (filter.Matches(user.demographics)) selected.push_back(user);
  }
  if (selected.empty()) {
    return absl::NotFoundError(absl::StrCat("no users match filter ", filter.Describe()));
  }
  auto positions = std::make_shared<std::unordered_map<UserId, std::size_t>>();
  for (std::size_t i = 0; i < selected.size(); ++i) positions->emplace(selected[i].user_id, i);

  Population view;
  view.catalog_ = catalog_;
  view.users_ = std::make_shared<const std::vector<UserProfile>>(std::move(selected));
  view.user_position_ = std::move(positions);
  view.provenance_ = provenance_;
  view.subgroup_ = true;
  return view;
}

std::string Population::ContentDigest() const {
  Fnv1a64 hash;
  for (const InterestRecord& record : catalog_->records()) {
    hash.Update(record.interest_id);
    hash.Update(record.name);
    hash.Update(record.global_audience);
  }
  for (const UserProfile& user : *users_) {
    hash.Update(user.user_id);
    hash.Update(GenderCode(user.demographics.gender));
    hash.Update(static_cast<uint64_t>(user.demographics.age_years.value_or(-1)));
    hash.Update(user.demographics.country.value_or("--"));
    hash.Update(static_cast<uint64_t>(user.interests.size()));
    for (InterestId id : user.interests) hash.Update(id);
  }
  return hash.Hex();
}

// ---------------------------------------------------------------------------
// Generator configuration

absl::Status GeneratorConfig::Validate() const {
  if (n_users == 0) return absl::InvalidArgumentError("n_users must be positive");
  if (n_interests == 0) return absl::InvalidArgumentError("n_interests must be positive");
  if (n_interests > std::numeric_limits<uint32_t>::max()) {
    return absl::InvalidArgumentError("n_interests too large");
  }
  if (!std::isfinite(popularity_exponent) || popularity_exponent <= 0) {
    return absl::InvalidArgumentError("popularity_exponent must be a positive finite number");
  }
  if (!std::isfinite(interests_mu) || !std::isfinite(interests_sigma) || interests_sigma < 0) {
    return absl::InvalidArgumentError("interests_mu/interests_sigma must be finite, sigma >= 0");
  }
  if (interests_min < 1) return absl::InvalidArgumentError("interests_min must be >= 1");
  if (interests_min > interests_max) {
    return absl::InvalidArgumentError("interests_min exceeds interests_max");
  }
  if (interests_max > n_interests) {
    return absl::InvalidArgumentError(absl::StrCat("interests_max (", interests_max,
                                                   ") exceeds n_interests (", n_interests, ")"));
  }
  return absl::OkStatus();
}

namespace {

std::string Shortest(double value) {
  char buffer[32];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

}  // namespace

std::string GeneratorConfig::ToText() const {
  return absl::StrCat("n_users = ", n_users, "\n",
                      "n_interests = ", n_interests, "\n",
                      "popularity_exponent = ", Shortest(popularity_exponent), "\n",
                      "interests_mu = ", Shortest(interests_mu), "\n",
                      "interests_sigma = ", Shortest(interests_sigma), "\n",
                      "interests_min = ", interests_min, "\n",
                      "interests_max = ", interests_max, "\n",
                      "seed = ", seed, "\n");
}

namespace {

absl::Status ParseUnsigned(absl::string_view key, absl::string_view value, uint64_t& out) {
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    return absl::InvalidArgumentError(absl::StrCat(key, ": not an unsigned integer: ", value));
  }
  return absl::OkStatus();
}

absl::Status ParseReal(absl::string_view key, absl::string_view value, double& out) {
  std::string copy(value);
  char* end = nullptr;
  out = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size()) {
    return absl::InvalidArgumentError(absl::StrCat(key, ": not a number: ", value));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<GeneratorConfig> GeneratorConfig::FromText(std::string_view text) {
  GeneratorConfig config;
  std::set<std::string> seen;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(absl::string_view(text.data(), text.size()), '\n')) {
    ++line_number;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_number, ": expected key = value"));
    }
    const std::string key(absl::StripAsciiWhitespace(line.substr(0, eq)));
    const absl::string_view value = absl::StripAsciiWhitespace(line.substr(eq + 1));
    absl::Status status;
    if (key == "n_users") status = ParseUnsigned(key, value, config.n_users);
    else if (key == "n_interests") status = ParseUnsigned(key, value, config.n_interests);
    else if (key == "popularity_exponent") status = ParseReal(key, value, config.popularity_exponent);
    else if (key == "interests_mu") status = ParseReal(key, value, config.interests_mu);
    else if (key == "interests_sigma") status = ParseReal(key, value, config.interests_sigma);
    else if (key == "interests_min") status = ParseUnsigned(key, value, config.interests_min);
    else if (key == "interests_max") status = ParseUnsigned(key, value, config.interests_max);
    else if (key == "seed") status = ParseUnsigned(key, value, config.seed);
    else {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_number, ": unknown key '", key, "'"));
    }
    if (!status.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_number, ": ", status.message()));
    }
    seen.insert(key);
  }
  for (const char* required : {"n_users", "n_interests", "popularity_exponent", "interests_mu",
                               "interests_sigma", "interests_min", "interests_max", "seed"}) {
    if (!seen.contains(required)) {
      return absl::InvalidArgumentError(absl::StrCat("config is missing '", required, "'"));
    }
  }
  if (absl::Status status = config.Validate(); !status.ok()) return status;
  return config;
}

std::string GeneratorConfig::Digest() const {
  Fnv1a64 hash;
  hash.Update(ToText());
  return hash.Hex();
}

GeneratorConfig CalibratedConfig(uint64_t n_users, uint64_t seed) {
  GeneratorConfig config;
  config.n_users = n_users;
  config.n_interests = kCalibratedInterests;
  config.popularity_exponent = kCalibratedExponent;
  config.interests_mu = kCalibratedMu;
  config.interests_sigma = kCalibratedSigma;
  config.interests_min = 1;
  config.interests_max = kCalibratedMaxInterests;
  config.seed = seed;
  return config;
}

// ---------------------------------------------------------------------------
// Generator

namespace {

// Vose alias table over fixed weights.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    probability_.assign(n, 0.0);
    alias_.assign(n, 0);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> scaled(n);
    std::vector<uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = weights[i] * static_cast<double>(n) / total;
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      const uint32_t s = small.back();
      small.pop_back();
      const uint32_t l = large.back();
      probability_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (uint32_t i : large) probability_[i] = 1.0;
    for (uint32_t i : small) probability_[i] = 1.0;
  }

  uint32_t Sample(Rng& rng) const {
    const auto column = static_cast<uint32_t>(rng.Below(probability_.size()));
    return rng.Uniform() < probability_[column] ? column : alias_[column];
  }

 private:
  std::vector<double> probability_;
  std::vector<uint32_t> alias_;
};

// Country codes with a skewed (Zipf) share; the head mirrors a
// Europe-heavy volunteer panel.
constexpr std::array<const char*, 80> kCountries = {
    "ES", "US", "FR", "GB", "DE", "IT", "MX", "AR", "BR", "CO", "PT", "CL", "NL", "BE",
    "CH", "AT", "IE", "SE", "NO", "DK", "FI", "PL", "CZ", "GR", "RO", "HU", "TR", "IN",
    "PK", "BD", "CN", "JP", "KR", "AU", "NZ", "CA", "PE", "VE", "EC", "UY", "PY", "BO",
    "CR", "PA", "GT", "HN", "SV", "NI", "DO", "CU", "PR", "MA", "DZ", "TN", "EG", "NG",
    "KE", "ZA", "GH", "SN", "IL", "SA", "AE", "QA", "IR", "RU", "UA", "BY", "LT", "LV",
    "EE", "SK", "SI", "HR", "RS", "BG", "PH", "ID", "MY", "TH"};
constexpr double kCountryExponent = 1.3;

// Gender and age-band mix of a volunteer browser-extension panel
// (counts out of 2,390 users).
constexpr double kMaleShare = 1949.0 / 2390.0;
constexpr double kFemaleShare = 347.0 / 2390.0;
struct AgeBandMix {
  int lo;
  int hi;
  double share;
};
constexpr std::array<AgeBandMix, 4> kAgeMix = {{{13, 19, 117.0 / 2390.0},
                                                {20, 39, 1374.0 / 2390.0},
                                                {40, 64, 578.0 / 2390.0},
                                                {65, 90, 19.0 / 2390.0}}};

Demographics DrawDemographics(Rng& rng, const AliasTable& countries) {
  Demographics d;
  const double g = rng.Uniform();
  d.gender = g < kMaleShare ? Gender::kMale
             : g < kMaleShare + kFemaleShare ? Gender::kFemale
                                             : Gender::kUndisclosed;
  double a = rng.Uniform();
  for (const AgeBandMix& band : kAgeMix) {
    if (a < band.share) {
      d.age_years = band.lo + static_cast<int>(rng.Below(band.hi - band.lo + 1));
      break;
    }
    a -= band.share;
  }
  d.country = kCountries[countries.Sample(rng)];
  return d;
}

uint64_t DrawInterestCount(Rng& rng, const GeneratorConfig& config) {
  const double raw = std::exp(config.interests_mu + config.interests_sigma * rng.Normal());
  const double rounded = std::round(raw);
  if (!(rounded >= static_cast<double>(config.interests_min))) return config.interests_min;
  if (rounded >= static_cast<double>(config.interests_max)) return config.interests_max;
  return static_cast<uint64_t>(rounded);
}

}  // namespace

absl::StatusOr<Population> GeneratePopulation(const GeneratorConfig& config) {
  if (absl::Status status = config.Validate(); !status.ok()) return status;
  const std::size_t n_interests = config.n_interests;

  std::vector<double> weights(n_interests);
  for (std::size_t i = 0; i < n_interests; ++i) {
    weights[i] = std::pow(static_cast<double>(i + 1), -config.popularity_exponent);
  }
  const AliasTable interest_table(weights);

  std::vector<double> country_weights(kCountries.size());
  for (std::size_t i = 0; i < kCountries.size(); ++i) {
    country_weights[i] = std::pow(static_cast<double>(i + 1), -kCountryExponent);
  }
  const AliasTable country_table(country_weights);

  std::vector<InterestRecord> catalog(n_interests);
  for (std::size_t i = 0; i < n_interests; ++i) {
    catalog[i].interest_id = i;
    catalog[i].name = absl::StrCat("interest-", i);
  }

  // stamp[i] == current marks interest i as already drawn for this user.
  std::vector<uint64_t> stamp(n_interests, 0);
  std::vector<std::pair<double, uint32_t>> keys;
  std::vector<UserProfile> users(config.n_users);
  for (uint64_t u = 0; u < config.n_users; ++u) {
    Rng rng(DeriveSeed(config.seed, u));
    UserProfile& user = users[u];
    user.user_id = u + 1;
    user.demographics = DrawDemographics(rng, country_table);
    const uint64_t count = DrawInterestCount(rng, config);
    user.interests.reserve(count);

    if (count == n_interests) {
      for (std::size_t i = 0; i < n_interests; ++i) user.interests.push_back(i);
    } else if (count * 8 <= n_interests) {
      // Successive weighted draws; a repeat is rejected, which renormalizes
      // over the interests not yet taken.
      const uint64_t current = u + 1;
      while (user.interests.size() < count) {
        const uint32_t i = interest_table.Sample(rng);
        if (stamp[i] == current) continue;
        stamp[i] = current;
        user.interests.push_back(i);
      }
    } else {
      // Dense case: exponential keys (Efraimidis-Spirakis) give the same
      // distribution as successive sampling without the rejection tail.
      keys.resize(n_interests);
      for (std::size_t i = 0; i < n_interests; ++i) {
        keys[i] = {-std::log(rng.UniformOpenZero()) / weights[i], static_cast<uint32_t>(i)};
      }
      std::nth_element(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(count) - 1,
                       keys.end());
      for (uint64_t k = 0; k < count; ++k) user.interests.push_back(keys[k].second);
    }
    std::sort(user.interests.begin(), user.interests.end());
  }

  Provenance provenance;
  provenance.kind = Provenance::Kind::kGenerated;
  provenance.seed = config.seed;
  provenance.digest = config.Digest();
  return Population::Create(std::move(catalog), std::move(users), std::move(provenance));
}

// ---------------------------------------------------------------------------
// Summary statistics

namespace {

PercentileSummary Summarize(std::vector<uint64_t> values) {
  PercentileSummary summary;
  std::sort(values.begin(), values.end());
  summary.count = values.size();
  if (values.empty()) return summary;
  summary.min = values.front();
  summary.max = values.back();
  for (int p : kStatsPercentiles) {
    summary.values[p] =
        static_cast<double>(NearestRank<uint64_t>(values, static_cast<double>(p)));
  }
  return summary;
}

}  // namespace

absl::StatusOr<StatsReport> SummaryStats(const Population& population) {
  if (population.users().empty()) {
    return absl::InvalidArgumentError("population has no users");
  }
  StatsReport report;
  report.n_users = population.users().size();
  report.n_interests = population.catalog().size();

  std::vector<uint64_t> per_user;
  per_user.reserve(report.n_users);
  for (const UserProfile& user : population.users()) {
    per_user.push_back(user.interests.size());
    report.total_occurrences += user.interests.size();
    ++report.gender[GenderName(user.demographics.gender)];
    auto band = AgeBandOf(user.demographics.age_years);
    ++report.age_band[band ? AgeBandName(*band) : "undisclosed"];
    ++report.country[user.demographics.country.value_or("undisclosed")];
  }
  report.interests_per_user = Summarize(std::move(per_user));

  std::vector<uint64_t> audiences;
  for (const InterestRecord& record : population.catalog().records()) {
    if (record.global_audience > 0) audiences.push_back(record.global_audience);
  }
  report.n_held_interests = audiences.size();
  report.interest_audience = Summarize(std::move(audiences));
  return report;
}

}  // namespace nanoscope
