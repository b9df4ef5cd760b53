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
#include <set>

#include "gtest/gtest.h"
#include "nanoscope/population_io.h"
#include "test_util.h"

namespace nanoscope {
namespace {

using testing::Build;
using testing::Records;
using testing::SmallConfig;
using testing::User;

TEST(GeneratePopulation, SingleUserSingleInterest) {
  GeneratorConfig c = SmallConfig(1, 1, 99);
  c.interests_max = 1;
  ASSERT_OK_AND_ASSIGN(p, GeneratePopulation(c));
  ASSERT_EQ(p.users().size(), 1u);
  EXPECT_EQ(p.users()[0].interests, std::vector<InterestId>{0});
  EXPECT_EQ(p.catalog().at(0).global_audience, 1u);
}

TEST(GeneratePopulation, SameSeedSameBytes) {
  GeneratorConfig c = SmallConfig(100, 50, 42);
  ASSERT_OK_AND_ASSIGN(a, GeneratePopulation(c));
  ASSERT_OK_AND_ASSIGN(b, GeneratePopulation(c));
  EXPECT_EQ(a.ContentDigest(), b.ContentDigest());
  EXPECT_EQ(a.users(), b.users());
  EXPECT_EQ(a.catalog().records(), b.catalog().records());
  c.seed = 43;
  ASSERT_OK_AND_ASSIGN(d, GeneratePopulation(c));
  EXPECT_NE(a.ContentDigest(), d.ContentDigest());
}

TEST(GeneratePopulation, CountsWithinClampAndCatalogAudited) {
  GeneratorConfig c = SmallConfig(2000, 300, 5);
  c.interests_min = 3;
  c.interests_max = 40;
  ASSERT_OK_AND_ASSIGN(p, GeneratePopulation(c));
  for (const UserProfile& u : p.users()) {
    EXPECT_GE(u.interests.size(), 3u);
    EXPECT_LE(u.interests.size(), 40u);
    EXPECT_TRUE(std::is_sorted(u.interests.begin(), u.interests.end()));
    EXPECT_EQ(std::adjacent_find(u.interests.begin(), u.interests.end()), u.interests.end());
    if (u.demographics.age_years) EXPECT_GE(*u.demographics.age_years, kMinimumAge);
  }
  EXPECT_TRUE(CatalogMatchesUsers(p.catalog(), p.users()));
}

TEST(GeneratePopulation, PopularityFollowsRank) {
  ASSERT_OK_AND_ASSIGN(p, GeneratePopulation(SmallConfig(5000, 200, 8)));
  EXPECT_GT(p.catalog().at(0).global_audience, p.catalog().at(50).global_audience);
  EXPECT_GT(p.catalog().at(50).global_audience, p.catalog().at(199).global_audience);
}

TEST(GeneratePopulation, DenseRegimeUsesWholeCatalog) {
  GeneratorConfig c = SmallConfig(50, 10, 3);
  c.interests_min = 10;
  c.interests_max = 10;
  ASSERT_OK_AND_ASSIGN(p, GeneratePopulation(c));
  for (const UserProfile& u : p.users()) EXPECT_EQ(u.interests.size(), 10u);
}

TEST(GeneratorConfig, RejectsInvalid) {
  GeneratorConfig c = SmallConfig(10, 10, 1);
  c.interests_max = 11;
  EXPECT_FALSE(c.Validate().ok());
  c = SmallConfig(10, 10, 1);
  c.popularity_exponent = std::nan("");
  EXPECT_FALSE(c.Validate().ok());
  c = SmallConfig(10, 10, 1);
  c.interests_sigma = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(c.Validate().ok());
  c = SmallConfig(0, 10, 1);
  EXPECT_FALSE(c.Validate().ok());
  EXPECT_FALSE(GeneratePopulation(c).ok());
}

TEST(GeneratorConfig, TextRoundTrip) {
  GeneratorConfig c = CalibratedConfig(1234, 77);
  ASSERT_OK_AND_ASSIGN(back, GeneratorConfig::FromText(c.ToText()));
  EXPECT_EQ(back.ToText(), c.ToText());
  EXPECT_EQ(back.interests_mu, c.interests_mu);
  EXPECT_EQ(back.Digest(), c.Digest());
}

TEST(GeneratorConfig, FromTextErrors) {
  EXPECT_FALSE(GeneratorConfig::FromText("n_users = 5\n").ok());
  std::string text = CalibratedConfig(10, 1).ToText();
  EXPECT_FALSE(GeneratorConfig::FromText(text + "bogus = 1\n").ok());
  std::string bad = text;
  bad.replace(bad.find("n_users = 10"), 12, "n_users = x");
  EXPECT_FALSE(GeneratorConfig::FromText(bad).ok());
}

TEST(Population, CreateRecomputesStaleAudiences) {
  auto records = Records(2);
  records[0].global_audience = 999;
  Population p = Build(records, {User(1, {0}), User(2, {0, 1})});
  EXPECT_EQ(p.catalog().at(0).global_audience, 2u);
  EXPECT_EQ(p.catalog().at(1).global_audience, 1u);
  EXPECT_EQ(p.total_occurrences(), 3u);
}

TEST(Population, CreateRejectsBrokenInvariants) {
  EXPECT_FALSE(Population::Create(Records(2), {User(1, {0}), User(1, {1})}, {}).ok());
  EXPECT_FALSE(Population::Create(Records(2), {User(1, {})}, {}).ok());
  EXPECT_FALSE(Population::Create(Records(2), {User(1, {5})}, {}).ok());
  EXPECT_FALSE(Population::Create(Records(2), {User(1, {0, 0})}, {}).ok());
  Demographics young;
  young.age_years = 12;
  EXPECT_FALSE(Population::Create(Records(2), {User(1, {0}, young)}, {}).ok());
}

Demographics Aged(int years, Gender g = Gender::kMale) {
  Demographics d;
  d.gender = g;
  d.age_years = years;
  return d;
}

TEST(FilterSubgroup, NoMatchIsError) {
  Population p = Build(Records(1), {User(1, {0}, Aged(30)), User(2, {0}, Aged(40))});
  DemographicFilter f;
  f.gender = Gender::kFemale;
  auto sub = p.FilterSubgroup(f);
  EXPECT_EQ(sub.status().code(), absl::StatusCode::kNotFound);
}

TEST(FilterSubgroup, AgeRangeKeepsCatalog) {
  Population p = Build(Records(2), {User(1, {0}, Aged(15)), User(2, {0, 1}, Aged(25)),
                                    User(3, {0}, Aged(45))});
  DemographicFilter f;
  f.age_range = std::make_pair(20, 39);
  ASSERT_OK_AND_ASSIGN(sub, p.FilterSubgroup(f));
  ASSERT_EQ(sub.users().size(), 1u);
  EXPECT_EQ(sub.users()[0].user_id, 2u);
  EXPECT_TRUE(sub.is_subgroup());
  EXPECT_EQ(sub.catalog().records(), p.catalog().records());
  EXPECT_EQ(sub.catalog().at(0).global_audience, 3u);
}

TEST(FilterSubgroup, AgeBandsPartitionKnownAges) {
  ASSERT_OK_AND_ASSIGN(p, GeneratePopulation(SmallConfig(3000, 100, 12)));
  std::multiset<UserId> seen;
  std::size_t known = 0;
  for (const UserProfile& u : p.users()) known += u.demographics.age_years.has_value();
  for (AgeBand band : kAllAgeBands) {
    DemographicFilter f;
    f.age_band = band;
    auto sub = p.FilterSubgroup(f);
    if (!sub.ok()) continue;
    for (const UserProfile& u : sub->users()) seen.insert(u.user_id);
  }
  EXPECT_EQ(seen.size(), known);
  EXPECT_EQ(std::set<UserId>(seen.begin(), seen.end()).size(), known);
}

TEST(AgeBand, Boundaries) {
  EXPECT_EQ(AgeBandOf(13), AgeBand::kAdolescence);
  EXPECT_EQ(AgeBandOf(19), AgeBand::kAdolescence);
  EXPECT_EQ(AgeBandOf(20), AgeBand::kEarlyAdulthood);
  EXPECT_EQ(AgeBandOf(39), AgeBand::kEarlyAdulthood);
  EXPECT_EQ(AgeBandOf(40), AgeBand::kAdulthood);
  EXPECT_EQ(AgeBandOf(64), AgeBand::kAdulthood);
  EXPECT_EQ(AgeBandOf(65), AgeBand::kMaturity);
  EXPECT_EQ(AgeBandOf(std::nullopt), std::nullopt);
}

TEST(SummaryStats, OneUserThreeInterests) {
  Population p = Build(Records(3), {User(1, {0, 1, 2})});
  ASSERT_OK_AND_ASSIGN(s, SummaryStats(p));
  EXPECT_EQ(s.interests_per_user.values.at(50), 3.0);
  EXPECT_EQ(s.n_users, 1u);
  EXPECT_EQ(s.gender.at("undisclosed"), 1u);
}

TEST(SummaryStats, CountryBreakdownListsEveryCountry) {
  // 2,390 users over 80 distinct locations.
  std::vector<UserProfile> users;
  for (UserId id = 1; id <= 2390; ++id) {
    Demographics d;
    d.country = std::string{static_cast<char>('A' + (id % 80) / 26),
                            static_cast<char>('A' + (id % 80) % 26)};
    users.push_back(User(id, {0}, d));
  }
  Population p = Build(Records(1), std::move(users));
  ASSERT_OK_AND_ASSIGN(s, SummaryStats(p));
  EXPECT_EQ(s.country.size(), 80u);
}

TEST(SummaryStats, PercentilesAreNearestRank) {
  std::vector<UserProfile> users;
  for (UserId id = 1; id <= 4; ++id) {
    std::vector<InterestId> interests;
    for (InterestId i = 0; i < id * 10; ++i) interests.push_back(i);
    users.push_back(User(id, interests));
  }
  Population p = Build(Records(40), std::move(users));
  ASSERT_OK_AND_ASSIGN(s, SummaryStats(p));
  EXPECT_EQ(s.interests_per_user.values.at(50), 20.0);
  EXPECT_EQ(s.interests_per_user.values.at(99), 40.0);
  EXPECT_EQ(s.interests_per_user.values.at(1), 10.0);
}

}  // namespace
}  // namespace nanoscope
