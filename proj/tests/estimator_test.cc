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

#include "nanoscope/estimator.h"

#include <cmath>

#include "gtest/gtest.h"
#include "test_util.h"

namespace nanoscope {
namespace {

using testing::Build;
using testing::Records;
using testing::User;

AudienceMatrix MatrixOf(std::vector<std::vector<uint64_t>> rows, uint64_t floor = 1) {
  AudienceMatrix m;
  m.policy = CensorPolicy{floor};
  UserId id = 1;
  for (auto& sizes : rows) {
    m.n_max = std::max(m.n_max, static_cast<int>(sizes.size()));
    m.rows.push_back(PrefixAudiences{id++, {}, std::move(sizes)});
  }
  return m;
}

QuantileVector Vector(std::vector<uint64_t> values, double q = 50) {
  return QuantileVector{q, std::move(values)};
}

std::vector<FitPoint> Line(double a, double b, std::vector<int> ns) {
  std::vector<FitPoint> points;
  for (int n : ns) points.push_back({n, std::pow(10.0, b - a * std::log10(n + 1.0))});
  return points;
}

TEST(QuantileVector, NearestRankHandValues) {
  AudienceMatrix m = MatrixOf({{10}, {40}, {20}, {30}});
  EXPECT_EQ(ComputeQuantileVector(m, 50)->values, std::vector<uint64_t>{20});
  EXPECT_EQ(ComputeQuantileVector(m, 99)->values, std::vector<uint64_t>{40});
  EXPECT_EQ(ComputeQuantileVector(m, 25)->values, std::vector<uint64_t>{10});
  EXPECT_EQ(ComputeQuantileVector(m, 26)->values, std::vector<uint64_t>{20});
  EXPECT_EQ(ComputeQuantileVector(m, 0.01)->values, std::vector<uint64_t>{10});
}

TEST(QuantileVector, AllEqual) {
  AudienceMatrix m = MatrixOf({{20, 20}, {20, 20}, {20, 20}});
  for (double q : {1.0, 50.0, 90.0, 99.9}) {
    EXPECT_EQ(ComputeQuantileVector(m, q)->values, (std::vector<uint64_t>{20, 20}));
  }
}

TEST(QuantileVector, ShortRowsDropOutOfLaterColumns) {
  AudienceMatrix m = MatrixOf({{100, 50, 5}, {90}, {80, 40}});
  ASSERT_OK_AND_ASSIGN(v, ComputeQuantileVector(m, 99));
  EXPECT_EQ(v.values, (std::vector<uint64_t>{100, 50, 5}));
}

TEST(QuantileVector, RejectsBadQuantile) {
  AudienceMatrix m = MatrixOf({{1}, {2}});
  EXPECT_FALSE(ComputeQuantileVector(m, 0).ok());
  EXPECT_FALSE(ComputeQuantileVector(m, 100).ok());
}

TEST(QuantileVector, MonotoneInNAndQ) {
  ASSERT_OK_AND_ASSIGN(p, GeneratePopulation(testing::SmallConfig(2000, 300, 13)));
  InvertedIndex index = InvertedIndex::Build(p);
  for (const auto& s : {SelectionStrategy::LeastPopular(), SelectionStrategy::Random(3)}) {
    ASSERT_OK_AND_ASSIGN(m, BuildMatrix(p, index, s, CensorPolicy{1}));
    std::vector<uint64_t> previous;
    for (double q : {10.0, 50.0, 80.0, 90.0, 95.0}) {
      ASSERT_OK_AND_ASSIGN(v, ComputeQuantileVector(m, q));
      for (std::size_t i = 0; i < previous.size(); ++i) EXPECT_GE(v.values[i], previous[i]);
      previous = v.values;
    }
  }
}

TEST(TruncateAtFloor, KeepsFirstFloorValue) {
  ASSERT_OK_AND_ASSIGN(points, TruncateAtFloor(Vector({100, 50, 20, 20, 20}), CensorPolicy{20}));
  ASSERT_EQ(points.size(), 3u);
  EXPECT_EQ(points[2].n, 3);
  EXPECT_EQ(points[2].audience, 20.0);
}

TEST(TruncateAtFloor, FloorNeverHit) {
  ASSERT_OK_AND_ASSIGN(points, TruncateAtFloor(Vector({100, 50}), CensorPolicy{20}));
  EXPECT_EQ(points.size(), 2u);
}

TEST(TruncateAtFloor, SinglePointIsError) {
  auto points = TruncateAtFloor(Vector({20, 20, 20}, 90), CensorPolicy{20});
  ASSERT_FALSE(points.ok());
  EXPECT_EQ(points.status().code(), absl::StatusCode::kFailedPrecondition);
  const std::string message(points.status().message());
  EXPECT_NE(message.find("Q=90"), std::string::npos);
  EXPECT_NE(message.find("N=1"), std::string::npos);
}

TEST(FitLogLog, RecoversAnalyticLine) {
  ASSERT_OK_AND_ASSIGN(fit, FitLogLog(Line(3, 3, {1, 2, 9})));
  EXPECT_NEAR(fit.a, 3, 1e-9);
  EXPECT_NEAR(fit.b, 3, 1e-9);
  EXPECT_NEAR(fit.r_squared, 1, 1e-12);
  EXPECT_NEAR(fit.cutpoint, 9, 1e-9);
  EXPECT_EQ(fit.n_points_used, 3);
}

TEST(FitLogLog, SecondAnalyticLine) {
  ASSERT_OK_AND_ASSIGN(fit, FitLogLog(Line(2, 6, {1, 2, 3, 5, 8, 13})));
  EXPECT_NEAR(fit.a, 2, 1e-9);
  EXPECT_NEAR(fit.b, 6, 1e-9);
  EXPECT_NEAR(fit.cutpoint, 999, 1e-6);
}

TEST(FitLogLog, RandomLinesRecovered) {
  for (double a : {0.5, 1.7, 4.2}) {
    for (double b : {-1.0, 0.3, 5.5}) {
      ASSERT_OK_AND_ASSIGN(fit, FitLogLog(Line(a, b, {1, 2, 3, 4, 5, 6, 7})));
      EXPECT_NEAR(fit.a, a, 1e-9);
      EXPECT_NEAR(fit.b, b, 1e-9);
      EXPECT_NEAR(fit.r_squared, 1, 1e-12);
      EXPECT_NEAR(fit.cutpoint, std::pow(10.0, fit.b / fit.a) - 1, 1e-12 * (1 + fit.cutpoint));
    }
  }
}

TEST(FitLogLog, TwoPointsInterpolate) {
  ASSERT_OK_AND_ASSIGN(fit, FitLogLog(std::vector<FitPoint>{{1, 500}, {4, 3}}));
  EXPECT_DOUBLE_EQ(fit.r_squared, 1.0);
  EXPECT_NEAR(std::log10(500), fit.b - fit.a * std::log10(2), 1e-12);
  EXPECT_NEAR(std::log10(3), fit.b - fit.a * std::log10(5), 1e-12);
}

TEST(FitLogLog, ErrorContracts) {
  EXPECT_FALSE(FitLogLog(std::vector<FitPoint>{{1, 10}}).ok());
  EXPECT_FALSE(FitLogLog(std::vector<FitPoint>{{2, 10}, {2, 5}}).ok());
  EXPECT_FALSE(FitLogLog(std::vector<FitPoint>{{1, 10}, {2, 0}}).ok());
  auto rising = FitLogLog(std::vector<FitPoint>{{1, 10}, {2, 50}});
  EXPECT_EQ(rising.status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(Cutpoint, ClosedForms) {
  EXPECT_NEAR(*Cutpoint(3, 3), 9, 1e-12);
  EXPECT_NEAR(*Cutpoint(1, 0), 0, 1e-12);
  EXPECT_NEAR(*Cutpoint(2, 6), 999, 1e-9);
  EXPECT_FALSE(Cutpoint(0, 1).ok());
  EXPECT_FALSE(Cutpoint(-1, 1).ok());
}

TEST(EstimateCutpoint, ObservedWhenFirstPrefixIsUnique) {
  ASSERT_OK_AND_ASSIGN(e, EstimateCutpoint(Vector({1, 1, 1}), CensorPolicy{1}));
  EXPECT_TRUE(e.observed);
  EXPECT_EQ(e.fit.cutpoint, 1.0);
}

TEST(EstimateCutpoint, FloorErrorNamesQuantile) {
  auto e = EstimateCutpoint(Vector({20, 20}, 80), CensorPolicy{20});
  ASSERT_FALSE(e.ok());
  EXPECT_NE(std::string(e.status().message()).find("Q=80"), std::string::npos);
}

TEST(BuildMatrix, ToyLeastPopular) {
  Population p = testing::Toy();
  InvertedIndex index = InvertedIndex::Build(p);
  ASSERT_OK_AND_ASSIGN(m, BuildMatrix(p, index, SelectionStrategy::LeastPopular(), CensorPolicy{1}));
  ASSERT_EQ(m.rows.size(), 3u);
  EXPECT_EQ(m.n_max, 3);
  EXPECT_EQ(m.rows[0].sizes, (std::vector<uint64_t>{2, 2}));   // u1: b, a
  EXPECT_EQ(m.rows[1].sizes, (std::vector<uint64_t>{3}));      // u2: a
  EXPECT_EQ(m.rows[2].sizes, (std::vector<uint64_t>{1, 1, 1}));  // u3: c, b, a
}

TEST(BuildMatrix, NeedsTwoUsers) {
  Population p = Build(Records(1), {User(1, {0})});
  InvertedIndex index = InvertedIndex::Build(p);
  EXPECT_EQ(BuildMatrix(p, index, SelectionStrategy::LeastPopular(), CensorPolicy{1}).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(BuildMatrix, DeterministicAcrossWorkers) {
  ASSERT_OK_AND_ASSIGN(p, GeneratePopulation(testing::SmallConfig(700, 200, 2)));
  InvertedIndex index = InvertedIndex::Build(p);
  ASSERT_OK_AND_ASSIGN(a, BuildMatrix(p, index, SelectionStrategy::Random(5), CensorPolicy{20}, nullptr, 1));
  ASSERT_OK_AND_ASSIGN(b, BuildMatrix(p, index, SelectionStrategy::Random(5), CensorPolicy{20}, nullptr, 4));
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    ASSERT_EQ(a.rows[i].sizes, b.rows[i].sizes);
    ASSERT_EQ(a.rows[i].ordered_interests, b.rows[i].ordered_interests);
    for (uint64_t s : a.rows[i].sizes) ASSERT_GE(s, 20u);
  }
}

TEST(Bootstrap, DeterministicForSeed) {
  ASSERT_OK_AND_ASSIGN(p, GeneratePopulation(testing::SmallConfig(1500, 300, 8)));
  InvertedIndex index = InvertedIndex::Build(p);
  ASSERT_OK_AND_ASSIGN(m, BuildMatrix(p, index, SelectionStrategy::Random(1), CensorPolicy{1}));
  BootstrapOptions o;
  o.n_resamples = 10;
  o.seed = 77;
  ASSERT_OK_AND_ASSIGN(first, BootstrapCi(m, 50, o));
  ASSERT_OK_AND_ASSIGN(again, BootstrapCi(m, 50, o));
  EXPECT_EQ(first.ci_low, again.ci_low);
  EXPECT_EQ(first.ci_high, again.ci_high);
  EXPECT_EQ(first.n_resamples, 10);
  for (int workers : {1, 3, 8}) {
    o.workers = workers;
    o.n_resamples = 200;
    ASSERT_OK_AND_ASSIGN(r, BootstrapCi(m, 90, o));
    o.workers = 1;
    ASSERT_OK_AND_ASSIGN(base, BootstrapCi(m, 90, o));
    EXPECT_EQ(r.ci_low, base.ci_low);
    EXPECT_EQ(r.ci_high, base.ci_high);
  }
}

TEST(Bootstrap, MultiMatchesSingle) {
  ASSERT_OK_AND_ASSIGN(p, GeneratePopulation(testing::SmallConfig(1500, 300, 8)));
  InvertedIndex index = InvertedIndex::Build(p);
  ASSERT_OK_AND_ASSIGN(m, BuildMatrix(p, index, SelectionStrategy::LeastPopular(), CensorPolicy{1}));
  BootstrapOptions o;
  o.n_resamples = 300;
  o.seed = 5;
  const double qs[] = {50, 90};
  ASSERT_OK_AND_ASSIGN(multi, BootstrapCiMulti(m, qs, o));
  for (std::size_t i = 0; i < 2; ++i) {
    ASSERT_OK_AND_ASSIGN(single, BootstrapCi(m, qs[i], o));
    EXPECT_EQ(multi[i].ci_low, single.ci_low);
    EXPECT_EQ(multi[i].ci_high, single.ci_high);
    EXPECT_EQ(multi[i].point_estimate, single.point_estimate);
    EXPECT_TRUE(multi[i].brackets_point);
  }
}

TEST(Bootstrap, IdenticalRowsGiveZeroWidth) {
  std::vector<std::vector<uint64_t>> rows(50, std::vector<uint64_t>{900, 120, 30, 9, 2});
  AudienceMatrix m = MatrixOf(rows);
  BootstrapOptions o;
  o.n_resamples = 100;
  ASSERT_OK_AND_ASSIGN(r, BootstrapCi(m, 90, o));
  EXPECT_EQ(r.ci_low, r.point_estimate);
  EXPECT_EQ(r.ci_high, r.point_estimate);
  EXPECT_EQ(r.n_failed, 0);
}

TEST(Bootstrap, TooManyFailuresIsError) {
  // Half the users are unique at N=1 under the floor, so many resamples
  // leave a single point above it.
  std::vector<std::vector<uint64_t>> rows;
  for (int i = 0; i < 6; ++i) rows.push_back({20, 20});
  for (int i = 0; i < 6; ++i) rows.push_back({500, 40});
  AudienceMatrix m = MatrixOf(rows, 20);
  BootstrapOptions o;
  o.n_resamples = 500;
  auto r = BootstrapCi(m, 50, o);
  EXPECT_EQ(r.status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(UniquenessReport, UniqueSingleInterestsGiveObservedCutpoint) {
  std::vector<UserProfile> users;
  for (UserId id = 1; id <= 30; ++id) users.push_back(User(id, {id - 1}));
  Population p = Build(Records(30), std::move(users));
  InvertedIndex index = InvertedIndex::Build(p);
  const SelectionStrategy lp[] = {SelectionStrategy::LeastPopular()};
  ReportOptions options;
  options.bootstrap.n_resamples = 50;
  ASSERT_OK_AND_ASSIGN(report, BuildUniquenessReport(p, index, lp, kDefaultProbabilities,
                                                     CensorPolicy{1}, options));
  ASSERT_EQ(report.rows.size(), 4u);
  for (const UniquenessRow& row : report.rows) {
    EXPECT_LE(row.estimate.fit.cutpoint, 1.0);
    EXPECT_TRUE(row.estimate.observed);
    EXPECT_EQ(row.q, 100 * row.p);
  }
}

TEST(UniquenessReport, RowsAndMonotonicity) {
  ASSERT_OK_AND_ASSIGN(p, GeneratePopulation(testing::SmallConfig(3000, 400, 31)));
  InvertedIndex index = InvertedIndex::Build(p);
  const SelectionStrategy both[] = {SelectionStrategy::LeastPopular(), SelectionStrategy::Random(4)};
  ReportOptions options;
  options.bootstrap.n_resamples = 200;
  ASSERT_OK_AND_ASSIGN(report, BuildUniquenessReport(p, index, both, kDefaultProbabilities,
                                                     CensorPolicy{1}, options));
  ASSERT_EQ(report.rows.size(), 8u);
  EXPECT_EQ(report.subgroup, "all");
  EXPECT_EQ(report.n_users, 3000u);
  for (std::size_t i = 0; i < 8; ++i) {
    const UniquenessRow& row = report.rows[i];
    EXPECT_EQ(row.strategy, i < 4 ? "lp" : "random");
    EXPECT_EQ(row.actionable_interests, static_cast<int>(std::ceil(row.estimate.fit.cutpoint)));
    if (i % 4 != 0) {
      EXPECT_GE(row.estimate.fit.cutpoint, report.rows[i - 1].estimate.fit.cutpoint);
    }
  }
  EXPECT_LE(report.rows[2].estimate.fit.cutpoint, report.rows[6].estimate.fit.cutpoint);
  ASSERT_FALSE(BuildUniquenessReport(p, index, both, std::vector<double>{1.0}, CensorPolicy{1},
                                     options).ok());
}

TEST(SubgroupReports, SmallGroupsSkippedWithReason) {
  std::vector<UserProfile> users;
  for (UserId id = 1; id <= 250; ++id) {
    Demographics d;
    d.gender = id <= 50 ? Gender::kFemale : Gender::kMale;
    std::vector<InterestId> interests;
    for (InterestId i = 0; i < 12; ++i) {
      if ((id * 7 + i * 13) % 5 != 0) interests.push_back((id + i * i) % 40);
    }
    std::sort(interests.begin(), interests.end());
    interests.erase(std::unique(interests.begin(), interests.end()), interests.end());
    users.push_back(User(id, interests, d));
  }
  Population p = Build(Records(40), std::move(users));
  InvertedIndex index = InvertedIndex::Build(p);
  const SelectionStrategy lp[] = {SelectionStrategy::LeastPopular()};
  const double p90[] = {0.9};
  BootstrapOptions bootstrap;
  bootstrap.n_resamples = 50;
  ASSERT_OK_AND_ASSIGN(out, BuildSubgroupReports(p, index, Grouping::kGender, 100, lp, p90,
                                                 CensorPolicy{1}, bootstrap));
  ASSERT_EQ(out.reports.size(), 1u);
  EXPECT_EQ(out.reports[0].subgroup, "male");
  EXPECT_EQ(out.reports[0].n_users, 200u);
  bool female_skipped = false;
  for (const auto& [label, reason] : out.skipped) {
    if (label == "female") {
      female_skipped = true;
      EXPECT_NE(reason.find("50"), std::string::npos) << reason;
    }
  }
  EXPECT_TRUE(female_skipped);
  EXPECT_FALSE(BuildSubgroupReports(p, index, Grouping::kGender, 1000, lp, p90, CensorPolicy{1},
                                    bootstrap).ok());
}

TEST(Grouping, Parse) {
  EXPECT_EQ(*ParseGrouping("gender"), Grouping::kGender);
  EXPECT_EQ(*ParseGrouping("age"), Grouping::kAgeBand);
  EXPECT_EQ(*ParseGrouping("country"), Grouping::kCountry);
  EXPECT_FALSE(ParseGrouping("height").ok());
}

}  // namespace
}  // namespace nanoscope
