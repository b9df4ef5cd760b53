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
#include <set>

#include "gtest/gtest.h"
#include "test_util.h"

namespace nanoscope {
namespace {

using testing::Build;
using testing::kA;
using testing::kB;
using testing::kC;
using testing::Records;
using testing::User;

// Audiences a:100, b:50, c:10 over a 100-user population.
Population Sized() {
  std::vector<UserProfile> users;
  for (UserId id = 1; id <= 100; ++id) {
    std::vector<InterestId> interests{kA};
    if (id <= 50) interests.push_back(kB);
    if (id <= 10) interests.push_back(kC);
    users.push_back(User(id, interests));
  }
  return Build(Records(3), std::move(users));
}

TEST(SelectInterests, LeastPopularSortsByAudience) {
  Population p = Sized();
  const UserProfile& u = *p.FindUser(1);
  EXPECT_EQ(SelectInterests(u, p.catalog(), SelectionStrategy::LeastPopular()),
            (std::vector<InterestId>{kC, kB, kA}));
  EXPECT_EQ(SelectInterests(u, p.catalog(), SelectionStrategy::LeastPopular(2)),
            (std::vector<InterestId>{kC, kB}));
}

TEST(SelectInterests, LeastPopularTieBreaksById) {
  Population p = Build(Records(2), {User(1, {1, 0}), User(2, {0, 1})});
  EXPECT_EQ(SelectInterests(*p.FindUser(1), p.catalog(), SelectionStrategy::LeastPopular()),
            (std::vector<InterestId>{0, 1}));
}

TEST(SelectInterests, RandomIsDeterministicPermutation) {
  Population p = Build(Records(8), {User(5, {0, 1, 2, 3, 4, 5, 6, 7})});
  const UserProfile& u = p.users()[0];
  auto first = SelectInterests(u, p.catalog(), SelectionStrategy::Random(9));
  auto again = SelectInterests(u, p.catalog(), SelectionStrategy::Random(9));
  EXPECT_EQ(first, again);
  ASSERT_EQ(first.size(), 8u);
  EXPECT_EQ(std::set<InterestId>(first.begin(), first.end()).size(), 8u);
  bool differs = false;
  for (uint64_t seed = 10; seed < 20 && !differs; ++seed) {
    differs = SelectInterests(u, p.catalog(), SelectionStrategy::Random(seed)) != first;
  }
  EXPECT_TRUE(differs);
}

TEST(SelectInterests, RandomShorterListsArePrefixes) {
  ASSERT_OK_AND_ASSIGN(p, GeneratePopulation(testing::SmallConfig(50, 200, 3)));
  for (const UserProfile& u : p.users()) {
    auto full = SelectInterests(u, p.catalog(), SelectionStrategy::Random(4));
    for (int n = 1; n <= 25; ++n) {
      auto part = SelectInterests(u, p.catalog(), SelectionStrategy::Random(4, n));
      ASSERT_TRUE(std::equal(part.begin(), part.end(), full.begin()));
    }
    auto ordered = OrderInterests(u, p.catalog(), SelectionStrategy::Random(4), u.interests.size());
    ASSERT_EQ(ordered.size(), u.interests.size());
    ASSERT_TRUE(std::equal(full.begin(), full.end(), ordered.begin()));
  }
}

TEST(SelectInterests, RandomIndependentOfOtherUsers) {
  ASSERT_OK_AND_ASSIGN(p, GeneratePopulation(testing::SmallConfig(40, 100, 3)));
  const UserProfile& u = p.users()[17];
  Population alone = Build(std::vector<InterestRecord>(p.catalog().records()), {u});
  EXPECT_EQ(SelectInterests(u, p.catalog(), SelectionStrategy::Random(8)),
            SelectInterests(alone.users()[0], alone.catalog(), SelectionStrategy::Random(8)));
}

TEST(SelectInterests, RandomIsRoughlyUniform) {
  Population p = Build(Records(10), {User(1, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9})});
  std::vector<int> first_pick(10, 0);
  for (uint64_t seed = 0; seed < 5000; ++seed) {
    ++first_pick[SelectInterests(p.users()[0], p.catalog(), SelectionStrategy::Random(seed, 1))[0]];
  }
  for (int c : first_pick) {
    EXPECT_GT(c, 400);
    EXPECT_LT(c, 600);
  }
}

TEST(SelectionStrategy, Validation) {
  EXPECT_FALSE(SelectionStrategy::Create(SelectionKind::kRandom, 0, 0).ok());
  EXPECT_FALSE(SelectionStrategy::Create(SelectionKind::kRandom, 0, 26).ok());
  EXPECT_TRUE(SelectionStrategy::Create(SelectionKind::kRandom, 0, 25).ok());
  EXPECT_EQ(*ParseSelectionKind("lp"), SelectionKind::kLeastPopular);
  EXPECT_EQ(*ParseSelectionKind("random"), SelectionKind::kRandom);
  EXPECT_FALSE(ParseSelectionKind("best").ok());
}

TEST(PrefixAudiences, ToyUserThree) {
  Population p = testing::Toy();
  InvertedIndex index = InvertedIndex::Build(p);
  ASSERT_OK_AND_ASSIGN(uncensored,
                       ComputePrefixAudiences(index, 3, {kC, kB, kA}, CensorPolicy{1}));
  EXPECT_EQ(uncensored.sizes, (std::vector<uint64_t>{1, 1, 1}));
  ASSERT_OK_AND_ASSIGN(censored,
                       ComputePrefixAudiences(index, 3, {kC, kB, kA}, CensorPolicy{20}));
  EXPECT_EQ(censored.sizes, (std::vector<uint64_t>{20, 20, 20}));
}

TEST(PrefixAudiences, NonIncreasingForBothStrategies) {
  ASSERT_OK_AND_ASSIGN(p, GeneratePopulation(testing::SmallConfig(500, 150, 6)));
  InvertedIndex index = InvertedIndex::Build(p);
  for (const SelectionStrategy& s : {SelectionStrategy::LeastPopular(), SelectionStrategy::Random(2)}) {
    for (const UserProfile& u : p.users()) {
      ASSERT_OK_AND_ASSIGN(row, ComputePrefixAudiences(index, u.user_id,
                                                       SelectInterests(u, p.catalog(), s),
                                                       CensorPolicy{1}));
      ASSERT_EQ(row.sizes.size(), std::min<std::size_t>(25, u.interests.size()));
      for (std::size_t k = 1; k < row.sizes.size(); ++k) ASSERT_LE(row.sizes[k], row.sizes[k - 1]);
      ASSERT_GE(row.sizes.back(), 1u);
    }
  }
}

}  // namespace
}  // namespace nanoscope
