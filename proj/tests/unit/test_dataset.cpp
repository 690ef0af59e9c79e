// Copyright 2026 The fedcia Authors
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

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "fedcia/dataset.hpp"
#include "fedcia/error.hpp"
#include "test_support.hpp"

namespace fedcia {
namespace {

using testing::clustered_dataset;
using testing::TempDir;

InteractionDataset single_user(std::int32_t n) {
  InteractionDataset d;
  d.num_users = 1;
  d.num_items = n;
  for (std::int32_t i = 0; i < n; ++i) d.interactions.push_back({0, i});
  return d;
}

TEST(LoadInteractions, DuplicatePairCollapses) {
  TempDir dir;
  const auto p = dir.write("dup.data", "7\t9\t5\t0\n7\t9\t3\t1\n");
  const auto d = load_interactions(p, RatingFormat::kTabSeparated);
  EXPECT_EQ(d.num_users, 1);
  EXPECT_EQ(d.num_items, 1);
  ASSERT_EQ(d.interactions.size(), 1u);
  EXPECT_EQ(d.id_maps->users.raw(0), "7");
  EXPECT_EQ(d.id_maps->items.raw(0), "9");
}

TEST(LoadInteractions, EmptyFileIsAnError) {
  TempDir dir;
  const auto p = dir.write("empty.data", "");
  try {
    load_interactions(p, RatingFormat::kTabSeparated);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("zero interactions"), std::string::npos);
  }
}

TEST(LoadInteractions, MalformedLineReportsLineNumber) {
  TempDir dir;
  const auto p = dir.write("bad.data", "# header\n1\t2\t3\t4\nonly-one-field\n");
  try {
    load_interactions(p, RatingFormat::kTabSeparated);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}

TEST(LoadInteractions, MissingFileIsAnError) {
  EXPECT_THROW(load_interactions("/nonexistent/fedcia/u.data", RatingFormat::kTabSeparated),
               DataError);
}

TEST(LoadInteractions, DoubleColonFormatAndThreshold) {
  TempDir dir;
  const auto p = dir.write("r.dat", "1::10::5::0\n1::11::2::0\n2::11::4::0\n\n");
  const auto all = load_interactions(p, RatingFormat::kDoubleColonSeparated);
  EXPECT_EQ(all.interactions.size(), 3u);
  const auto kept = load_interactions(p, RatingFormat::kDoubleColonSeparated, 4.0);
  EXPECT_EQ(kept.interactions.size(), 2u);
  EXPECT_EQ(kept.num_items, 2);
  EXPECT_EQ(kept.num_users, 2);
}

TEST(LoadInteractions, IdempotentAndIdMapsRoundTrip) {
  TempDir dir;
  const auto p = dir.write("x.data", "5\t1\t1\t0\n3\t2\t1\t0\n5\t2\t1\t0\n");
  const auto a = load_interactions(p, RatingFormat::kTabSeparated);
  const auto b = load_interactions(p, RatingFormat::kTabSeparated);
  EXPECT_EQ(a.interactions, b.interactions);
  EXPECT_TRUE(a.id_maps->users == b.id_maps->users);
  for (const auto& x : a.interactions) {
    EXPECT_EQ(a.id_maps->users.find(a.id_maps->users.raw(x.user)), x.user);
    EXPECT_EQ(a.id_maps->items.find(a.id_maps->items.raw(x.item)), x.item);
  }
}

TEST(SplitDataset, TenInteractionsGiveSevenOneTwo) {
  const auto s = split_dataset(single_user(10), 0.2, 0.1, 3);
  EXPECT_EQ(s.train.interactions.size(), 7u);
  EXPECT_EQ(s.validation.interactions.size(), 1u);
  EXPECT_EQ(s.test.interactions.size(), 2u);
}

TEST(SplitDataset, ZeroTestFractionKeepsEverything) {
  const auto d = clustered_dataset(20, 16, 1);
  const auto s = split_dataset(d, 0.0, 0.1, 3);
  EXPECT_TRUE(s.test.interactions.empty());
  EXPECT_EQ(s.train.interactions.size() + s.validation.interactions.size(), d.interactions.size());
}

TEST(SplitDataset, SmallUsersStayInTrain) {
  const auto s = split_dataset(single_user(2), 0.5, 0.5, 3);
  EXPECT_EQ(s.train.interactions.size(), 2u);
  EXPECT_TRUE(s.test.interactions.empty());
}

TEST(SplitDataset, DisjointCoverAndDeterministic) {
  const auto d = clustered_dataset(30, 20, 2);
  const auto a = split_dataset(d, 0.2, 0.1, 11);
  const auto b = split_dataset(d, 0.2, 0.1, 11);
  EXPECT_EQ(a.train.interactions, b.train.interactions);
  EXPECT_EQ(a.test.interactions, b.test.interactions);
  std::multiset<Interaction> all;
  for (const auto* part : {&a.train, &a.validation, &a.test}) {
    EXPECT_EQ(part->num_items, d.num_items);
    EXPECT_EQ(part->num_users, d.num_users);
    EXPECT_EQ(part->id_maps, d.id_maps);
    all.insert(part->interactions.begin(), part->interactions.end());
  }
  EXPECT_EQ(all, std::multiset<Interaction>(d.interactions.begin(), d.interactions.end()));
  std::map<std::int32_t, int> train_per_user;
  for (const auto& x : a.train.interactions) ++train_per_user[x.user];
  std::set<std::int32_t> active;
  for (const auto& x : d.interactions) active.insert(x.user);
  for (auto u : active) EXPECT_GE(train_per_user[u], 1) << "user " << u;
}

TEST(SplitDataset, RejectsFractionsOutsideUnitInterval) {
  EXPECT_THROW(split_dataset(single_user(5), 1.5, 0.1, 0), std::invalid_argument);
  EXPECT_THROW(split_dataset(single_user(5), 0.2, -0.1, 0), std::invalid_argument);
}

InteractionDataset users_only(std::int32_t n) {
  InteractionDataset d;
  d.num_users = n;
  d.num_items = 1;
  for (std::int32_t u = 0; u < n; ++u) d.interactions.push_back({u, 0});
  return d;
}

TEST(PartitionClients, BalancedSizesFor943Users) {
  const auto p = partition_clients(users_only(943), 100, PartitionMode::kBalancedRandom, 5);
  const auto groups = p.users_by_client();
  ASSERT_EQ(groups.size(), 100u);
  int tens = 0, nines = 0;
  std::set<std::int32_t> seen;
  for (const auto& g : groups) {
    tens += g.size() == 10;
    nines += g.size() == 9;
    seen.insert(g.begin(), g.end());
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
  }
  EXPECT_EQ(tens, 43);
  EXPECT_EQ(nines, 57);
  EXPECT_EQ(seen.size(), 943u);
}

TEST(PartitionClients, SingleClientHoldsEveryone) {
  const auto p = partition_clients(users_only(17), 1, PartitionMode::kBalancedRandom, 5);
  for (auto c : p.assignments) EXPECT_EQ(c, 0);
}

TEST(PartitionClients, OneUserPerClientIsIdentity) {
  const auto p = partition_clients(users_only(943), 943, PartitionMode::kOneUserPerClient, 5);
  EXPECT_EQ(p.num_clients, 943);
  for (std::int32_t u = 0; u < 943; ++u) EXPECT_EQ(p.assignments[u], u);
}

TEST(PartitionClients, SeedChangesAssignmentOnly) {
  const auto a = partition_clients(users_only(50), 5, PartitionMode::kBalancedRandom, 1);
  const auto b = partition_clients(users_only(50), 5, PartitionMode::kBalancedRandom, 1);
  const auto c = partition_clients(users_only(50), 5, PartitionMode::kBalancedRandom, 2);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_NE(a.assignments, c.assignments);
}

TEST(PartitionClients, RejectsBadClientCounts) {
  EXPECT_THROW(partition_clients(users_only(5), 0, PartitionMode::kBalancedRandom, 0),
               std::invalid_argument);
  EXPECT_THROW(partition_clients(users_only(5), 6, PartitionMode::kBalancedRandom, 0),
               std::invalid_argument);
}

}  // namespace
}  // namespace fedcia
