// Copyright 2026 The shuffledp Authors
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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "shuffledp/defense.hpp"
#include "shuffledp/shuffle.hpp"
#include "test_util.hpp"

namespace shuffledp {
namespace {

const BaseProtocol kCount = BaseProtocol::For(Query::Count(), 64);
const PrivacyBudget kBudget{1.0, 1e-4, 0.1};

std::set<TokenId> AllTokens(const TreePlan& plan, const TokenTable& t) {
  std::set<TokenId> out;
  for (int r = 1; r <= plan.num_levels(); ++r)
    for (std::int64_t g = 1; g <= plan.level(r).num_groups; ++g)
      out.insert(t.token({r, g}));
  return out;
}

TEST(ProvisionTest, HsdpTokenCount) {
  const TreePlan plan = PlanHsdp(kCount, 4, kBudget);
  Rng rng(1);
  const TokenTable tokens = Provision(plan, rng);
  EXPECT_EQ(tokens.size(), 7u);
  EXPECT_EQ(AllTokens(plan, tokens).size(), 7u);
}

TEST(ProvisionTest, OhsdpTokenCount) {
  const TreePlan plan = PlanOhsdp(kCount, 8, kBudget, 4, 1);
  Rng rng(2);
  EXPECT_EQ(Provision(plan, rng).size(), 3u);
}

TEST(ProvisionTest, SeedsGiveDisjointTokens) {
  const TreePlan plan = PlanHsdp(kCount, 64, kBudget);
  Rng a(10), b(11);
  const auto ta = AllTokens(plan, Provision(plan, a));
  const auto tb = AllTokens(plan, Provision(plan, b));
  EXPECT_EQ(ta.size(), 127u);
  for (TokenId t : ta) EXPECT_EQ(tb.count(t), 0u);
}

TEST(ProvisionTest, UsersKnowOneTokenPerLevel) {
  const TreePlan plan = PlanOhsdp(kCount, 32, kBudget, 4, 1);
  Rng rng(3);
  const TokenTable tokens = Provision(plan, rng);
  for (std::int64_t user = 1; user <= 32; ++user) {
    const auto known = tokens.AuthorizedFor(plan, user);
    ASSERT_EQ(static_cast<int>(known.size()), plan.num_levels());
    for (const ShufflerToken& t : known) {
      EXPECT_EQ(t.group, GroupOf(user, t.level, 4));
      EXPECT_EQ(t.id, tokens.token({t.level, t.group}));
    }
  }
}

TEST(SubmitTest, AcceptsOnlyMatchingToken) {
  ShufflerInbox inbox;
  inbox.token = 42;
  EXPECT_TRUE(Submit(inbox, {{1, 1}, 42, CountToken{1}}));
  EXPECT_FALSE(Submit(inbox, {{1, 1}, 43, CountToken{1}}));
  EXPECT_EQ(inbox.accepted.size(), 1u);
  EXPECT_EQ(inbox.rejected_count, 1);
  // Replaying one's own token is allowed; flooding is the analyzer's problem.
  for (int i = 0; i < 10; ++i) EXPECT_TRUE(Submit(inbox, {{1, 1}, 42, CountToken{1}}));
  EXPECT_EQ(inbox.accepted.size(), 11u);
}

TEST(ShuffleTest, SingletonAndCardinality) {
  Rng rng(4);
  ShufflerInbox inbox;
  inbox.accepted = {HistToken{3, 1}};
  EXPECT_EQ(Shuffle(inbox, rng), MessageSet({HistToken{3, 1}}));
  EXPECT_TRUE(inbox.accepted.empty());
}

TEST(ShuffleTest, PreservesMultiset) {
  Rng rng(5);
  for (int iter = 0; iter < 200; ++iter) {
    ShufflerInbox inbox;
    const auto size = testing::UniformInt(rng, 0, 30);
    std::map<std::pair<std::int64_t, int>, int> before;
    for (std::int64_t i = 0; i < size; ++i) {
      const HistToken t{testing::UniformInt(rng, 0, 4),
                        testing::UniformInt(rng, 0, 1) ? 1 : -1};
      inbox.accepted.push_back(t);
      ++before[{t.bin, t.sign}];
    }
    const MessageSet out = Shuffle(inbox, rng);
    std::map<std::pair<std::int64_t, int>, int> after;
    for (const Message& m : out) {
      const auto& t = std::get<HistToken>(m);
      ++after[{t.bin, t.sign}];
    }
    EXPECT_EQ(before, after);
  }
}

TEST(ShuffleTest, PermutationIsUniform) {
  Rng rng(6);
  std::map<std::vector<std::int64_t>, int> counts;
  const int runs = 10000;
  for (int i = 0; i < runs; ++i) {
    ShufflerInbox inbox;
    inbox.accepted = {HistToken{0, 1}, HistToken{1, 1}, HistToken{2, 1}};
    std::vector<std::int64_t> order;
    for (const Message& m : Shuffle(inbox, rng))
      order.push_back(std::get<HistToken>(m).bin);
    ++counts[order];
  }
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [order, c] : counts)
    EXPECT_NEAR(c / static_cast<double>(runs), 1.0 / 6, 0.02);
}

TEST(ShuffleNetworkTest, UnknownTokensNeverReachAnalyzer) {
  const TreePlan plan = PlanHsdp(kCount, 16, kBudget);
  Rng rng(7);
  const TokenTable tokens = Provision(plan, rng);
  ShuffleNetwork net(plan, tokens);
  std::int64_t valid = 0;
  for (int i = 0; i < 2000; ++i) {
    const int r = static_cast<int>(testing::UniformInt(rng, 0, plan.num_levels() + 1));
    const std::int64_t g = testing::UniformInt(rng, 0, 17);
    const bool honest = plan.Contains({r, g}) && testing::UniformInt(rng, 0, 1);
    const TokenId token = honest ? tokens.token({r, g}) : rng();
    if (net.Submit({{r, g}, token, CountToken{1}})) {
      EXPECT_TRUE(honest);
      ++valid;
    }
  }
  const NodeMessages shuffled = net.ShuffleAll(99);
  std::int64_t delivered = 0;
  for (const auto& level : shuffled)
    for (const auto& node : level) delivered += static_cast<std::int64_t>(node.size());
  EXPECT_EQ(delivered, valid);
  EXPECT_EQ(net.rejected(), 2000 - valid);
}

TEST(ShuffleNetworkTest, AttackerCannotReachOtherBottomGroups) {
  const TreePlan plan = PlanOhsdp(kCount, 64, kBudget, 4, 1);
  Rng rng(8);
  const TokenTable tokens = Provision(plan, rng);
  for (std::int64_t attacker = 1; attacker <= 64; ++attacker) {
    ShuffleNetwork net(plan, tokens);
    const auto known = tokens.AuthorizedFor(plan, attacker);
    // Try every known token at every node.
    for (const ShufflerToken& t : known)
      for (int r = 1; r <= plan.num_levels(); ++r)
        for (std::int64_t g = 1; g <= plan.level(r).num_groups; ++g)
          net.Submit({{r, g}, t.id, CountToken{1}});
    for (std::int64_t g = 1; g <= plan.level(1).num_groups; ++g) {
      const bool own = g == plan.GroupOf(attacker, 1);
      EXPECT_EQ(net.inbox({1, g}).accepted.empty(), !own);
    }
  }
}

TEST(ShuffleNetworkTest, DeterministicPerSeed) {
  const TreePlan plan = PlanHsdp(kCount, 8, kBudget);
  Rng rng(9);
  const TokenTable tokens = Provision(plan, rng);
  auto run = [&] {
    ShuffleNetwork net(plan, tokens);
    for (int i = 0; i < 50; ++i)
      net.Submit({{1, 1}, tokens.token({1, 1}), CountToken{i % 2 ? 1 : -1}});
    return net.ShuffleAll(1234);
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace shuffledp
