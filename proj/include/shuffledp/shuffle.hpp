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

#ifndef SHUFFLEDP_SHUFFLE_HPP_
#define SHUFFLEDP_SHUFFLE_HPP_

#include <algorithm>
#include <cstdint>
#include <unordered_set>
#include <utility>
#include <vector>

#include "shuffledp/base_protocol.hpp"
#include "shuffledp/errors.hpp"
#include "shuffledp/random.hpp"
#include "shuffledp/tree_plan.hpp"

namespace shuffledp {

using TokenId = std::uint64_t;

// Secret identifier of shuffler (level, group). Drawn from the run's rng,
// never derived from the node coordinates.
struct ShufflerToken {
  TokenId id = 0;
  int level = 1;
  std::int64_t group = 1;
};

// One anonymous message addressed to a shuffler and carrying the token that
// authorizes it there.
struct Envelope {
  NodeId dest;
  TokenId token = 0;
  Message payload;
};

// Shuffled message multisets indexed [level - 1][group - 1].
using NodeMessages = std::vector<std::vector<MessageSet>>;

class TokenTable {
 public:
  TokenTable() = default;
  explicit TokenTable(std::vector<std::vector<TokenId>> tokens)
      : tokens_(std::move(tokens)) {}

  TokenId token(NodeId node) const {
    return tokens_.at(node.level - 1).at(node.group - 1);
  }

  std::size_t size() const {
    std::size_t total = 0;
    for (const auto& level : tokens_) total += level.size();
    return total;
  }

  int num_levels() const { return static_cast<int>(tokens_.size()); }
  std::int64_t num_groups(int level) const {
    return static_cast<std::int64_t>(tokens_.at(level - 1).size());
  }

  // The tokens user i is told: exactly one group per level.
  std::vector<ShufflerToken> AuthorizedFor(const TreePlan& plan,
                                           std::int64_t user) const {
    std::vector<ShufflerToken> out;
    out.reserve(tokens_.size());
    for (int r = 1; r <= plan.num_levels(); ++r) {
      const std::int64_t g = plan.GroupOf(user, r);
      out.push_back({token({r, g}), r, g});
    }
    return out;
  }

 private:
  std::vector<std::vector<TokenId>> tokens_;
};

// Draws a fresh, distinct random token for every shuffler in the plan.
inline TokenTable Provision(const TreePlan& plan, Rng& rng) {
  std::unordered_set<TokenId> used;
  used.reserve(static_cast<std::size_t>(plan.num_shufflers()) * 2);
  std::vector<std::vector<TokenId>> tokens(plan.levels.size());
  for (std::size_t r = 0; r < plan.levels.size(); ++r) {
    tokens[r].reserve(static_cast<std::size_t>(plan.levels[r].num_groups));
    for (std::int64_t g = 0; g < plan.levels[r].num_groups; ++g) {
      TokenId id = rng();
      while (!used.insert(id).second) id = rng();
      tokens[r].push_back(id);
    }
  }
  return TokenTable(std::move(tokens));
}

struct ShufflerInbox {
  TokenId token = 0;
  // Payloads of accepted envelopes; their tokens all equal `token`.
  MessageSet accepted;
  std::int64_t rejected_count = 0;
};

// Accepts the envelope iff it carries the inbox's token.
inline bool Submit(ShufflerInbox& inbox, const Envelope& e) {
  if (e.token != inbox.token) {
    ++inbox.rejected_count;
    return false;
  }
  inbox.accepted.push_back(e.payload);
  return true;
}

// Uniformly permutes the accepted payloads and releases them (tokens are
// already stripped). Leaves the inbox empty.
inline MessageSet Shuffle(ShufflerInbox& inbox, Rng& rng) {
  MessageSet out = std::move(inbox.accepted);
  inbox.accepted.clear();
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

// All shufflers of one run. Envelopes addressed outside the tree are
// rejected at the network level.
class ShuffleNetwork {
 public:
  ShuffleNetwork(const TreePlan& plan, const TokenTable& tokens) {
    inboxes_.resize(plan.levels.size());
    for (int r = 1; r <= plan.num_levels(); ++r) {
      auto& level = inboxes_[r - 1];
      level.resize(static_cast<std::size_t>(plan.level(r).num_groups));
      for (std::int64_t g = 1; g <= plan.level(r).num_groups; ++g)
        level[g - 1].token = tokens.token({r, g});
    }
  }

  bool Submit(const Envelope& e) {
    if (e.dest.level < 1 ||
        e.dest.level > static_cast<int>(inboxes_.size()) ||
        e.dest.group < 1 ||
        e.dest.group >
            static_cast<std::int64_t>(inboxes_[e.dest.level - 1].size())) {
      ++unroutable_;
      return false;
    }
    return shuffledp::Submit(inbox(e.dest), e);
  }

  ShufflerInbox& inbox(NodeId node) {
    return inboxes_.at(node.level - 1).at(node.group - 1);
  }
  const ShufflerInbox& inbox(NodeId node) const {
    return inboxes_.at(node.level - 1).at(node.group - 1);
  }

  std::int64_t rejected() const {
    std::int64_t total = unroutable_;
    for (const auto& level : inboxes_)
      for (const auto& box : level) total += box.rejected_count;
    return total;
  }

  // Runs every shuffler with its own stream derived from `seed`. Call only
  // after all submissions are in.
  NodeMessages ShuffleAll(std::uint64_t seed) {
    NodeMessages out(inboxes_.size());
    for (std::size_t r = 0; r < inboxes_.size(); ++r) {
      out[r].reserve(inboxes_[r].size());
      for (std::size_t g = 0; g < inboxes_[r].size(); ++g) {
        Rng rng(DeriveSeed(seed, {kShufflerStream, r + 1, g + 1}));
        out[r].push_back(Shuffle(inboxes_[r][g], rng));
      }
    }
    return out;
  }

 private:
  std::vector<std::vector<ShufflerInbox>> inboxes_;
  std::int64_t unroutable_ = 0;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_SHUFFLE_HPP_
