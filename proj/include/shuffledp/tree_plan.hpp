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

#ifndef SHUFFLEDP_TREE_PLAN_HPP_
#define SHUFFLEDP_TREE_PLAN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "shuffledp/errors.hpp"

namespace shuffledp {

enum class Variant { kBase, kSusdp, kBsdp, kHsdp, kOhsdp };

inline std::string ToString(Variant v) {
  switch (v) {
    case Variant::kBase:
      return "base";
    case Variant::kSusdp:
      return "susdp";
    case Variant::kBsdp:
      return "bsdp";
    case Variant::kHsdp:
      return "hsdp";
    case Variant::kOhsdp:
      return "ohsdp";
  }
  return "?";
}

// A tree node: level r in [1, L], group g in [1, groups at r].
struct NodeId {
  int level = 1;
  std::int64_t group = 1;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

// Budget and threshold for one level of the defense tree.
struct LevelPlan {
  int r = 1;
  std::int64_t group_size = 1;  // m^(r)
  std::int64_t num_groups = 1;
  // Children per group at level r - 1; 0 at the bottom level.
  std::int64_t fanout = 0;
  double epsilon = 0;
  double delta = 0;
  double beta = 0;
  std::int64_t theta = 0;
  // Detection bound: theta at the bottom (distance to Range(Q, m^(1))),
  // fanout * theta^(r-1) + theta^(r) for the consistency check above it.
  double check_bound = 0;
};

struct TreePlan {
  Variant variant = Variant::kBase;
  std::int64_t n = 0;
  std::int64_t lambda = 1;
  std::int64_t k_hat = 0;
  // False for the undefended base protocol.
  bool detection = true;
  std::vector<LevelPlan> levels;

  int num_levels() const { return static_cast<int>(levels.size()); }
  const LevelPlan& level(int r) const { return levels.at(r - 1); }
  const LevelPlan& top() const { return levels.back(); }

  // Group of 1-based user i at level r: ceil(i / m^(r)).
  std::int64_t GroupOf(std::int64_t user, int r) const {
    if (user < 1 || user > n)
      throw ParameterError("user id " + std::to_string(user) +
                           " outside [1, " + std::to_string(n) + "]");
    const std::int64_t m = level(r).group_size;
    return (user + m - 1) / m;
  }

  std::int64_t num_shufflers() const {
    std::int64_t total = 0;
    for (const LevelPlan& lp : levels) total += lp.num_groups;
    return total;
  }

  bool Contains(NodeId node) const {
    return node.level >= 1 && node.level <= num_levels() && node.group >= 1 &&
           node.group <= level(node.level).num_groups;
  }

  // Users of node (r, g) are ((g-1) m + 1) .. g m.
  bool NodeContainsUser(NodeId node, std::int64_t user) const {
    return GroupOf(user, node.level) == node.group;
  }
};

// ceil(i / (lambda 2^(r-1))): the hierarchical grouping rule.
inline std::int64_t GroupOf(std::int64_t user, int r, std::int64_t lambda) {
  if (user < 1 || r < 1 || lambda < 1)
    throw ParameterError("GroupOf needs user >= 1, r >= 1, lambda >= 1");
  const std::int64_t size = lambda << (r - 1);
  return (user + size - 1) / size;
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_TREE_PLAN_HPP_
