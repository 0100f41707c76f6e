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

#ifndef SHUFFLEDP_ADVERSARY_HPP_
#define SHUFFLEDP_ADVERSARY_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "shuffledp/base_protocol.hpp"
#include "shuffledp/errors.hpp"
#include "shuffledp/random.hpp"
#include "shuffledp/shuffle.hpp"
#include "shuffledp/tree_plan.hpp"

namespace shuffledp {

// Extra count tokens of one sign at every level.
struct FloodCount {
  std::int64_t msgs_per_level = 0;
  int sign = +1;
};

// Extra shares carrying `value` at every level.
struct FloodSum {
  std::int64_t msgs_per_level = 0;
  std::int64_t value = 0;
};

// Extra +1 tokens for every bin at every level.
struct FloodHist {
  std::int64_t msgs_per_bin = 0;
};

// Honest data messages without the noise share.
struct DropNoise {};

// Runs the honest randomizer on a forged in-domain input.
struct AlterInput {
  std::int64_t forged = 0;
};

// Sends to a shuffler outside the attacker's path with a guessed token.
struct Impersonate {
  NodeId victim;
  std::int64_t msgs = 1;
};

using AttackStrategy = std::variant<FloodCount, FloodSum, FloodHist, DropNoise,
                                    AlterInput, Impersonate>;

inline std::string AttackName(const AttackStrategy& s) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, FloodCount>) return "flood";
        if constexpr (std::is_same_v<T, FloodSum>) return "flood";
        if constexpr (std::is_same_v<T, FloodHist>) return "flood";
        if constexpr (std::is_same_v<T, DropNoise>) return "drop-noise";
        if constexpr (std::is_same_v<T, AlterInput>) return "alter-input";
        return "impersonate";
      },
      s);
}

// Sorted 1-based ids of the corrupted users.
struct CorruptionSet {
  std::vector<std::int64_t> ids;

  std::size_t k() const { return ids.size(); }
  bool contains(std::int64_t user) const {
    return std::binary_search(ids.begin(), ids.end(), user);
  }
};

// Picks k of the n users uniformly at random.
inline CorruptionSet CorruptUsers(std::int64_t n, std::int64_t k, Rng& rng) {
  if (k < 0) throw ParameterError("k must be >= 0");
  if (k > n)
    throw ParameterError("cannot corrupt " + std::to_string(k) + " of " +
                         std::to_string(n) + " users");
  std::vector<std::int64_t> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), std::int64_t{1});
  CorruptionSet out;
  out.ids.reserve(static_cast<std::size_t>(k));
  std::sample(all.begin(), all.end(), std::back_inserter(out.ids),
              static_cast<std::size_t>(k), rng);
  std::sort(out.ids.begin(), out.ids.end());
  return out;
}

namespace internal {

inline void RequireQuery(const BaseProtocol& base, bool ok,
                         const char* attack) {
  if (!ok)
    throw ParameterError(std::string(attack) + " does not apply to a " +
                         ToString(base.query().kind()) + " query");
}

// A payload that pushes the estimate up by one unit of input.
inline Message PushPayload(const BaseProtocol& base) {
  switch (base.query().kind()) {
    case QueryKind::kCount:
      return CountToken{+1};
    case QueryKind::kSum:
      return SumShare{static_cast<std::uint64_t>(base.query().domain()) &
                      (base.modulus() - 1)};
    case QueryKind::kHistogram:
    case QueryKind::kRangeTree:
      return HistToken{0, +1};
  }
  return CountToken{+1};
}

}  // namespace internal

// Everything corrupted user `user` (true input x) sends. Only the tokens in
// `known` are used, except for the guessed token of an impersonation.
inline std::vector<Envelope> MaliciousEnvelopes(
    const AttackStrategy& strategy, std::int64_t user, std::int64_t x,
    const TreePlan& plan, const BaseProtocol& base,
    const std::vector<ShufflerToken>& known, Rng& rng) {
  std::vector<Envelope> out;
  auto honest = [&](std::int64_t input, bool noiseless) {
    MessageSet buffer;
    for (const ShufflerToken& t : known) {
      const LevelPlan& lp = plan.level(t.level);
      buffer.clear();
      base.Randomize(input,
                     noiseless ? std::numeric_limits<double>::infinity()
                               : lp.epsilon,
                     lp.group_size, rng, buffer);
      for (Message& m : buffer)
        out.push_back({{t.level, t.group}, t.id, std::move(m)});
    }
  };
  auto flood = [&](std::int64_t count, const Message& payload) {
    if (count < 0) throw ParameterError("attack message count must be >= 0");
    for (const ShufflerToken& t : known)
      for (std::int64_t i = 0; i < count; ++i)
        out.push_back({{t.level, t.group}, t.id, payload});
  };

  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, FloodCount>) {
          internal::RequireQuery(base, base.query().kind() == QueryKind::kCount,
                                 "count flooding");
          if (a.sign != 1 && a.sign != -1)
            throw ParameterError("flood sign must be +1 or -1");
          flood(a.msgs_per_level, CountToken{a.sign});
        } else if constexpr (std::is_same_v<T, FloodSum>) {
          internal::RequireQuery(base, base.query().kind() == QueryKind::kSum,
                                 "sum flooding");
          const auto residue =
              static_cast<std::uint64_t>(a.value) & (base.modulus() - 1);
          flood(a.msgs_per_level, SumShare{residue});
        } else if constexpr (std::is_same_v<T, FloodHist>) {
          const QueryKind kind = base.query().kind();
          internal::RequireQuery(
              base,
              kind == QueryKind::kHistogram || kind == QueryKind::kRangeTree,
              "histogram flooding");
          const auto bins =
              static_cast<std::int64_t>(base.query().value_size());
          for (std::int64_t j = 0; j < bins; ++j)
            flood(a.msgs_per_bin, HistToken{j, +1});
        } else if constexpr (std::is_same_v<T, DropNoise>) {
          honest(x, true);
        } else if constexpr (std::is_same_v<T, AlterInput>) {
          honest(a.forged, false);
        } else {
          if (a.msgs < 0)
            throw ParameterError("attack message count must be >= 0");
          honest(x, false);
          const TokenId guess = rng();
          const Message payload = internal::PushPayload(base);
          for (std::int64_t i = 0; i < a.msgs; ++i)
            out.push_back({a.victim, guess, payload});
        }
      },
      strategy);
  return out;
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_ADVERSARY_HPP_
