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

#ifndef SHUFFLEDP_DEFENSE_HPP_
#define SHUFFLEDP_DEFENSE_HPP_

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "shuffledp/base_protocol.hpp"
#include "shuffledp/errors.hpp"
#include "shuffledp/query.hpp"
#include "shuffledp/random.hpp"
#include "shuffledp/shuffle.hpp"
#include "shuffledp/tree_plan.hpp"

namespace shuffledp {

namespace internal {

inline void CheckUsers(std::int64_t n) {
  if (n < 1) throw ParameterError("need at least one user");
}

inline void SetLevel(LevelPlan& lp, const PrivacyBudget& total,
                     double eps_share, double beta) {
  lp.epsilon = total.epsilon * eps_share;
  lp.delta = total.delta * eps_share;
  lp.beta = beta;
}

// Fills theta^(r) from the base protocol and derives the detection bounds.
inline void FinishPlan(TreePlan& plan, const BaseProtocol& base) {
  for (std::size_t i = 0; i < plan.levels.size(); ++i) {
    LevelPlan& lp = plan.levels[i];
    lp.r = static_cast<int>(i) + 1;
    lp.theta = base.ErrorBound({lp.epsilon, lp.delta, lp.beta});
    if (i == 0) {
      lp.fanout = 0;
      lp.check_bound = static_cast<double>(lp.theta);
    } else {
      const LevelPlan& below = plan.levels[i - 1];
      lp.fanout = below.num_groups / lp.num_groups;
      lp.check_bound = static_cast<double>(lp.fanout) *
                           static_cast<double>(below.theta) +
                       static_cast<double>(lp.theta);
    }
  }
}

inline std::int64_t ExactLog2(std::int64_t x) {
  return std::countr_zero(static_cast<std::uint64_t>(x));
}

inline bool IsPowerOfTwo(std::int64_t x) {
  return x > 0 && std::has_single_bit(static_cast<std::uint64_t>(x));
}

}  // namespace internal

// The undefended base protocol: all n users in one shuffler, no detection.
inline TreePlan PlanBase(const BaseProtocol& base, std::int64_t n,
                         const PrivacyBudget& budget) {
  internal::CheckUsers(n);
  budget.Validate();
  TreePlan plan;
  plan.variant = Variant::kBase;
  plan.n = n;
  plan.lambda = n;
  plan.detection = false;
  LevelPlan lp;
  lp.group_size = n;
  lp.num_groups = 1;
  internal::SetLevel(lp, budget, 1.0, budget.beta);
  plan.levels.push_back(lp);
  internal::FinishPlan(plan, base);
  return plan;
}

// Single-user shuffle-DP: every user has a private shuffler, full budget,
// and a beta/n threshold.
inline TreePlan PlanSusdp(const BaseProtocol& base, std::int64_t n,
                          const PrivacyBudget& budget) {
  internal::CheckUsers(n);
  budget.Validate();
  TreePlan plan;
  plan.variant = Variant::kSusdp;
  plan.n = n;
  plan.lambda = 1;
  plan.k_hat = 1;
  LevelPlan lp;
  lp.group_size = 1;
  lp.num_groups = n;
  internal::SetLevel(lp, budget, 1.0, budget.beta / static_cast<double>(n));
  plan.levels.push_back(lp);
  internal::FinishPlan(plan, base);
  return plan;
}

// Block shuffle-DP: user, block (sqrt n) and output levels at eps/3 each,
// rescaled by (c - 1)/c for the dropout of one attacker.
inline TreePlan PlanBsdp(const BaseProtocol& base, std::int64_t n,
                         const PrivacyBudget& budget) {
  internal::CheckUsers(n);
  budget.Validate();
  const auto root = static_cast<std::int64_t>(std::llround(std::sqrt(n)));
  if (root * root != n)
    throw ParameterError("BSDP needs a perfect-square n, got " +
                         std::to_string(n));
  if (n < 4) throw ParameterError("BSDP needs n >= 4");
  const double s = static_cast<double>(root);
  const double nn = static_cast<double>(n);
  const double lower_beta = budget.beta / (2 * (s + nn));
  TreePlan plan;
  plan.variant = Variant::kBsdp;
  plan.n = n;
  plan.lambda = 1;
  plan.k_hat = 1;
  plan.levels.resize(3);
  plan.levels[0].group_size = 1;
  plan.levels[0].num_groups = n;
  internal::SetLevel(plan.levels[0], budget, 1.0 / 3, lower_beta);
  plan.levels[1].group_size = root;
  plan.levels[1].num_groups = root;
  internal::SetLevel(plan.levels[1], budget, (1.0 / 3) * (s - 1) / s,
                     lower_beta);
  plan.levels[2].group_size = n;
  plan.levels[2].num_groups = 1;
  internal::SetLevel(plan.levels[2], budget, (1.0 / 3) * (nn - 1) / nn,
                     budget.beta / 2);
  internal::FinishPlan(plan, base);
  return plan;
}

// Hierarchical shuffle-DP: a binary tree of log n + 1 levels. Half of the
// budget goes to the top level, the rest is split over the lower levels.
inline TreePlan PlanHsdp(const BaseProtocol& base, std::int64_t n,
                         const PrivacyBudget& budget) {
  internal::CheckUsers(n);
  budget.Validate();
  if (!internal::IsPowerOfTwo(n))
    throw ParameterError("HSDP needs n to be a power of two, got " +
                         std::to_string(n));
  TreePlan plan;
  plan.variant = Variant::kHsdp;
  plan.n = n;
  plan.lambda = 1;
  plan.k_hat = 1;
  const std::int64_t log_n = internal::ExactLog2(n);
  if (log_n == 0) {
    LevelPlan lp;
    internal::SetLevel(lp, budget, 1.0, budget.beta);
    plan.levels.push_back(lp);
    internal::FinishPlan(plan, base);
    return plan;
  }
  const double lower_eps = 1.0 / (2.0 * static_cast<double>(log_n));
  const double lower_beta =
      budget.beta / (2.0 * (2.0 * static_cast<double>(n) - 2.0));
  for (std::int64_t r = 1; r <= log_n + 1; ++r) {
    LevelPlan lp;
    lp.group_size = std::int64_t{1} << (r - 1);
    lp.num_groups = n / lp.group_size;
    if (r == log_n + 1) {
      const double nn = static_cast<double>(n);
      internal::SetLevel(lp, budget, 0.5 * (nn - 1) / nn, budget.beta / 2);
    } else {
      const double c = static_cast<double>(lp.group_size);
      const double factor = r == 1 ? 1.0 : (c - 1) / c;
      internal::SetLevel(lp, budget, lower_eps * factor, lower_beta);
    }
    plan.levels.push_back(lp);
  }
  internal::FinishPlan(plan, base);
  return plan;
}

// Optimized HSDP: bottom groups of lambda users and L = log(n/lambda) + 1
// levels. With k_hat >= 2 every level of group size c is rescaled by
// (c - k_hat)/c; otherwise the single-attacker factors of HSDP apply.
inline TreePlan PlanOhsdp(const BaseProtocol& base, std::int64_t n,
                          const PrivacyBudget& budget, std::int64_t lambda,
                          std::int64_t k_hat) {
  internal::CheckUsers(n);
  budget.Validate();
  if (k_hat < 0) throw ParameterError("k_hat must be >= 0");
  if (lambda < 1 || lambda <= 2 * k_hat)
    throw ParameterError("OHSDP needs lambda > 2 k_hat (lambda=" +
                         std::to_string(lambda) +
                         ", k_hat=" + std::to_string(k_hat) + ")");
  if (n % lambda != 0 || !internal::IsPowerOfTwo(n / lambda))
    throw ParameterError("OHSDP needs n / lambda to be a power of two (n=" +
                         std::to_string(n) +
                         ", lambda=" + std::to_string(lambda) + ")");
  const std::int64_t top_groups = n / lambda;
  const int num_levels = static_cast<int>(internal::ExactLog2(top_groups)) + 1;
  const double nn = static_cast<double>(n);
  const double kh = static_cast<double>(k_hat);

  TreePlan plan;
  plan.variant = Variant::kOhsdp;
  plan.n = n;
  plan.lambda = lambda;
  plan.k_hat = k_hat;

  if (num_levels == 1) {
    LevelPlan lp;
    lp.group_size = n;
    lp.num_groups = 1;
    internal::SetLevel(lp, budget, (nn - kh) / nn, budget.beta);
    plan.levels.push_back(lp);
    internal::FinishPlan(plan, base);
    return plan;
  }

  const double big_l = static_cast<double>(num_levels);
  const double lower_beta = budget.beta / (2.0 * (2.0 * top_groups - 2.0));
  for (int r = 1; r <= num_levels; ++r) {
    LevelPlan lp;
    lp.group_size = lambda << (r - 1);
    lp.num_groups = n / lp.group_size;
    const double c = static_cast<double>(lp.group_size);
    const double pow2 = static_cast<double>(std::int64_t{1} << (r - 1));
    double factor;
    if (k_hat >= 2) {
      factor = (c - kh) / c;
    } else if (r == 1) {
      factor = 1.0;
    } else if (r == num_levels) {
      factor = (nn - 1) / nn;
    } else {
      factor = (pow2 - 1) / pow2;
    }
    if (r == num_levels) {
      internal::SetLevel(lp, budget, 0.5 * factor, budget.beta / 2);
    } else {
      internal::SetLevel(lp, budget, factor / (2.0 * big_l), lower_beta);
    }
    plan.levels.push_back(lp);
  }
  internal::FinishPlan(plan, base);
  return plan;
}

// Runs the base randomizer once per level with that level's budget and group
// size, addressing each output to the user's shuffler at that level.
inline std::vector<Envelope> RandomizeUser(std::int64_t user, std::int64_t x,
                                           const TreePlan& plan,
                                           const BaseProtocol& base,
                                           const TokenTable& tokens, Rng& rng) {
  std::vector<Envelope> out;
  MessageSet buffer;
  for (int r = 1; r <= plan.num_levels(); ++r) {
    const LevelPlan& lp = plan.level(r);
    buffer.clear();
    base.Randomize(x, lp.epsilon, lp.group_size, rng, buffer);
    const NodeId dest{r, plan.GroupOf(user, r)};
    const TokenId token = tokens.token(dest);
    for (Message& m : buffer) out.push_back({dest, token, std::move(m)});
  }
  return out;
}

struct DetectionReport {
  std::vector<NodeId> flagged;
  std::vector<NodeId> recovered;
  bool attack_detected = false;
};

struct AnalysisResult {
  QueryValue output;
  DetectionReport report;
  // Post-recovery estimate of every node, [level - 1][group - 1].
  std::vector<std::vector<QueryValue>> cells;
  // Messages dropped by the base analyzers' domain filter.
  std::int64_t rejected_messages = 0;
};

// Estimates every node with the base analyzer, detects inconsistent nodes
// bottom-up, then recovers flagged nodes bottom-up (bottom -> zero, upper ->
// sum of children). Returns the recovered top-level estimate.
inline AnalysisResult Analyze(const TreePlan& plan, const BaseProtocol& base,
                              const NodeMessages& shuffled) {
  const Query& q = base.query();
  if (static_cast<int>(shuffled.size()) != plan.num_levels())
    throw StructuralError("expected " + std::to_string(plan.num_levels()) +
                          " levels of shuffled messages, got " +
                          std::to_string(shuffled.size()));
  AnalysisResult result;
  std::vector<std::vector<std::optional<QueryValue>>> cells(
      plan.levels.size());

  for (int r = 1; r <= plan.num_levels(); ++r) {
    const LevelPlan& lp = plan.level(r);
    const auto& level_msgs = shuffled[r - 1];
    if (static_cast<std::int64_t>(level_msgs.size()) != lp.num_groups)
      throw StructuralError("level " + std::to_string(r) + " expects " +
                            std::to_string(lp.num_groups) +
                            " node multisets, got " +
                            std::to_string(level_msgs.size()));
    auto& level_cells = cells[r - 1];
    level_cells.reserve(static_cast<std::size_t>(lp.num_groups));
    for (std::int64_t g = 1; g <= lp.num_groups; ++g) {
      QueryValue estimate =
          base.Analyze(level_msgs[g - 1], &result.rejected_messages);
      bool invalid = false;
      if (plan.detection) {
        if (r == 1) {
          invalid = DisToRange(q, lp.group_size, estimate) > lp.check_bound;
        } else {
          QueryValue child_sum = q.Zero();
          for (std::int64_t c = (g - 1) * lp.fanout + 1; c <= g * lp.fanout;
               ++c) {
            const auto& child = cells[r - 2][c - 1];
            if (!child.has_value()) {
              invalid = true;
              break;
            }
            child_sum += *child;
          }
          if (!invalid)
            invalid = q.Norm(estimate - child_sum) > lp.check_bound;
        }
      }
      if (invalid) {
        result.report.flagged.push_back({r, g});
        level_cells.emplace_back(std::nullopt);
      } else {
        level_cells.emplace_back(std::move(estimate));
      }
    }
  }

  result.cells.resize(plan.levels.size());
  for (int r = 1; r <= plan.num_levels(); ++r) {
    const LevelPlan& lp = plan.level(r);
    auto& out = result.cells[r - 1];
    out.reserve(static_cast<std::size_t>(lp.num_groups));
    for (std::int64_t g = 1; g <= lp.num_groups; ++g) {
      auto& cell = cells[r - 1][g - 1];
      if (cell.has_value()) {
        out.push_back(std::move(*cell));
        continue;
      }
      QueryValue recovered = q.Zero();
      if (r > 1) {
        for (std::int64_t c = (g - 1) * lp.fanout + 1; c <= g * lp.fanout; ++c)
          recovered += result.cells[r - 2][c - 1];
      }
      out.push_back(std::move(recovered));
      result.report.recovered.push_back({r, g});
    }
  }

  result.output = q.Zero();
  for (const QueryValue& v : result.cells.back()) result.output += v;
  result.report.attack_detected = !result.report.flagged.empty();
  return result;
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_DEFENSE_HPP_
