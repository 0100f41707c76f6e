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

#ifndef SHUFFLEDP_BASE_PROTOCOL_HPP_
#define SHUFFLEDP_BASE_PROTOCOL_HPP_

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "shuffledp/errors.hpp"
#include "shuffledp/noise.hpp"
#include "shuffledp/query.hpp"
#include "shuffledp/random.hpp"

namespace shuffledp {

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;
  double beta = 0.1;

  void Validate() const {
    if (!(epsilon > 0)) throw ParameterError("epsilon must be > 0");
    if (!(delta >= 0 && delta < 1))
      throw ParameterError("delta must lie in [0,1)");
    if (!(beta > 0 && beta < 1)) throw ParameterError("beta must lie in (0,1)");
  }
};

// Message alphabet of the base protocols.
struct CountToken {
  int sign = 1;  // +1 or -1
  friend bool operator==(const CountToken&, const CountToken&) = default;
};
struct SumShare {
  std::uint64_t residue = 0;  // in [0, q)
  friend bool operator==(const SumShare&, const SumShare&) = default;
};
// For RangeTree queries `bin` is the flattened dyadic node index.
struct HistToken {
  std::int64_t bin = 0;
  int sign = 1;
  friend bool operator==(const HistToken&, const HistToken&) = default;
};
using Message = std::variant<CountToken, SumShare, HistToken>;
using MessageSet = std::vector<Message>;

enum class BaseKind { kDlapCount, kSplitMixSum, kPerBinHist };

inline std::string ToString(BaseKind kind) {
  switch (kind) {
    case BaseKind::kDlapCount:
      return "dlap-count";
    case BaseKind::kSplitMixSum:
      return "splitmix-sum";
    case BaseKind::kPerBinHist:
      return "perbin-hist";
  }
  return "?";
}

inline int CeilLog2(std::uint64_t x) {
  return x <= 1 ? 0 : static_cast<int>(std::bit_width(x - 1));
}

// ---------------------------------------------------------------------------
// Per-query randomizers and analyzers. Every user adds NB(1/m, p) shares of
// "+" noise and of "-" noise, so a group of m honest users carries exactly
// DLap(p) noise in aggregate. Passing epsilon = +inf disables noise.

inline void CountRandomize(std::int64_t x, double epsilon,
                           std::int64_t group_size, Rng& rng,
                           MessageSet& out) {
  if (x != 0 && x != 1) throw DomainError("count input must be 0 or 1");
  if (group_size < 1) throw ParameterError("group size must be >= 1");
  const double p = NoiseBase(epsilon, 1.0);
  const double r = 1.0 / static_cast<double>(group_size);
  const std::int64_t plus = NbSample(r, p, rng);
  const std::int64_t minus = NbSample(r, p, rng);
  if (x == 1) out.emplace_back(CountToken{+1});
  for (std::int64_t i = 0; i < plus; ++i) out.emplace_back(CountToken{+1});
  for (std::int64_t i = 0; i < minus; ++i) out.emplace_back(CountToken{-1});
}

// Sums signs. Tokens with a sign other than +-1 are dropped and tallied.
inline std::int64_t CountAnalyze(std::span<const Message> messages,
                                 std::int64_t* rejected = nullptr) {
  std::int64_t total = 0;
  for (const Message& m : messages) {
    const auto* tok = std::get_if<CountToken>(&m);
    if (tok == nullptr)
      throw ProtocolError("count analyzer received a non-count message");
    if (tok->sign == 1 || tok->sign == -1) {
      total += tok->sign;
    } else if (rejected != nullptr) {
      ++*rejected;
    }
  }
  return total;
}

// Split-and-mix: `shares` residues, uniform mod q subject to summing to
// x + z (mod q) with z ~ NB(1/m, p) - NB(1/m, p), p = exp(-epsilon / U).
inline void SumRandomize(std::int64_t x, std::int64_t domain, double epsilon,
                         std::int64_t group_size, int shares,
                         std::uint64_t modulus, Rng& rng, MessageSet& out) {
  if (x < 0 || x > domain)
    throw DomainError("sum input " + std::to_string(x) + " outside [0, " +
                      std::to_string(domain) + "]");
  if (shares < 2) throw ParameterError("split-and-mix needs >= 2 shares");
  if (!std::has_single_bit(modulus))
    throw ParameterError("modulus must be a power of two");
  if (group_size < 1) throw ParameterError("group size must be >= 1");
  const double p = NoiseBase(epsilon, static_cast<double>(domain));
  const double r = 1.0 / static_cast<double>(group_size);
  const std::int64_t z = NbSample(r, p, rng) - NbSample(r, p, rng);
  const std::uint64_t mask = modulus - 1;
  // Unsigned wraparound is arithmetic mod 2^64, and q divides 2^64.
  const std::uint64_t target = static_cast<std::uint64_t>(x + z) & mask;
  std::uint64_t acc = 0;
  for (int i = 0; i + 1 < shares; ++i) {
    const std::uint64_t share = rng() & mask;
    acc += share;
    out.emplace_back(SumShare{share});
  }
  out.emplace_back(SumShare{(target - acc) & mask});
}

// Sum of residues mod q, recentered into (-q/2, q/2]. Residues >= q are
// dropped and tallied.
inline std::int64_t SumAnalyze(std::span<const Message> messages,
                               std::uint64_t modulus,
                               std::int64_t* rejected = nullptr) {
  if (!std::has_single_bit(modulus))
    throw ParameterError("modulus must be a power of two");
  const std::uint64_t mask = modulus - 1;
  std::uint64_t acc = 0;
  for (const Message& m : messages) {
    const auto* share = std::get_if<SumShare>(&m);
    if (share == nullptr)
      throw ProtocolError("sum analyzer received a non-sum message");
    if (share->residue > mask) {
      if (rejected != nullptr) ++*rejected;
      continue;
    }
    acc = (acc + share->residue) & mask;
  }
  if (acc > modulus / 2) return -static_cast<std::int64_t>(modulus - acc);
  return static_cast<std::int64_t>(acc);
}

namespace internal {

inline void AddBinNoise(std::int64_t bins, double p, double r, Rng& rng,
                        MessageSet& out) {
  if (p == 0) return;
  for (std::int64_t j = 0; j < bins; ++j) {
    const std::int64_t plus = NbSample(r, p, rng);
    const std::int64_t minus = NbSample(r, p, rng);
    for (std::int64_t i = 0; i < plus; ++i) out.emplace_back(HistToken{j, +1});
    for (std::int64_t i = 0; i < minus; ++i)
      out.emplace_back(HistToken{j, -1});
  }
}

}  // namespace internal

// Per-bin mechanism: the user's bin token plus independent NB(1/m, p)
// "+" and "-" tokens for every bin, p = exp(-epsilon).
inline void HistRandomize(std::int64_t x, std::int64_t domain, double epsilon,
                          std::int64_t group_size, Rng& rng, MessageSet& out) {
  if (x < 0 || x > domain)
    throw DomainError("histogram input " + std::to_string(x) +
                      " outside [0, " + std::to_string(domain) + "]");
  if (group_size < 1) throw ParameterError("group size must be >= 1");
  out.emplace_back(HistToken{x, +1});
  internal::AddBinNoise(domain + 1, NoiseBase(epsilon, 1.0),
                        1.0 / static_cast<double>(group_size), rng, out);
}

// Per-bin signed sums over `bins` bins. Tokens outside [0, bins) are
// dropped and tallied.
inline QueryValue BinAnalyze(std::span<const Message> messages,
                             std::size_t bins,
                             std::int64_t* rejected = nullptr) {
  QueryValue out(bins);
  for (const Message& m : messages) {
    const auto* tok = std::get_if<HistToken>(&m);
    if (tok == nullptr)
      throw ProtocolError("histogram analyzer received a non-histogram message");
    const bool valid_sign = tok->sign == 1 || tok->sign == -1;
    if (tok->bin < 0 || static_cast<std::size_t>(tok->bin) >= bins ||
        !valid_sign) {
      if (rejected != nullptr) ++*rejected;
      continue;
    }
    out[static_cast<std::size_t>(tok->bin)] += tok->sign;
  }
  return out;
}

inline QueryValue HistAnalyze(std::span<const Message> messages,
                              std::int64_t domain,
                              std::int64_t* rejected = nullptr) {
  return BinAnalyze(messages, static_cast<std::size_t>(domain) + 1, rejected);
}

// ---------------------------------------------------------------------------

// A concrete shuffle-DP protocol for one query: the randomizer/analyzer pair
// plus its Error/Msg/Bit descriptors.
class BaseProtocol {
 public:
  static constexpr int kDefaultShares = 3;

  // Picks the mechanism matching the query. For Sum, q is the smallest power
  // of two above 4 n U.
  static BaseProtocol For(const Query& query, std::int64_t n,
                          int shares = kDefaultShares) {
    switch (query.kind()) {
      case QueryKind::kCount:
        return BaseProtocol(query, BaseKind::kDlapCount, 0, 0);
      case QueryKind::kSum: {
        if (query.domain() < 1) throw ParameterError("sum needs U >= 1");
        const std::uint64_t bound = 4 * static_cast<std::uint64_t>(
                                            std::max<std::int64_t>(n, 1)) *
                                    static_cast<std::uint64_t>(query.domain());
        return BaseProtocol(query, BaseKind::kSplitMixSum,
                            std::bit_ceil(bound + 1), shares);
      }
      case QueryKind::kHistogram:
      case QueryKind::kRangeTree:
        return BaseProtocol(query, BaseKind::kPerBinHist, 0, 0);
    }
    throw ParameterError("unknown query kind");
  }

  BaseProtocol(Query query, BaseKind kind, std::uint64_t modulus, int shares)
      : query_(query), kind_(kind), modulus_(modulus), shares_(shares) {
    const bool ok =
        (kind == BaseKind::kDlapCount && query.kind() == QueryKind::kCount) ||
        (kind == BaseKind::kSplitMixSum && query.kind() == QueryKind::kSum) ||
        (kind == BaseKind::kPerBinHist &&
         (query.kind() == QueryKind::kHistogram ||
          query.kind() == QueryKind::kRangeTree));
    if (!ok)
      throw ParameterError("base protocol " + ToString(kind) +
                           " cannot answer a " + ToString(query.kind()) +
                           " query");
    if (kind == BaseKind::kSplitMixSum) {
      if (shares < 2) throw ParameterError("split-and-mix needs >= 2 shares");
      if (!std::has_single_bit(modulus))
        throw ParameterError("modulus must be a power of two");
    }
  }

  const Query& query() const { return query_; }
  BaseKind kind() const { return kind_; }
  std::uint64_t modulus() const { return modulus_; }
  int shares() const { return shares_; }

  // l1 sensitivity of one user's contribution under add/remove neighbors.
  std::int64_t sensitivity() const {
    switch (query_.kind()) {
      case QueryKind::kCount:
      case QueryKind::kHistogram:
        return 1;
      case QueryKind::kSum:
        return query_.domain();
      case QueryKind::kRangeTree:
        return query_.tree_levels();
    }
    return 1;
  }

  double NoiseBaseFor(double epsilon) const {
    return NoiseBase(epsilon, static_cast<double>(sensitivity()));
  }

  void Randomize(std::int64_t x, double epsilon, std::int64_t group_size,
                 Rng& rng, MessageSet& out) const {
    switch (query_.kind()) {
      case QueryKind::kCount:
        CountRandomize(x, epsilon, group_size, rng, out);
        return;
      case QueryKind::kSum:
        SumRandomize(x, query_.domain(), epsilon, group_size, shares_,
                     modulus_, rng, out);
        return;
      case QueryKind::kHistogram:
        HistRandomize(x, query_.domain(), epsilon, group_size, rng, out);
        return;
      case QueryKind::kRangeTree: {
        if (x < 0 || x > query_.domain())
          throw DomainError("range input " + std::to_string(x) +
                            " outside [0, " + std::to_string(query_.domain()) +
                            "]");
        if (group_size < 1) throw ParameterError("group size must be >= 1");
        for (int h = 0; h < query_.tree_levels(); ++h) {
          out.emplace_back(HistToken{
              static_cast<std::int64_t>(query_.level_offset(h) +
                                        (static_cast<std::size_t>(x) >> h)),
              +1});
        }
        internal::AddBinNoise(static_cast<std::int64_t>(query_.value_size()),
                              NoiseBaseFor(epsilon),
                              1.0 / static_cast<double>(group_size), rng, out);
        return;
      }
    }
  }

  QueryValue Analyze(std::span<const Message> messages,
                     std::int64_t* rejected = nullptr) const {
    switch (query_.kind()) {
      case QueryKind::kCount:
        return QueryValue::Scalar(CountAnalyze(messages, rejected));
      case QueryKind::kSum:
        return QueryValue::Scalar(SumAnalyze(messages, modulus_, rejected));
      case QueryKind::kHistogram:
      case QueryKind::kRangeTree:
        return BinAnalyze(messages, query_.value_size(), rejected);
    }
    return query_.Zero();
  }

  // Error_p(P, eps, delta, beta): the exact discrete Laplace tail quantile.
  // Histograms take a union bound over bins; a range tree adds up its
  // per-level histogram bounds.
  std::int64_t ErrorBound(const PrivacyBudget& budget) const {
    switch (query_.kind()) {
      case QueryKind::kCount:
      case QueryKind::kSum:
        return DlapThreshold(budget.epsilon, sensitivity(), budget.beta);
      case QueryKind::kHistogram:
        return DlapThreshold(budget.epsilon, 1,
                             budget.beta /
                                 static_cast<double>(query_.domain() + 1));
      case QueryKind::kRangeTree: {
        const int levels = query_.tree_levels();
        const double per_level_beta =
            budget.beta / (static_cast<double>(levels) *
                           static_cast<double>(query_.leaf_count()));
        return levels *
               DlapThreshold(budget.epsilon, levels, per_level_beta);
      }
    }
    return 0;
  }

  // Msg(P, eps, delta, m): expected messages per user in a group of m.
  double ExpectedMessages(double epsilon, std::int64_t group_size) const {
    if (kind_ == BaseKind::kSplitMixSum) return shares_;
    const double p = NoiseBaseFor(epsilon);
    const double per_counter =
        2 * p / (static_cast<double>(group_size) * (1 - p));
    switch (query_.kind()) {
      case QueryKind::kCount:
        return 1 + per_counter;
      case QueryKind::kHistogram:
        return 1 + static_cast<double>(query_.domain() + 1) * per_counter;
      case QueryKind::kRangeTree:
        return query_.tree_levels() +
               static_cast<double>(query_.value_size()) * per_counter;
      case QueryKind::kSum:
        break;
    }
    return shares_;
  }

  // Bit(P, ...): payload bits per message, excluding the shuffler token.
  int BitsPerMessage() const {
    switch (query_.kind()) {
      case QueryKind::kCount:
        return 2;
      case QueryKind::kSum:
        return CeilLog2(modulus_);
      case QueryKind::kHistogram:
      case QueryKind::kRangeTree:
        return CeilLog2(query_.value_size()) + 1;
    }
    return 0;
  }

 private:
  Query query_;
  BaseKind kind_;
  std::uint64_t modulus_;
  int shares_;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_BASE_PROTOCOL_HPP_
