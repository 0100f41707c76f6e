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

#ifndef SHUFFLEDP_QUERY_HPP_
#define SHUFFLEDP_QUERY_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shuffledp/errors.hpp"

namespace shuffledp {

enum class QueryKind { kCount, kSum, kHistogram, kRangeTree };
enum class NormKind { kL1, kLinf };

inline std::string ToString(QueryKind kind) {
  switch (kind) {
    case QueryKind::kCount:
      return "count";
    case QueryKind::kSum:
      return "sum";
    case QueryKind::kHistogram:
      return "hist";
    case QueryKind::kRangeTree:
      return "range";
  }
  return "?";
}

// The answer to a union-preserving query: a vector of signed counters.
// Count and Sum use one component, Histogram one per bin, and RangeTree one
// per dyadic node (see Query::level_offset). Estimates may be negative.
class QueryValue {
 public:
  QueryValue() = default;
  explicit QueryValue(std::size_t size) : components_(size, 0) {}
  explicit QueryValue(std::vector<std::int64_t> components)
      : components_(std::move(components)) {}

  static QueryValue Scalar(std::int64_t v) {
    return QueryValue(std::vector<std::int64_t>{v});
  }

  std::size_t size() const { return components_.size(); }
  std::int64_t operator[](std::size_t i) const { return components_[i]; }
  std::int64_t& operator[](std::size_t i) { return components_[i]; }
  std::span<const std::int64_t> components() const { return components_; }
  std::int64_t scalar() const { return components_.at(0); }

  QueryValue& operator+=(const QueryValue& other) {
    CheckSameShape(other);
    for (std::size_t i = 0; i < components_.size(); ++i)
      components_[i] += other.components_[i];
    return *this;
  }
  QueryValue& operator-=(const QueryValue& other) {
    CheckSameShape(other);
    for (std::size_t i = 0; i < components_.size(); ++i)
      components_[i] -= other.components_[i];
    return *this;
  }
  friend QueryValue operator+(QueryValue a, const QueryValue& b) {
    return a += b;
  }
  friend QueryValue operator-(QueryValue a, const QueryValue& b) {
    return a -= b;
  }
  friend bool operator==(const QueryValue&, const QueryValue&) = default;

 private:
  void CheckSameShape(const QueryValue& other) const {
    if (other.size() != size()) {
      throw ShapeError("query value shape mismatch: " +
                       std::to_string(size()) + " vs " +
                       std::to_string(other.size()));
    }
  }

  std::vector<std::int64_t> components_;
};

struct Dataset {
  std::vector<std::int64_t> values;

  std::size_t n() const { return values.size(); }
};

// Descriptor of a union-preserving query over inputs in {0..max_input()}.
class Query {
 public:
  static Query Count() { return Query(QueryKind::kCount, 1); }
  static Query Sum(std::int64_t domain) { return Query(QueryKind::kSum, domain); }
  static Query Histogram(std::int64_t domain) {
    return Query(QueryKind::kHistogram, domain);
  }
  static Query RangeTree(std::int64_t domain) {
    return Query(QueryKind::kRangeTree, domain);
  }
  static Query Of(QueryKind kind, std::int64_t domain) {
    return kind == QueryKind::kCount ? Count() : Query(kind, domain);
  }

  QueryKind kind() const { return kind_; }
  // U; inputs lie in {0..U}. Count fixes U = 1.
  std::int64_t domain() const { return domain_; }
  std::int64_t max_input() const { return domain_; }

  NormKind norm() const {
    return (kind_ == QueryKind::kCount || kind_ == QueryKind::kSum)
               ? NormKind::kL1
               : NormKind::kLinf;
  }

  // Number of components of a QueryValue for this query.
  std::size_t value_size() const {
    switch (kind_) {
      case QueryKind::kCount:
      case QueryKind::kSum:
        return 1;
      case QueryKind::kHistogram:
        return static_cast<std::size_t>(domain_) + 1;
      case QueryKind::kRangeTree:
        return 2 * leaf_count() - 1;
    }
    return 0;
  }

  // Dyadic layout of a RangeTree value: leaves padded to a power of two P,
  // tree level h in [0, tree_levels()) holds P >> h nodes starting at
  // level_offset(h). Level 0 is the leaf histogram.
  std::size_t leaf_count() const {
    return std::bit_ceil(static_cast<std::uint64_t>(domain_) + 1);
  }
  int tree_levels() const {
    return std::countr_zero(static_cast<std::uint64_t>(leaf_count())) + 1;
  }
  std::size_t level_offset(int h) const {
    std::size_t off = 0;
    for (int j = 0; j < h; ++j) off += leaf_count() >> j;
    return off;
  }
  std::size_t level_width(int h) const { return leaf_count() >> h; }

  QueryValue Zero() const { return QueryValue(value_size()); }

  // Exact answer for a single input x (assumed in domain).
  void Accumulate(std::int64_t x, QueryValue& into) const {
    switch (kind_) {
      case QueryKind::kCount:
      case QueryKind::kSum:
        into[0] += x;
        break;
      case QueryKind::kHistogram:
        into[static_cast<std::size_t>(x)] += 1;
        break;
      case QueryKind::kRangeTree:
        for (int h = 0; h < tree_levels(); ++h)
          into[level_offset(h) + (static_cast<std::size_t>(x) >> h)] += 1;
        break;
    }
  }

  // ||v||_p under this query's norm.
  double Norm(const QueryValue& v) const {
    CheckShape(v);
    double acc = 0;
    for (std::int64_t c : v.components()) {
      const double a = std::abs(static_cast<double>(c));
      acc = norm() == NormKind::kL1 ? acc + a : std::max(acc, a);
    }
    return acc;
  }

  void CheckShape(const QueryValue& v) const {
    if (v.size() != value_size()) {
      throw ShapeError(ToString(kind_) + " query expects " +
                       std::to_string(value_size()) +
                       " components, got " + std::to_string(v.size()));
    }
  }

  friend bool operator==(const Query&, const Query&) = default;

 private:
  Query(QueryKind kind, std::int64_t domain) : kind_(kind), domain_(domain) {
    if (domain < 0) throw ParameterError("query domain must be >= 0");
    if (kind == QueryKind::kCount && domain != 1)
      throw ParameterError("count query has domain {0,1}");
  }

  QueryKind kind_;
  std::int64_t domain_;
};

inline void CheckInDomain(const Query& q, std::span<const std::int64_t> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0 || values[i] > q.max_input()) {
      throw DomainError("value " + std::to_string(values[i]) + " at index " +
                        std::to_string(i) + " outside [0, " +
                        std::to_string(q.max_input()) + "]");
    }
  }
}

inline QueryValue EvalQuery(const Query& q, const Dataset& d) {
  CheckInDomain(q, d.values);
  QueryValue out = q.Zero();
  for (std::int64_t x : d.values) q.Accumulate(x, out);
  return out;
}

// Diameter of Range(q, n) under the query's norm.
inline double RangeDiameter(const Query& q, std::int64_t n) {
  if (n < 0) throw ParameterError("n must be >= 0");
  switch (q.kind()) {
    case QueryKind::kCount:
      return static_cast<double>(n);
    case QueryKind::kSum:
      return static_cast<double>(n) * static_cast<double>(q.domain());
    case QueryKind::kHistogram:
    case QueryKind::kRangeTree:
      // Two datasets with all users in different bins differ by n in one bin;
      // no pair of bin vectors with equal total can differ by more.
      return static_cast<double>(n);
  }
  return 0;
}

namespace internal {

// Smallest t >= 0 such that some y in Z_{>=0}^k with sum(y) = n satisfies
// |y_j - v_j| <= t for all j. Feasible iff v_j + t >= 0 for all j and
// sum max(0, v_j - t) <= n <= sum (v_j + t); monotone in t.
inline std::int64_t HistogramDistance(std::span<const std::int64_t> v,
                                      std::int64_t n) {
  auto feasible = [&](std::int64_t t) {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    for (std::int64_t vj : v) {
      if (vj + t < 0) return false;
      if (vj > t) {
        lo += vj - t;
        if (lo > n) return false;
      }
      if (hi < n) hi += vj + t;
    }
    return hi >= n;
  };
  std::int64_t top = n;
  for (std::int64_t vj : v) top = std::max(top, std::abs(vj) + n);
  std::int64_t lo = 0;
  while (lo < top) {
    const std::int64_t mid = lo + (top - lo) / 2;
    if (feasible(mid)) {
      top = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace internal

// min over y in Range(q, n) of ||v - y||_p. RangeTree levels are each treated
// as an independent histogram; the result is the largest level distance.
inline double DisToRange(const Query& q, std::int64_t n, const QueryValue& v) {
  q.CheckShape(v);
  if (n < 0) throw ParameterError("n must be >= 0");
  switch (q.kind()) {
    case QueryKind::kCount:
    case QueryKind::kSum: {
      const double x = static_cast<double>(v.scalar());
      const double top = static_cast<double>(n) * static_cast<double>(q.domain());
      return std::max({0.0, -x, x - top});
    }
    case QueryKind::kHistogram:
      return static_cast<double>(internal::HistogramDistance(v.components(), n));
    case QueryKind::kRangeTree: {
      std::int64_t worst = 0;
      for (int h = 0; h < q.tree_levels(); ++h) {
        worst = std::max(worst, internal::HistogramDistance(
                                    v.components().subspan(q.level_offset(h),
                                                           q.level_width(h)),
                                    n));
      }
      return static_cast<double>(worst);
    }
  }
  return 0;
}

// Answers a range count [lo, hi] from a RangeTree value by summing the
// canonical dyadic cover of the interval.
inline std::int64_t RangeCount(const Query& q, const QueryValue& v,
                               std::int64_t lo, std::int64_t hi) {
  if (q.kind() != QueryKind::kRangeTree)
    throw ParameterError("RangeCount needs a range-tree query");
  q.CheckShape(v);
  lo = std::max<std::int64_t>(lo, 0);
  hi = std::min<std::int64_t>(hi, q.domain());
  std::int64_t total = 0;
  std::uint64_t a = static_cast<std::uint64_t>(lo);
  std::uint64_t b = static_cast<std::uint64_t>(hi) + 1;  // half-open
  int h = 0;
  while (a < b) {
    if (a & 1) total += v[q.level_offset(h) + a++];
    if (b & 1) total += v[q.level_offset(h) + --b];
    a >>= 1;
    b >>= 1;
    ++h;
  }
  return total;
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_QUERY_HPP_
