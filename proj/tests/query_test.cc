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
#include <set>
#include <string>
#include <vector>

#include "shuffledp/query.hpp"
#include "test_util.hpp"

namespace shuffledp {
namespace {

using testing::RandomDataset;
using testing::UniformInt;

// Every query output reachable by some dataset of size n, by enumerating all
// (U+1)^n input sequences.
std::set<std::vector<std::int64_t>> EnumerateRange(const Query& q,
                                                   std::int64_t n) {
  std::set<std::vector<std::int64_t>> out;
  const std::int64_t base = q.max_input() + 1;
  std::int64_t total = 1;
  for (std::int64_t i = 0; i < n; ++i) total *= base;
  for (std::int64_t code = 0; code < total; ++code) {
    std::vector<std::int64_t> y(q.value_size(), 0);
    std::int64_t c = code;
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int64_t x = c % base;
      c /= base;
      if (q.kind() == QueryKind::kHistogram)
        y[static_cast<std::size_t>(x)] += 1;
      else
        y[0] += x;
    }
    out.insert(y);
  }
  return out;
}

double OracleNorm(const Query& q, const std::vector<std::int64_t>& a,
                  const std::vector<std::int64_t>& b) {
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(static_cast<double>(a[i] - b[i]));
    acc = q.kind() == QueryKind::kHistogram ? std::max(acc, d) : acc + d;
  }
  return acc;
}

TEST(EvalQueryTest, CountsOnes) {
  EXPECT_EQ(EvalQuery(Query::Count(), {{1, 0, 1}}).scalar(), 2);
}

TEST(EvalQueryTest, EmptySumIsZero) {
  EXPECT_EQ(EvalQuery(Query::Sum(10), {}).scalar(), 0);
}

TEST(EvalQueryTest, HistogramTallies) {
  const QueryValue v = EvalQuery(Query::Histogram(3), {{0, 3, 3}});
  EXPECT_EQ(v, QueryValue(std::vector<std::int64_t>{1, 0, 0, 2}));
}

TEST(EvalQueryTest, OutOfDomainNamesIndex) {
  try {
    EvalQuery(Query::Sum(4), {{1, 7, 2}});
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("index 1"), std::string::npos);
  }
  EXPECT_THROW(EvalQuery(Query::Count(), {{0, 2}}), DomainError);
  EXPECT_THROW(EvalQuery(Query::Histogram(2), {{-1}}), DomainError);
}

TEST(EvalQueryTest, UnionPreservingOnRandomSplits) {
  Rng rng(11);
  for (int iter = 0; iter < 1000; ++iter) {
    const Query q = testing::RandomQuery(rng, 20);
    const Dataset d = RandomDataset(rng, UniformInt(rng, 0, 40), q.max_input());
    Dataset left, right;
    for (std::int64_t x : d.values)
      (UniformInt(rng, 0, 1) ? left : right).values.push_back(x);
    EXPECT_EQ(EvalQuery(q, d), EvalQuery(q, left) + EvalQuery(q, right));
  }
}

TEST(RangeDiameterTest, Examples) {
  EXPECT_EQ(RangeDiameter(Query::Count(), 7), 7);
  EXPECT_EQ(RangeDiameter(Query::Sum(5), 3), 15);
  EXPECT_EQ(RangeDiameter(Query::Histogram(4), 6), 6);
}

TEST(RangeDiameterTest, MatchesBruteForce) {
  for (std::int64_t n = 0; n <= 4; ++n) {
    for (std::int64_t u = 1; u <= 3; ++u) {
      for (const Query& q : {Query::Count(), Query::Sum(u), Query::Histogram(u)}) {
        const auto range = EnumerateRange(q, n);
        double best = 0;
        for (const auto& a : range)
          for (const auto& b : range) best = std::max(best, OracleNorm(q, a, b));
        EXPECT_EQ(RangeDiameter(q, n), best)
            << ToString(q.kind()) << " n=" << n << " U=" << u;
      }
    }
  }
}

TEST(DisToRangeTest, Examples) {
  EXPECT_EQ(DisToRange(Query::Count(), 4, QueryValue::Scalar(5)), 1);
  EXPECT_EQ(DisToRange(Query::Count(), 4, QueryValue::Scalar(2)), 0);
  EXPECT_EQ(DisToRange(Query::Histogram(2), 2,
                       QueryValue(std::vector<std::int64_t>{5, 0, 0})),
            3);
}

TEST(DisToRangeTest, ShapeMismatchThrows) {
  EXPECT_THROW(DisToRange(Query::Histogram(2), 2, QueryValue::Scalar(1)),
               ShapeError);
  EXPECT_THROW(QueryValue::Scalar(1) + QueryValue(2), ShapeError);
}

TEST(DisToRangeTest, MatchesBruteForceOnSmallInstances) {
  Rng rng(5);
  for (std::int64_t n = 0; n <= 4; ++n) {
    for (std::int64_t u = 1; u <= 3; ++u) {
      for (const Query& q : {Query::Count(), Query::Sum(u), Query::Histogram(u)}) {
        const auto range = EnumerateRange(q, n);
        for (int iter = 0; iter < 60; ++iter) {
          std::vector<std::int64_t> v(q.value_size());
          for (auto& c : v) c = UniformInt(rng, -4, 3 * u + 6);
          double best = 1e18;
          for (const auto& y : range) best = std::min(best, OracleNorm(q, v, y));
          EXPECT_EQ(DisToRange(q, n, QueryValue(v)), best)
              << ToString(q.kind()) << " n=" << n << " U=" << u;
        }
      }
    }
  }
}

TEST(DisToRangeTest, ZeroOnTrueAnswers) {
  Rng rng(7);
  for (int iter = 0; iter < 300; ++iter) {
    const Query q = testing::RandomQuery(rng, 33);
    const std::int64_t n = UniformInt(rng, 0, 50);
    const Dataset d = RandomDataset(rng, n, q.max_input());
    EXPECT_EQ(DisToRange(q, n, EvalQuery(q, d)), 0) << ToString(q.kind());
  }
}

TEST(RangeTreeTest, LayoutAndRangeCounts) {
  Rng rng(9);
  for (std::int64_t u : {0, 1, 2, 5, 7, 8, 30}) {
    const Query q = Query::RangeTree(u);
    const std::size_t leaves = q.leaf_count();
    EXPECT_GE(leaves, static_cast<std::size_t>(u + 1));
    EXPECT_LT(leaves / 2, static_cast<std::size_t>(u + 1));
    EXPECT_EQ(q.value_size(), 2 * leaves - 1);
    const Dataset d = RandomDataset(rng, 40, u);
    const QueryValue v = EvalQuery(q, d);
    for (std::int64_t lo = 0; lo <= u; ++lo) {
      for (std::int64_t hi = lo; hi <= u; ++hi) {
        const auto expected = std::count_if(
            d.values.begin(), d.values.end(),
            [&](std::int64_t x) { return x >= lo && x <= hi; });
        EXPECT_EQ(RangeCount(q, v, lo, hi), expected);
      }
    }
    EXPECT_EQ(v[q.level_offset(q.tree_levels() - 1)], 40);
  }
}

TEST(RangeTreeTest, DistanceIsWorstLevel) {
  const Query q = Query::RangeTree(3);
  QueryValue v = EvalQuery(q, {{0, 1, 3}});
  v[0] += 5;  // leaf level over by 5
  EXPECT_EQ(DisToRange(q, 3, v), 3);
}

}  // namespace
}  // namespace shuffledp
