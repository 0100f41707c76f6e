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

#ifndef SHUFFLEDP_TESTS_TEST_UTIL_HPP_
#define SHUFFLEDP_TESTS_TEST_UTIL_HPP_

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "shuffledp/shuffledp.hpp"

namespace shuffledp::testing {

inline Dataset RandomDataset(Rng& rng, std::int64_t n, std::int64_t max_input) {
  std::uniform_int_distribution<std::int64_t> value(0, max_input);
  Dataset d;
  for (std::int64_t i = 0; i < n; ++i) d.values.push_back(value(rng));
  return d;
}

inline std::int64_t UniformInt(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline Query RandomQuery(Rng& rng, std::int64_t max_domain) {
  const auto kind = static_cast<QueryKind>(UniformInt(rng, 0, 3));
  return Query::Of(kind, UniformInt(rng, 1, max_domain));
}

inline double DlapPmf(double p, std::int64_t z) {
  return (1 - p) / (1 + p) * std::pow(p, static_cast<double>(std::llabs(z)));
}

inline double GeometricPmf(double p, std::int64_t k) {
  if (k < 0) return 0;
  return (1 - p) * std::pow(p, static_cast<double>(k));
}

// Pearson goodness of fit of integer samples against `pmf`. Outcomes are
// merged from both tails inward until every cell expects at least 5 hits.
template <typename Pmf>
double ChiSquarePValue(const std::vector<std::int64_t>& samples, Pmf pmf,
                       std::int64_t lo, std::int64_t hi) {
  std::map<std::int64_t, double> observed;
  for (std::int64_t s : samples) observed[std::clamp(s, lo, hi)] += 1;
  const double total = static_cast<double>(samples.size());
  std::vector<double> obs, expc;
  double tail_lo = 0;
  for (std::int64_t z = lo - 1; z > lo - 100000; --z) tail_lo += pmf(z);
  double tail_hi = 0;
  for (std::int64_t z = hi + 1; z < hi + 100000; ++z) tail_hi += pmf(z);
  for (std::int64_t z = lo; z <= hi; ++z) {
    double e = pmf(z);
    if (z == lo) e += tail_lo;
    if (z == hi) e += tail_hi;
    obs.push_back(observed[z]);
    expc.push_back(e * total);
  }
  std::vector<double> o2, e2;
  double acc_o = 0, acc_e = 0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    acc_o += obs[i];
    acc_e += expc[i];
    if (acc_e >= 5) {
      o2.push_back(acc_o);
      e2.push_back(acc_e);
      acc_o = acc_e = 0;
    }
  }
  if (acc_e > 0 && !e2.empty()) {
    o2.back() += acc_o;
    e2.back() += acc_e;
  }
  double stat = 0;
  for (std::size_t i = 0; i < o2.size(); ++i)
    stat += (o2[i] - e2[i]) * (o2[i] - e2[i]) / e2[i];
  const double dof = static_cast<double>(o2.size()) - 1;
  if (dof < 1) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Two-sample chi-square homogeneity test on integer samples.
inline double TwoSampleChiSquarePValue(const std::vector<std::int64_t>& a,
                                       const std::vector<std::int64_t>& b) {
  std::map<std::int64_t, std::pair<double, double>> cells;
  for (auto x : a) cells[x].first += 1;
  for (auto x : b) cells[x].second += 1;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::vector<std::pair<double, double>> merged;
  std::pair<double, double> acc{0, 0};
  for (const auto& [key, c] : cells) {
    acc.first += c.first;
    acc.second += c.second;
    if (acc.first + acc.second >= 20) {
      merged.push_back(acc);
      acc = {0, 0};
    }
  }
  if (acc.first + acc.second > 0 && !merged.empty()) {
    merged.back().first += acc.first;
    merged.back().second += acc.second;
  }
  double stat = 0;
  for (const auto& [ca, cb] : merged) {
    const double row = ca + cb;
    const double ea = row * na / (na + nb);
    const double eb = row * nb / (na + nb);
    stat += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
  }
  const double dof = static_cast<double>(merged.size()) - 1;
  if (dof < 1) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

}  // namespace shuffledp::testing

#endif  // SHUFFLEDP_TESTS_TEST_UTIL_HPP_
