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

#include <cmath>
#include <cstdint>
#include <vector>

#include "shuffledp/noise.hpp"
#include "test_util.hpp"

namespace shuffledp {
namespace {

using testing::ChiSquarePValue;
using testing::DlapPmf;
using testing::GeometricPmf;

// Smallest t >= 1 whose two-sided tail, summed from the pmf, is <= beta.
std::int64_t ThresholdOracle(double eps, std::int64_t sens, double beta) {
  const double p = std::exp(-eps / static_cast<double>(sens));
  for (std::int64_t t = 1;; ++t) {
    double inside = 0;
    for (std::int64_t z = -t + 1; z < t; ++z) inside += DlapPmf(p, z);
    if (1 - inside <= beta + 1e-15) return t;
  }
}

std::int64_t DlapDraw(double p, std::int64_t shares, Rng& rng) {
  const double r = 1.0 / static_cast<double>(shares);
  std::int64_t z = 0;
  for (std::int64_t i = 0; i < shares; ++i)
    z += NbSample(r, p, rng) - NbSample(r, p, rng);
  return z;
}

TEST(DlapThresholdTest, FrozenValues) {
  EXPECT_EQ(DlapThreshold(1, 1, 0.1), 3);
  EXPECT_EQ(DlapThreshold(0.5, 10, 0.05), 61);
  EXPECT_EQ(DlapThreshold(1, 10, 0.1), 24);
  EXPECT_EQ(DlapThreshold(1, 1, 0.01), 5);
}

TEST(DlapThresholdTest, BoundaryAtOne) {
  const double p = std::exp(-1.0);
  EXPECT_EQ(DlapThreshold(1, 1, 2 * p / (1 + p)), 1);
  EXPECT_EQ(DlapThreshold(1, 1, 0.9), 1);
}

TEST(DlapThresholdTest, NoiselessIsOne) {
  EXPECT_EQ(DlapThreshold(testing::kNoiseless, 7, 1e-9), 1);
}

TEST(DlapThresholdTest, MatchesPmfOracle) {
  Rng rng(3);
  for (int iter = 0; iter < 200; ++iter) {
    const double eps = 0.05 + 3 * rng.Uniform();
    const std::int64_t sens = testing::UniformInt(rng, 1, 12);
    const double beta = std::pow(10.0, -6 * rng.Uniform()) * 0.5;
    EXPECT_EQ(DlapThreshold(eps, sens, beta), ThresholdOracle(eps, sens, beta))
        << eps << " " << sens << " " << beta;
  }
}

TEST(DlapThresholdTest, RejectsBadArguments) {
  EXPECT_THROW(DlapThreshold(1, 1, 1.0), ParameterError);
  EXPECT_THROW(DlapThreshold(1, 1, 0.0), ParameterError);
  EXPECT_THROW(DlapThreshold(0, 1, 0.1), ParameterError);
  EXPECT_THROW(DlapThreshold(-1, 1, 0.1), ParameterError);
  EXPECT_THROW(DlapThreshold(1, 0, 0.1), ParameterError);
}

TEST(DlapThresholdTest, MonotoneInEpsilonAndBeta) {
  Rng rng(4);
  for (int iter = 0; iter < 300; ++iter) {
    const double eps = 0.01 + 2 * rng.Uniform();
    const double beta = 0.001 + 0.5 * rng.Uniform();
    const std::int64_t sens = testing::UniformInt(rng, 1, 8);
    const std::int64_t t = DlapThreshold(eps, sens, beta);
    EXPECT_GE(t, DlapThreshold(eps * 1.5, sens, beta));
    EXPECT_LE(t, DlapThreshold(eps, sens, beta / 3));
  }
}

TEST(NbSampleTest, ZeroNoiseBaseGivesZero) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(NbSample(0.3, 0.0, rng), 0);
}

TEST(NbSampleTest, GeometricMean) {
  Rng rng(2);
  double sum = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) sum += static_cast<double>(NbSample(1, 0.5, rng));
  EXPECT_NEAR(sum / draws, 1.0, 0.05);
}

TEST(NbSampleTest, RejectsBadArguments) {
  Rng rng(1);
  EXPECT_THROW(NbSample(0, 0.5, rng), ParameterError);
  EXPECT_THROW(NbSample(1, 1.0, rng), ParameterError);
  EXPECT_THROW(NbSample(1, -0.1, rng), ParameterError);
}

TEST(NbSampleTest, SharesSumToGeometric) {
  const double p = std::exp(-1.0);
  for (std::int64_t m : {1, 2, 4, 8, 16}) {
    Rng rng(100 + static_cast<std::uint64_t>(m));
    std::vector<std::int64_t> samples;
    for (int i = 0; i < 100000; ++i) {
      std::int64_t total = 0;
      for (std::int64_t j = 0; j < m; ++j)
        total += NbSample(1.0 / static_cast<double>(m), p, rng);
      samples.push_back(total);
    }
    const double pv = ChiSquarePValue(
        samples, [&](std::int64_t k) { return k < 0 ? 0.0 : GeometricPmf(p, k); },
        0, 15);
    EXPECT_GT(pv, 0.01) << "m=" << m;
  }
}

TEST(NbSampleTest, DifferenceIsDiscreteLaplace) {
  const double p = std::exp(-0.7);
  Rng rng(17);
  std::vector<std::int64_t> samples;
  for (int i = 0; i < 100000; ++i) samples.push_back(DlapDraw(p, 4, rng));
  const double pv = ChiSquarePValue(
      samples, [&](std::int64_t z) { return DlapPmf(p, z); }, -12, 12);
  EXPECT_GT(pv, 0.01);
}

TEST(NbSampleTest, TailWithinThreshold) {
  struct Case {
    double eps;
    std::int64_t sens;
    double beta;
  };
  for (const Case& c : {Case{1, 1, 0.1}, Case{0.5, 1, 0.05}, Case{1, 10, 0.1}}) {
    const std::int64_t t = DlapThreshold(c.eps, c.sens, c.beta);
    const double p = std::exp(-c.eps / static_cast<double>(c.sens));
    Rng rng(31);
    int exceed = 0;
    const int runs = 10000;
    for (int i = 0; i < runs; ++i)
      if (std::llabs(DlapDraw(p, 3, rng)) >= t) ++exceed;
    EXPECT_LE(exceed / static_cast<double>(runs), 1.5 * c.beta);
  }
}

}  // namespace
}  // namespace shuffledp
