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

#ifndef SHUFFLEDP_NOISE_HPP_
#define SHUFFLEDP_NOISE_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "shuffledp/errors.hpp"
#include "shuffledp/random.hpp"

namespace shuffledp {

// Draws from the negative binomial NB(r, p) with pmf proportional to
// C(k+r-1, k) (1-p)^r p^k, via the Gamma-Poisson mixture so that r may be
// fractional. m independent NB(1/m, p) draws sum to Geometric(p); the
// difference of two such sums is discrete Laplace DLap(p).
inline std::int64_t NbSample(double r, double p, Rng& rng) {
  if (!(r > 0)) throw ParameterError("negative binomial needs r > 0");
  if (!(p >= 0 && p < 1))
    throw ParameterError("negative binomial needs p in [0,1)");
  if (p == 0) return 0;
  std::gamma_distribution<double> gamma(r, p / (1 - p));
  const double rate = gamma(rng);
  if (!(rate > 0)) return 0;
  std::poisson_distribution<std::int64_t> poisson(rate);
  return poisson(rng);
}

// Noise parameter p = exp(-epsilon / sensitivity) of the discrete Laplace
// mechanism. epsilon = +inf gives p = 0 (no noise).
inline double NoiseBase(double epsilon, double sensitivity) {
  if (!(epsilon > 0)) throw ParameterError("epsilon must be > 0");
  if (!(sensitivity > 0)) throw ParameterError("sensitivity must be > 0");
  return std::exp(-epsilon / sensitivity);
}

// Smallest integer t >= 1 with Pr[|Z| >= t] = 2 p^t / (1 + p) <= beta for
// Z ~ DLap(p), p = exp(-epsilon_eff / sensitivity).
inline std::int64_t DlapThreshold(double epsilon_eff, std::int64_t sensitivity,
                                  double beta) {
  if (!(beta > 0 && beta < 1))
    throw ParameterError("beta must lie in (0,1), got " + std::to_string(beta));
  if (sensitivity < 1) throw ParameterError("sensitivity must be >= 1");
  const double p = NoiseBase(epsilon_eff, static_cast<double>(sensitivity));
  if (p == 0) return 1;
  const double log_p = std::log(p);
  auto tail = [&](std::int64_t t) {
    return 2 * std::exp(static_cast<double>(t) * log_p) / (1 + p);
  };
  double guess = std::ceil(std::log(beta * (1 + p) / 2) / log_p);
  std::int64_t t = guess < 1 ? 1 : static_cast<std::int64_t>(guess);
  while (t > 1 && tail(t - 1) <= beta) --t;
  while (tail(t) > beta) ++t;
  return t;
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_NOISE_HPP_
