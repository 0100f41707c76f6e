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

#ifndef SHUFFLEDP_RANDOM_HPP_
#define SHUFFLEDP_RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace shuffledp {

// SplitMix64 finalizer; a bijection on 64-bit words with full avalanche.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a root seed and a path of
// counters, e.g. DeriveSeed(root, {kTrial, t, kUser, i}). Distinct paths give
// unrelated seeds, so trials and users can be simulated in any order.
constexpr std::uint64_t DeriveSeed(std::uint64_t root,
                                   std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = Mix64(root);
  for (std::uint64_t c : path) h = Mix64(h ^ Mix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

// Stream labels for DeriveSeed paths.
enum StreamTag : std::uint64_t {
  kDatasetStream = 1,
  kTrialStream = 2,
  kUserStream = 3,
  kAttackerStream = 4,
  kShufflerStream = 5,
  kTokenStream = 6,
  kCorruptionStream = 7,
};

// Small counter-based generator (SplitMix64). Satisfies
// UniformRandomBitGenerator so it plugs into <random> distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1).
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_RANDOM_HPP_
