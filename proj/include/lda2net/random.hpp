// Copyright 2026 The lda2net Authors
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

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>

namespace lda2net {

// Main engine for every stochastic stage. The standard distributions are
// implementation-defined, so sampling goes through the helpers below to keep
// outputs identical across standard libraries.
using Engine = std::mt19937_64;

// Stateless mixer used to derive independent seeds (per chain, per walk).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

// Uniform double in [0, 1) with 53 random bits.
template <class URBG>
double uniform01(URBG& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).
template <class URBG>
std::uint64_t uniform_index(URBG& g, std::uint64_t n) {
  // Lemire-style rejection keeps it unbiased.
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
  std::uint64_t x;
  do {
    x = g();
  } while (x >= limit);
  return x % n;
}

// Draws an index with probability proportional to weights, given their
// inclusive prefix sums. Entries with zero weight are never returned.
template <class URBG>
std::size_t sample_cumulative(URBG& g, std::span<const double> cumulative) {
  const double total = cumulative.back();
  const double u = uniform01(g) * total;
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
  if (i == cumulative.size()) {
    // u rounded up to the total; fall back to the last positive entry.
    i = cumulative.size() - 1;
    while (i > 0 && cumulative[i] == cumulative[i - 1]) --i;
  }
  return i;
}

}  // namespace lda2net
