// Copyright 2026 The ChoiceBound Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CHOICEBOUND_RNG_HPP_
#define CHOICEBOUND_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

// Deterministic sampling helpers. std::uniform_*_distribution is not pinned
// down by the standard, so every draw that must reproduce bit-for-bit across
// toolchains goes through these instead.

namespace cb::rng {

using Engine = std::mt19937_64;

/// splitmix64 step; used to derive independent per-cell seeds from a master
/// seed without correlation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t s = master;
  splitmix64(s);
  s ^= 0x517cc1b727220a95ULL * (a + 1);
  splitmix64(s);
  s ^= 0x2545f4914f6cdd1dULL * (b + 1);
  return splitmix64(s);
}

/// Uniform double in [0,1) with 53 random bits.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(eng);
}

/// Unbiased integer in [0, n) via rejection.
inline std::uint64_t below(Engine& eng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = eng();
  } while (v >= limit);
  return v % n;
}

/// Standard normal via Box-Muller (two engine draws per value).
inline double normal(Engine& eng) {
  double u1 = uniform01(eng);
  double u2 = uniform01(eng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

/// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(Engine& eng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(below(eng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace cb::rng

#endif  // CHOICEBOUND_RNG_HPP_
