/*
  Copyright 2026 The loadcast Authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#ifndef LOADCAST_RNG_HPP
#define LOADCAST_RNG_HPP

#include <cstdint>
#include <string_view>

namespace loadcast {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stateless generator: every (stream, counter) pair maps to one 64-bit word,
/// so draws can be produced in any order or in parallel.
class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t seed) : key_(mix64(seed ^ 0x6C6F616463617374ULL)) {}

  constexpr std::uint64_t operator()(std::uint64_t stream, std::uint64_t counter) const {
    return mix64(key_ ^ mix64(stream * 0xD1B54A32D192ED03ULL + mix64(counter)));
  }

  /// Uniform integer in [0, bound) by the 128-bit multiply-high reduction.
  std::uint64_t below(std::uint64_t stream, std::uint64_t counter, std::uint64_t bound) const {
    const unsigned __int128 m = static_cast<unsigned __int128>((*this)(stream, counter)) * bound;
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform(std::uint64_t stream, std::uint64_t counter) const {
    return static_cast<double>((*this)(stream, counter) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

/// Child seed for a named sub-stream, so parts of a run are reproducible on
/// their own: derive_seed(seed, "lasso", task).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index = 0) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a over the label
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return mix64(mix64(seed ^ h) + index);
}

}  // namespace loadcast

#endif  // LOADCAST_RNG_HPP
