// Copyright 2026 The cate-bounds Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seed derivation. Every random quantity in the library is drawn from an
// engine seeded by derive_seed(base, stream, ids...), so values depend only on
// the base seed and the coordinates of the draw, never on evaluation order.

#ifndef CATE_RANDOM_HPP_
#define CATE_RANDOM_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace cate {

using Rng = std::mt19937_64;

// Independent sub-streams. Values are part of the reproducibility contract:
// changing one changes every artifact produced with that stream.
enum class Stream : std::uint64_t {
  kInit = 1,
  kShuffle = 2,
  kTrainMask = 3,
  kOutcomeMask = 4,
  kPropensityMask = 5,
  kOutcomeSample = 6,
  kDataRow = 7,
  kSplit = 8,
  kTrainData = 9,
  kValidData = 10,
  kTestData = 11,
  kCoefficients = 12,
  kSurrogate = 13,
  kModel = 14,
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, Stream stream,
                          std::initializer_list<std::uint64_t> ids = {});

inline Rng make_rng(std::uint64_t base, Stream stream,
                    std::initializer_list<std::uint64_t> ids = {}) {
  return Rng(derive_seed(base, stream, ids));
}

// Fisher-Yates permutation of 0..n-1 using only raw engine output, so the
// result does not depend on the standard library's distribution algorithms.
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cate

#endif  // CATE_RANDOM_HPP_
