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

#include "cate/random.hpp"

#include <sstream>
#include <utility>

#include "cate/errors.hpp"

namespace cate {
namespace {
__extension__ typedef unsigned __int128 Wide;
}  // namespace

std::uint64_t derive_seed(std::uint64_t base, Stream stream,
                          std::initializer_list<std::uint64_t> ids) {
  std::uint64_t state = mix64(base ^ 0x5851f42d4c957f2dULL);
  state = mix64(state ^ static_cast<std::uint64_t>(stream));
  std::uint64_t position = 0;
  for (std::uint64_t id : ids) {
    state = mix64(state ^ mix64(id + (++position) * 0x632be59bd9b4e019ULL));
  }
  return state;
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    // Multiply-shift bounded draw in [0, i).
    const Wide wide = static_cast<Wide>(rng()) * i;
    const auto j = static_cast<std::size_t>(wide >> 64);
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error([&] {
        std::ostringstream out;
        out << "invalid configuration (" << problems.size() << " problem"
            << (problems.size() == 1 ? "" : "s") << ")";
        for (const auto& p : problems) out << "\n  - " << p;
        return out.str();
      }()),
      problems_(std::move(problems)) {}

}  // namespace cate
