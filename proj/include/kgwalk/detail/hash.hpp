// Copyright 2026 The kgwalk Authors.
//
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

// Seed derivation. Every random stream in the toolkit is keyed by a hash of
// its logical coordinates (base seed, round, entity surface, record id...),
// so results never depend on iteration or thread schedule.

#pragma once

#include <cstdint>
#include <string_view>

namespace kgwalk::detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::uint64_t mix_seed(std::uint64_t seed) noexcept {
  return splitmix64(seed);
}

template <typename... Rest>
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t next,
                                 Rest... rest) noexcept {
  return mix_seed(splitmix64(seed ^ splitmix64(next)), rest...);
}

inline constexpr std::uint64_t key_of(std::string_view s) noexcept {
  return fnv1a64(s);
}

}  // namespace kgwalk::detail
