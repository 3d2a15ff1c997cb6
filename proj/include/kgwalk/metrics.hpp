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

// SQuAD-convention answer normalization, exact match and token F1.

#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgwalk/detail/text.hpp"

namespace kgwalk {

namespace detail {

inline bool ascii_punct(char c) noexcept {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) || (u >= 91 && u <= 96) ||
         (u >= 123 && u <= 126);
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

// Lowercase (ASCII and Latin-1 letters), drop ASCII punctuation, drop the
// tokens "a", "an", "the", collapse whitespace.
inline std::string normalize_text(std::string_view s) {
  std::string lowered;
  lowered.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto u = static_cast<unsigned char>(s[i]);
    if (u >= 'A' && u <= 'Z') {
      lowered.push_back(static_cast<char>(u + 32));
    } else if (u == 0xC3 && i + 1 < s.size()) {
      auto next = static_cast<unsigned char>(s[i + 1]);
      if (next >= 0x80 && next <= 0x9E && next != 0x97) next += 0x20;  // U+00C0..U+00DE
      lowered.push_back(static_cast<char>(u));
      lowered.push_back(static_cast<char>(next));
      ++i;
    } else if (!detail::ascii_punct(static_cast<char>(u))) {
      lowered.push_back(static_cast<char>(u));
    }
  }
  std::string out;
  for (const auto& tok : detail::split_ws(lowered)) {
    if (tok == "a" || tok == "an" || tok == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

inline bool exact_match(std::string_view pred, std::string_view gold) {
  return normalize_text(pred) == normalize_text(gold);
}

// Bag-of-tokens F1 over normalized text. Both empty scores 1, one empty 0.
inline double token_f1(std::string_view pred, std::string_view gold) {
  const auto p = detail::split_ws(normalize_text(pred));
  const auto g = detail::split_ws(normalize_text(gold));
  if (p.empty() || g.empty()) return p.empty() && g.empty() ? 1.0 : 0.0;
  std::unordered_map<std::string, int> counts;
  for (const auto& t : g) ++counts[t];
  std::size_t common = 0;
  for (const auto& t : p) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(p.size());
  const double recall = static_cast<double>(common) / static_cast<double>(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace kgwalk
