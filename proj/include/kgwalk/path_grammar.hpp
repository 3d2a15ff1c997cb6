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

// The " ; "-joined text grammar shared by knowledge-integration records,
// random walks, parse outputs and model I/O.
//
//   walk   e1 ; r1 ; e2 ; ... ; r(n-1) ; en      (2n-1 segments)
//   query  e1 ; r1 ; ... ; r(n-1)                (n segments)
//
// The delimiter is exactly space-semicolon-space. There is no escaping, so
// surfaces that could collide with the delimiter are rejected at load time
// (see delimiter_safe).

#pragma once

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "kgwalk/detail/text.hpp"
#include "kgwalk/error.hpp"

namespace kgwalk {

inline constexpr std::string_view kDelimiter = " ; ";

// True when `surface` survives a join/split round trip at any position of
// a path: non-empty, no outer whitespace, and " ; " occurs in
// " ; " + surface + " ; " only at the two ends.
inline bool delimiter_safe(std::string_view surface) {
  if (surface.empty()) return false;
  if (detail::is_space(surface.front()) || detail::is_space(surface.back()))
    return false;
  std::string framed;
  framed.reserve(surface.size() + 2 * kDelimiter.size());
  framed.append(kDelimiter).append(surface).append(kDelimiter);
  return framed.find(kDelimiter, 1) == framed.size() - kDelimiter.size();
}

struct WalkPath {
  std::vector<std::string> entities;   // n >= 1
  std::vector<std::string> relations;  // n - 1

  std::size_t hops() const noexcept { return relations.size(); }
  const std::string& answer() const { return entities.back(); }

  friend bool operator==(const WalkPath&, const WalkPath&) = default;
  friend auto operator<=>(const WalkPath&, const WalkPath&) = default;
};

struct WalkQuery {
  std::string seed;
  std::vector<std::string> relations;  // >= 1

  friend bool operator==(const WalkQuery&, const WalkQuery&) = default;
};

inline void check_shape(const WalkPath& p) {
  if (p.entities.empty() || p.relations.size() + 1 != p.entities.size())
    throw ValidationError("walk path must have n >= 1 entities and n-1 relations");
}

inline WalkQuery query_of(const WalkPath& p) {
  check_shape(p);
  return WalkQuery{p.entities.front(), p.relations};
}

inline std::string serialize(const WalkPath& p) {
  check_shape(p);
  std::string out = p.entities.front();
  for (std::size_t i = 0; i < p.relations.size(); ++i) {
    out.append(kDelimiter).append(p.relations[i]);
    out.append(kDelimiter).append(p.entities[i + 1]);
  }
  return out;
}

inline std::string serialize(const WalkQuery& q) {
  std::string out = q.seed;
  for (const auto& r : q.relations) out.append(kDelimiter).append(r);
  return out;
}

inline std::string join_segments(const std::vector<std::string>& segments) {
  std::string out;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i) out.append(kDelimiter);
    out.append(segments[i]);
  }
  return out;
}

enum class Shape { kFullWalk, kQuery, kAnswerOnly, kAmbiguous };

inline std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::kFullWalk: return "full-walk";
    case Shape::kQuery: return "query";
    case Shape::kAnswerOnly: return "answer-only";
    case Shape::kAmbiguous: return "ambiguous";
  }
  return "ambiguous";
}

struct ParsedSegments {
  std::vector<std::string> segments;  // never empty
  Shape shape = Shape::kAmbiguous;
  std::string diagnostic;             // empty unless shape is ambiguous
};

// Splits arbitrary text on the exact delimiter token and classifies the
// result by segment count alone. Never throws on any input.
inline ParsedSegments parse_segments(std::string_view text) {
  ParsedSegments out;
  const std::string_view body = detail::trim(text);
  std::size_t start = 0;
  while (true) {
    const std::size_t hit = body.find(kDelimiter, start);
    const std::string_view piece =
        body.substr(start, hit == std::string_view::npos ? hit : hit - start);
    out.segments.emplace_back(detail::trim(piece));
    if (hit == std::string_view::npos) break;
    start = hit + kDelimiter.size();
  }
  const std::size_t n = out.segments.size();
  if (body.empty()) {
    out.diagnostic = "empty-input";
  } else if (std::any_of(out.segments.begin(), out.segments.end(),
                         [](const std::string& s) { return s.empty(); })) {
    out.diagnostic = "empty-segment";
  } else if (n == 1) {
    out.shape = Shape::kAnswerOnly;
  } else if (n % 2 == 0) {
    out.shape = Shape::kQuery;
  } else {
    out.shape = Shape::kFullWalk;
  }
  return out;
}

struct ExtractedAnswer {
  std::string answer;
  bool malformed = false;  // shape was query-like or ambiguous
  bool empty = false;      // input was blank
};

// The final segment is the answer: identical for bare answers and for
// full walks.
inline ExtractedAnswer extract_answer(std::string_view text) {
  ParsedSegments parsed = parse_segments(text);
  ExtractedAnswer out;
  out.answer = std::move(parsed.segments.back());
  out.empty = parsed.diagnostic == "empty-input";
  out.malformed = parsed.shape == Shape::kQuery || parsed.shape == Shape::kAmbiguous;
  return out;
}

struct QueryFields {
  std::string entity;
  std::vector<std::string> relations;
  bool malformed = false;  // fewer than two segments, or an empty segment
};

inline QueryFields extract_query_fields(std::string_view text) {
  ParsedSegments parsed = parse_segments(text);
  QueryFields out;
  out.entity = std::move(parsed.segments.front());
  out.relations.assign(std::make_move_iterator(parsed.segments.begin() + 1),
                       std::make_move_iterator(parsed.segments.end()));
  out.malformed = parsed.segments.size() < 2 || parsed.shape == Shape::kAmbiguous;
  return out;
}

// Reads the segments of a full walk back into a path. Returns false when
// the segment count is not odd or a segment is empty.
inline bool to_walk_path(const ParsedSegments& parsed, WalkPath& out) {
  if (parsed.shape != Shape::kFullWalk && parsed.shape != Shape::kAnswerOnly)
    return false;
  out.entities.clear();
  out.relations.clear();
  for (std::size_t i = 0; i < parsed.segments.size(); ++i)
    (i % 2 == 0 ? out.entities : out.relations).push_back(parsed.segments[i]);
  return true;
}

}  // namespace kgwalk
