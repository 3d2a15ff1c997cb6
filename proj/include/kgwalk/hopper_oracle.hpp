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

// Symbolic completion of walk queries by graph traversal: the reference
// for what a perfectly trained hopping model would output.

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "kgwalk/error.hpp"
#include "kgwalk/kg_store.hpp"
#include "kgwalk/path_grammar.hpp"

namespace kgwalk {

enum class CompletionMode { kLexicographic, kEnumerateAll };

namespace detail {

struct ResolvedQuery {
  EntityId seed;
  std::vector<std::optional<RelationId>> relations;  // nullopt: not in the graph
};

inline ResolvedQuery resolve(const KnowledgeGraph& kg, const WalkQuery& q) {
  ResolvedQuery out{kg.entity(q.seed), {}};
  out.relations.reserve(q.relations.size());
  for (const auto& r : q.relations) out.relations.push_back(kg.find_relation(r));
  return out;
}

// Visits completions depth-first with children in object-surface order,
// which is lexicographic order of the entity sequence. `visit` returns
// false to stop. Returns false if stopped early.
template <typename Visit>
bool visit_completions(const KnowledgeGraph& kg, const ResolvedQuery& q,
                       std::vector<EntityId>& trail, Visit&& visit) {
  const std::size_t depth = trail.size() - 1;
  if (depth == q.relations.size()) return visit(trail);
  if (!q.relations[depth]) return true;
  for (const Edge& e : kg.successors(trail.back(), *q.relations[depth])) {
    trail.push_back(e.object);
    const bool go_on = visit_completions(kg, q, trail, visit);
    trail.pop_back();
    if (!go_on) return false;
  }
  return true;
}

inline WalkPath spell(const KnowledgeGraph& kg, const WalkQuery& q,
                      const std::vector<EntityId>& trail) {
  WalkPath p;
  p.relations = q.relations;
  for (auto e : trail) p.entities.push_back(kg.surface(e));
  return p;
}

}  // namespace detail

// The 1-based hop at which the set of entities reachable from the seed
// through the query's relation prefix becomes empty; nullopt when a
// completion exists. Throws LookupError for an unknown seed.
inline std::optional<std::size_t> first_failing_hop(const KnowledgeGraph& kg, const WalkQuery& q) {
  const auto rq = detail::resolve(kg, q);
  std::vector<EntityId> frontier{rq.seed};
  for (std::size_t hop = 0; hop < rq.relations.size(); ++hop) {
    if (!rq.relations[hop]) return hop + 1;
    std::unordered_set<std::uint32_t> seen;
    std::vector<EntityId> next;
    for (auto e : frontier)
      for (const Edge& edge : kg.successors(e, *rq.relations[hop]))
        if (seen.insert(edge.object.value).second) next.push_back(edge.object);
    if (next.empty()) return hop + 1;
    frontier = std::move(next);
  }
  return std::nullopt;
}

// Lexicographically smallest completion, found by depth-first search with
// backtracking: a completion is returned iff one exists. Throws
// NoPathError (naming the first failing hop) or LookupError.
inline WalkPath complete_walk(const KnowledgeGraph& kg, const WalkQuery& q) {
  if (q.relations.empty()) throw ValidationError("walk query needs at least one relation");
  if (auto hop = first_failing_hop(kg, q)) throw NoPathError(*hop, q.relations[*hop - 1]);
  const auto rq = detail::resolve(kg, q);
  std::vector<EntityId> trail{rq.seed};
  std::optional<WalkPath> found;
  detail::visit_completions(kg, rq, trail, [&](const std::vector<EntityId>& t) {
    found = detail::spell(kg, q, t);
    return false;
  });
  return std::move(*found);
}

// Every completion in lexicographic order, up to `limit`. Empty when none
// exists; throws LookupError for an unknown seed.
inline std::vector<WalkPath> enumerate_walks(
    const KnowledgeGraph& kg, const WalkQuery& q,
    std::size_t limit = std::numeric_limits<std::size_t>::max()) {
  std::vector<WalkPath> out;
  if (limit == 0) return out;
  const auto rq = detail::resolve(kg, q);
  std::vector<EntityId> trail{rq.seed};
  detail::visit_completions(kg, rq, trail, [&](const std::vector<EntityId>& t) {
    out.push_back(detail::spell(kg, q, t));
    return out.size() < limit;
  });
  return out;
}

inline std::size_t count_completions(const KnowledgeGraph& kg, const WalkQuery& q,
                                     std::size_t limit = std::numeric_limits<std::size_t>::max()) {
  if (!kg.find_entity(q.seed)) return 0;
  const auto rq = detail::resolve(kg, q);
  std::vector<EntityId> trail{rq.seed};
  std::size_t n = 0;
  detail::visit_completions(kg, rq, trail, [&](const std::vector<EntityId>&) {
    return ++n < limit;
  });
  return n;
}

struct AmbiguityCounts {
  std::size_t unique = 0;
  std::size_t multiple = 0;
  std::size_t none = 0;
  friend bool operator==(const AmbiguityCounts&, const AmbiguityCounts&) = default;
};

// Classifies queries by completion count: 1, more than 1, or 0 (unknown
// seeds count as 0).
inline AmbiguityCounts count_ambiguous(const KnowledgeGraph& kg,
                                       const std::vector<WalkQuery>& queries) {
  AmbiguityCounts c;
  for (const auto& q : queries) {
    switch (count_completions(kg, q, 2)) {
      case 0: ++c.none; break;
      case 1: ++c.unique; break;
      default: ++c.multiple; break;
    }
  }
  return c;
}

}  // namespace kgwalk
