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

// Immutable, indexed knowledge graph of directed (subject, relation, object)
// triples. Surfaces are interned in first-appearance order; every
// traversal order exposed here is defined on surfaces, never on ids.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgwalk/detail/hash.hpp"
#include "kgwalk/detail/text.hpp"
#include "kgwalk/error.hpp"
#include "kgwalk/path_grammar.hpp"

namespace kgwalk {

struct EntityId {
  std::uint32_t value = 0;
  friend auto operator<=>(EntityId, EntityId) = default;
};

struct RelationId {
  std::uint32_t value = 0;
  friend auto operator<=>(RelationId, RelationId) = default;
};

struct Triple {
  EntityId subject;
  RelationId relation;
  EntityId object;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// A triple spelled out in surfaces; the form QA evidence and file records
// use.
struct SurfaceTriple {
  std::string subject;
  std::string relation;
  std::string object;
  friend auto operator<=>(const SurfaceTriple&, const SurfaceTriple&) = default;
};

struct SurfaceTripleHash {
  std::size_t operator()(const SurfaceTriple& t) const noexcept {
    return static_cast<std::size_t>(detail::mix_seed(
        detail::key_of(t.subject), detail::key_of(t.relation),
        detail::key_of(t.object)));
  }
};

using SurfaceTripleSet = std::unordered_set<SurfaceTriple, SurfaceTripleHash>;

struct Edge {
  RelationId relation;
  EntityId object;
  friend bool operator==(Edge, Edge) = default;
};

struct GraphStats {
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::size_t triples = 0;
  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

enum class TripleFormat { kTsv, kJsonLines };

namespace detail {

class Interner {
 public:
  std::uint32_t intern(std::string_view s) {
    auto it = index_.find(std::string(s));
    if (it != index_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(surfaces_.size());
    surfaces_.emplace_back(s);
    index_.emplace(surfaces_.back(), id);
    return id;
  }

  std::optional<std::uint32_t> find(std::string_view s) const {
    auto it = index_.find(std::string(s));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& surface(std::uint32_t id) const { return surfaces_.at(id); }
  std::size_t size() const noexcept { return surfaces_.size(); }

  // rank[id] = position of id when all ids are sorted by surface bytes.
  std::vector<std::uint32_t> ranks() const {
    std::vector<std::uint32_t> order(surfaces_.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return surfaces_[a] < surfaces_[b];
    });
    std::vector<std::uint32_t> rank(surfaces_.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
    return rank;
  }

 private:
  std::vector<std::string> surfaces_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

}  // namespace detail

class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // Builds a graph from surface triples, validating each field and
  // dropping duplicates. Errors report the 1-based record index as the line.
  template <typename Range>
  static KnowledgeGraph from_surfaces(const Range& records) {
    KnowledgeGraph kg;
    std::size_t line = 0;
    for (const SurfaceTriple& t : records) kg.add(t.subject, t.relation, t.object, ++line);
    kg.build_index();
    return kg;
  }

  GraphStats stats() const noexcept {
    return {entities_.size(), relations_.size(), triples_.size()};
  }
  std::size_t entity_count() const noexcept { return entities_.size(); }
  std::size_t relation_count() const noexcept { return relations_.size(); }
  std::size_t duplicates_dropped() const noexcept { return duplicates_; }
  bool empty() const noexcept { return triples_.empty(); }

  // Deduplicated triples in first-appearance order.
  const std::vector<Triple>& triples() const noexcept { return triples_; }

  std::optional<EntityId> find_entity(std::string_view s) const {
    if (auto id = entities_.find(s)) return EntityId{*id};
    return std::nullopt;
  }
  std::optional<RelationId> find_relation(std::string_view s) const {
    if (auto id = relations_.find(s)) return RelationId{*id};
    return std::nullopt;
  }

  EntityId entity(std::string_view s) const {
    if (auto id = find_entity(s)) return *id;
    throw LookupError("unknown entity '" + std::string(s) + "'");
  }

  const std::string& surface(EntityId e) const { return entities_.surface(e.value); }
  const std::string& surface(RelationId r) const { return relations_.surface(r.value); }

  // Out-edges of `e`, sorted by (relation surface, object surface).
  std::span<const Edge> neighbors(EntityId e) const {
    if (e.value >= entities_.size())
      throw LookupError("unknown entity id " + std::to_string(e.value));
    return {edges_.data() + offsets_[e.value],
            edges_.data() + offsets_[e.value + 1]};
  }

  // Out-edges of `e` under relation `r`, sorted by object surface.
  std::span<const Edge> successors(EntityId e, RelationId r) const {
    const auto all = neighbors(e);
    const auto rank = relation_rank_.at(r.value);
    auto [lo, hi] = std::equal_range(
        all.begin(), all.end(), rank, RankCompare{&relation_rank_});
    return {lo, hi};
  }

  bool contains(const Triple& t) const {
    if (t.subject.value >= entities_.size() || t.relation.value >= relations_.size() ||
        t.object.value >= entities_.size())
      return false;
    const auto objs = successors(t.subject, t.relation);
    const auto target = entity_rank_[t.object.value];
    auto it = std::lower_bound(objs.begin(), objs.end(), target,
                               [&](const Edge& e, std::uint32_t r) {
                                 return entity_rank_[e.object.value] < r;
                               });
    return it != objs.end() && it->object == t.object;
  }

  bool contains(std::string_view s, std::string_view r, std::string_view o) const {
    auto si = find_entity(s);
    auto ri = find_relation(r);
    auto oi = find_entity(o);
    return si && ri && oi && contains(Triple{*si, *ri, *oi});
  }

  bool contains(const SurfaceTriple& t) const {
    return contains(t.subject, t.relation, t.object);
  }

  // All entity ids ordered by surface.
  const std::vector<EntityId>& entities_by_surface() const noexcept {
    return sorted_entities_;
  }

  // Compares entity surfaces without touching the strings.
  bool surface_less(EntityId a, EntityId b) const {
    return entity_rank_[a.value] < entity_rank_[b.value];
  }

  SurfaceTriple spell(const Triple& t) const {
    return {surface(t.subject), surface(t.relation), surface(t.object)};
  }

 private:
  struct RankCompare {
    const std::vector<std::uint32_t>* rank;
    bool operator()(const Edge& e, std::uint32_t r) const {
      return (*rank)[e.relation.value] < r;
    }
    bool operator()(std::uint32_t r, const Edge& e) const {
      return r < (*rank)[e.relation.value];
    }
  };

  static void check_field(std::string_view value, const char* name, std::size_t line) {
    if (value.empty())
      throw ParseError(line, std::string("empty ") + name + " field");
    if (!detail::valid_utf8(value))
      throw ParseError(line, std::string(name) + " field is not valid UTF-8");
    if (value.find(kDelimiter) != std::string_view::npos)
      throw ParseError(line, std::string(name) + " field '" + std::string(value) +
                                 "' contains the delimiter ' ; '");
    if (!delimiter_safe(value))
      throw ParseError(line, std::string(name) + " field '" + std::string(value) +
                                 "' has outer whitespace or a dangling ';' that "
                                 "collides with the delimiter");
  }

  void add(std::string_view s, std::string_view r, std::string_view o, std::size_t line) {
    check_field(s, "subject", line);
    check_field(r, "relation", line);
    check_field(o, "object", line);
    const Triple t{EntityId{entities_.intern(s)}, RelationId{relations_.intern(r)},
                   EntityId{entities_.intern(o)}};
    if (seen_.insert(pack(t)).second) {
      triples_.push_back(t);
    } else {
      ++duplicates_;
    }
  }

  struct PackedHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint32_t>& p) const noexcept {
      return static_cast<std::size_t>(detail::mix_seed(p.first, p.second));
    }
  };
  static std::pair<std::uint64_t, std::uint32_t> pack(const Triple& t) {
    return {(std::uint64_t{t.subject.value} << 32) | t.object.value, t.relation.value};
  }

  void build_index() {
    seen_.clear();
    entity_rank_ = entities_.ranks();
    relation_rank_ = relations_.ranks();
    const std::size_t n = entities_.size();
    offsets_.assign(n + 1, 0);
    for (const auto& t : triples_) ++offsets_[t.subject.value + 1];
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    edges_.resize(triples_.size());
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& t : triples_) edges_[cursor[t.subject.value]++] = Edge{t.relation, t.object};
    for (std::size_t e = 0; e < n; ++e) {
      std::sort(edges_.begin() + offsets_[e], edges_.begin() + offsets_[e + 1],
                [&](const Edge& a, const Edge& b) {
                  const auto ra = relation_rank_[a.relation.value];
                  const auto rb = relation_rank_[b.relation.value];
                  if (ra != rb) return ra < rb;
                  return entity_rank_[a.object.value] < entity_rank_[b.object.value];
                });
    }
    sorted_entities_.resize(n);
    for (std::uint32_t id = 0; id < n; ++id) sorted_entities_[entity_rank_[id]] = EntityId{id};
  }

  friend KnowledgeGraph load_triples(std::istream& in, TripleFormat format);

  detail::Interner entities_;
  detail::Interner relations_;
  std::vector<Triple> triples_;
  std::unordered_set<std::pair<std::uint64_t, std::uint32_t>, PackedHash> seen_;
  std::size_t duplicates_ = 0;
  std::vector<std::uint32_t> entity_rank_;
  std::vector<std::uint32_t> relation_rank_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<Edge> edges_;
  std::vector<EntityId> sorted_entities_;
};

// Reads TSV (three tab-separated fields per line) or JSON Lines
// ({"s","r","o"} per line). Blank lines are skipped; a trailing CR is
// tolerated.
inline KnowledgeGraph load_triples(std::istream& in, TripleFormat format) {
  KnowledgeGraph kg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (format == TripleFormat::kTsv) {
      std::vector<std::string_view> fields;
      std::string_view rest = line;
      for (std::size_t tab; (tab = rest.find('\t')) != std::string_view::npos;) {
        fields.push_back(rest.substr(0, tab));
        rest.remove_prefix(tab + 1);
      }
      fields.push_back(rest);
      if (fields.size() != 3)
        throw ParseError(lineno, "expected 3 tab-separated fields, found " +
                                     std::to_string(fields.size()));
      kg.add(fields[0], fields[1], fields[2], lineno);
    } else {
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object())
        throw ParseError(lineno, "not a JSON object");
      for (const char* key : {"s", "r", "o"}) {
        if (!j.contains(key) || !j[key].is_string())
          throw ParseError(lineno, std::string("missing string field \"") + key + "\"");
      }
      kg.add(j["s"].get_ref<const std::string&>(), j["r"].get_ref<const std::string&>(),
             j["o"].get_ref<const std::string&>(), lineno);
    }
  }
  if (in.bad()) throw IoError("read failure while loading triples");
  kg.build_index();
  return kg;
}

}  // namespace kgwalk
