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

// Random-walk corpus generation and the leakage-aware train/val/test split.
//
// Sampling runs, for every round and every entity in surface order, a
// bounded number of uniform walk attempts from that entity. Each
// (entity, round) pair owns an RNG stream keyed by (base_seed, round,
// entity surface). Walks from different seeds can never be equal, so the
// only dedup interaction is between rounds of the same seed; entities are
// therefore sampled independently and merged in canonical
// (round, entity-surface) order, making the corpus identical for any
// number of worker threads.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgwalk/detail/hash.hpp"
#include "kgwalk/detail/rng.hpp"
#include "kgwalk/error.hpp"
#include "kgwalk/io.hpp"
#include "kgwalk/kg_store.hpp"
#include "kgwalk/path_grammar.hpp"
#include "kgwalk/qa_types.hpp"

namespace kgwalk {

struct SamplerConfig {
  int length_entities = 3;
  int per_entity_cap = 20;
  int rounds = 5;
  std::uint64_t base_seed = 0;
  int attempt_factor = 4;

  void validate() const {
    if (length_entities < 2) throw ConfigError("length_entities must be >= 2");
    if (per_entity_cap < 1) throw ConfigError("per_entity_cap must be >= 1");
    if (rounds < 1) throw ConfigError("rounds must be >= 1");
    if (attempt_factor < 1) throw ConfigError("attempt_factor must be >= 1");
  }
};

// A walk with its provenance. Gold evidence chains carry the question id
// and round -1.
struct WalkRecord {
  std::string id;
  WalkPath path;
  std::string seed_entity;
  int round = 0;

  friend bool operator==(const WalkRecord&, const WalkRecord&) = default;
};

struct WalkCorpus {
  std::vector<WalkRecord> walks;  // canonical (round, seed surface) order
  std::size_t attempts = 0;
  std::size_t dead_ends = 0;      // attempts abandoned at a sink
  std::size_t repeats = 0;        // attempts that produced a known walk
};

struct SplitCorpus {
  std::vector<WalkRecord> train;
  std::vector<WalkRecord> validation;
  std::vector<WalkRecord> test;
  std::size_t discarded_count = 0;
};

inline std::vector<SurfaceTriple> path_triples(const WalkPath& p) {
  std::vector<SurfaceTriple> out;
  out.reserve(p.relations.size());
  for (std::size_t i = 0; i < p.relations.size(); ++i)
    out.push_back({p.entities[i], p.relations[i], p.entities[i + 1]});
  return out;
}

// Every hop of `p` is a triple of `kg`.
inline bool kg_valid(const KnowledgeGraph& kg, const WalkPath& p) {
  if (p.entities.empty() || p.relations.size() + 1 != p.entities.size()) return false;
  for (std::size_t i = 0; i < p.relations.size(); ++i)
    if (!kg.contains(p.entities[i], p.relations[i], p.entities[i + 1])) return false;
  return true;
}

namespace detail {

// Interleaved entity/relation ids: e1 r1 e2 r2 ... en.
using IdWalk = std::vector<std::uint32_t>;

struct SeedResult {
  std::vector<std::vector<IdWalk>> per_round;
  std::size_t attempts = 0;
  std::size_t dead_ends = 0;
  std::size_t repeats = 0;
};

inline SeedResult sample_from_seed(const KnowledgeGraph& kg, EntityId seed,
                                   const SamplerConfig& cfg) {
  SeedResult out;
  out.per_round.resize(static_cast<std::size_t>(cfg.rounds));
  if (kg.neighbors(seed).empty()) return out;  // every attempt would dead-end
  const std::uint64_t surface_key = key_of(kg.surface(seed));
  const std::size_t budget =
      static_cast<std::size_t>(cfg.attempt_factor) * static_cast<std::size_t>(cfg.per_entity_cap);
  std::set<IdWalk> seen;
  for (int round = 0; round < cfg.rounds; ++round) {
    RandomStream rng(mix_seed(cfg.base_seed, static_cast<std::uint64_t>(round), surface_key));
    std::size_t accepted = 0;
    for (std::size_t attempt = 0;
         attempt < budget && accepted < static_cast<std::size_t>(cfg.per_entity_cap);
         ++attempt) {
      ++out.attempts;
      IdWalk walk{seed.value};
      EntityId current = seed;
      bool dead_end = false;
      for (int step = 1; step < cfg.length_entities; ++step) {
        const auto edges = kg.neighbors(current);
        if (edges.empty()) {
          dead_end = true;
          break;
        }
        const Edge& e = edges[rng.below(edges.size())];
        walk.push_back(e.relation.value);
        walk.push_back(e.object.value);
        current = e.object;
      }
      if (dead_end) {
        ++out.dead_ends;
        continue;
      }
      if (seen.insert(walk).second) {
        out.per_round[static_cast<std::size_t>(round)].push_back(std::move(walk));
        ++accepted;
      } else {
        ++out.repeats;
      }
    }
  }
  return out;
}

inline WalkPath spell_walk(const KnowledgeGraph& kg, const IdWalk& w) {
  WalkPath p;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i % 2 == 0)
      p.entities.push_back(kg.surface(EntityId{w[i]}));
    else
      p.relations.push_back(kg.surface(RelationId{w[i]}));
  }
  return p;
}

}  // namespace detail

// Samples the walk corpus. `jobs` bounds worker threads and never changes
// the result.
inline WalkCorpus sample_walks(const KnowledgeGraph& kg, const SamplerConfig& cfg,
                               unsigned jobs = 1) {
  cfg.validate();
  const auto& seeds = kg.entities_by_surface();
  std::vector<detail::SeedResult> results(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < seeds.size();)
      results[i] = detail::sample_from_seed(kg, seeds[i], cfg);
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(seeds.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  WalkCorpus corpus;
  for (int round = 0; round < cfg.rounds; ++round) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      for (const auto& w : results[i].per_round[static_cast<std::size_t>(round)]) {
        WalkRecord rec;
        rec.id = "w" + std::to_string(corpus.walks.size());
        rec.path = detail::spell_walk(kg, w);
        rec.seed_entity = kg.surface(seeds[i]);
        rec.round = round;
        corpus.walks.push_back(std::move(rec));
      }
    }
  }
  for (const auto& r : results) {
    corpus.attempts += r.attempts;
    corpus.dead_ends += r.dead_ends;
    corpus.repeats += r.repeats;
  }
  return corpus;
}

inline SurfaceTripleSet evidence_triples(const std::vector<QAInstance>& a,
                                         const std::vector<QAInstance>& b) {
  SurfaceTripleSet out;
  for (const auto* split : {&a, &b})
    for (const auto& qa : *split)
      for (const auto& t : qa.evidence) out.insert(t);
  return out;
}

inline bool contains_any(const WalkPath& p, const SurfaceTripleSet& triples) {
  for (std::size_t i = 0; i < p.relations.size(); ++i)
    if (triples.count({p.entities[i], p.relations[i], p.entities[i + 1]})) return true;
  return false;
}

// Train keeps the sampled walks that share no triple (orientation-exact)
// with any validation or test evidence chain; validation and test are the
// gold evidence chains themselves. Held-out sampled walks are dropped.
inline SplitCorpus split_with_holdout(const WalkCorpus& corpus,
                                      const std::vector<QAInstance>& qa_val,
                                      const std::vector<QAInstance>& qa_test) {
  SplitCorpus out;
  auto gold = [](const std::vector<QAInstance>& qas) {
    std::vector<WalkRecord> recs;
    recs.reserve(qas.size());
    for (const auto& qa : qas) {
      WalkRecord r;
      r.id = qa.id;
      r.path = evidence_path(qa);
      r.seed_entity = r.path.entities.front();
      r.round = -1;
      recs.push_back(std::move(r));
    }
    return recs;
  };
  out.validation = gold(qa_val);
  out.test = gold(qa_test);
  const SurfaceTripleSet held_out = evidence_triples(qa_val, qa_test);
  for (const auto& w : corpus.walks) {
    if (contains_any(w.path, held_out))
      ++out.discarded_count;
    else
      out.train.push_back(w);
  }
  return out;
}

inline nlohmann::json to_json(const WalkRecord& r) {
  return {{"id", r.id}, {"path", serialize(r.path)}, {"seed_entity", r.seed_entity},
          {"round", r.round}};
}

// Reads walk records; a record without "id" is named by its 0-based
// record index.
inline std::vector<WalkRecord> read_walks(std::istream& in) {
  std::vector<WalkRecord> out;
  io::for_each_json_line(in, [&](const nlohmann::json& j, std::size_t line) {
    WalkRecord r;
    const auto& text = io::require_string(j, "path", line);
    const ParsedSegments parsed = parse_segments(text);
    if (!to_walk_path(parsed, r.path))
      throw ParseError(line, "\"path\" is not a full walk: '" + text + "'");
    r.id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>()
                                                   : std::to_string(out.size());
    r.seed_entity = j.contains("seed_entity") && j["seed_entity"].is_string()
                        ? j["seed_entity"].get<std::string>()
                        : r.path.entities.front();
    r.round = j.contains("round") && j["round"].is_number_integer() ? j["round"].get<int>() : 0;
    out.push_back(std::move(r));
  });
  return out;
}

inline void write_walks(std::ostream& out, const std::vector<WalkRecord>& walks) {
  for (const auto& w : walks) io::write_json_line(out, to_json(w));
}

}  // namespace kgwalk
