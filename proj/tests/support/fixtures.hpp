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

// Test-only fixtures and independent oracles. Nothing here calls into the
// index or traversal code it is used to check.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kgwalk/kg_store.hpp"
#include "kgwalk/path_grammar.hpp"
#include "kgwalk/qa_types.hpp"

namespace kgwalk::testing {

// The worked examples used throughout the docs.
inline std::vector<SurfaceTriple> example_triples() {
  return {
      {"Violet Tendencies", "director", "Casper Andreas"},
      {"Casper Andreas", "place of birth", "Sweden"},
      {"David Beckham", "daughter", "Harper Beckham"},
      {"Harper Beckham", "place of birth", "Los Angeles"},
      {"Harriet Hemings", "mother", "Sally Hemings"},
      {"Sally Hemings", "father", "John Wayles"},
      {"New World", "director", "Alain Corneau"},
      {"Alain Corneau", "place of burial", "Père Lachaise Cemetery"},
      {"Inception", "director", "Christopher Nolan"},
  };
}

inline KnowledgeGraph example_kg() { return KnowledgeGraph::from_surfaces(example_triples()); }

inline std::vector<QAInstance> example_questions() {
  return {
      {"beckham", "Where was David Beckham's daughter born?", "Los Angeles",
       {{"David Beckham", "daughter", "Harper Beckham"},
        {"Harper Beckham", "place of birth", "Los Angeles"}},
       2},
      {"hemings", "Who is Harriet Hemings's maternal grandfather?", "John Wayles",
       {{"Harriet Hemings", "mother", "Sally Hemings"},
        {"Sally Hemings", "father", "John Wayles"}},
       2},
      {"newworld", "Where was the place of burial of the director of film New World?",
       "Père Lachaise Cemetery",
       {{"New World", "director", "Alain Corneau"},
        {"Alain Corneau", "place of burial", "Père Lachaise Cemetery"}},
       2},
  };
}

// Surfaces deliberately include non-ASCII text, bare semicolons and
// punctuation, none of which may confuse the grammar.
inline std::string entity_name(std::size_t i) {
  static const char* const kFlavors[] = {"Entity", "Ünïcødé", "a;b", "Name (film)", "X's",
                                         "São  Paulo", "e;", "Ωmega"};
  return std::string(kFlavors[i % 8]) + " " + std::to_string(i);
}

inline std::string relation_name(std::size_t i) {
  static const char* const kFlavors[] = {"place of birth", "director", "father", "r;x",
                                         "educated at"};
  return std::string(kFlavors[i % 5]) + " #" + std::to_string(i);
}

// Random directed graph with the given number of distinct triples.
// Entities that end up in no triple are simply absent.
inline std::vector<SurfaceTriple> random_triples(std::size_t entities, std::size_t relations,
                                                 std::size_t triples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
  std::vector<SurfaceTriple> out;
  while (out.size() < triples) {
    const std::size_t s = rng() % entities;
    const std::size_t r = rng() % relations;
    const std::size_t o = rng() % entities;
    if (!seen.insert({s, r, o}).second) continue;
    out.push_back({entity_name(s), relation_name(r), entity_name(o)});
  }
  return out;
}

// Two-hop questions over chained triples of `triples`.
inline std::vector<QAInstance> random_two_hop_questions(const std::vector<SurfaceTriple>& triples,
                                                        std::size_t count, std::uint64_t seed,
                                                        const std::string& prefix = "q") {
  std::mt19937_64 rng(seed);
  std::vector<QAInstance> out;
  std::set<std::pair<std::size_t, std::size_t>> used;
  std::size_t guard = 0;
  while (out.size() < count && guard++ < count * 1000) {
    const auto& first = triples[rng() % triples.size()];
    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < triples.size(); ++i)
      if (triples[i].subject == first.object) next.push_back(i);
    if (next.empty()) continue;
    const std::size_t pick = next[rng() % next.size()];
    const std::size_t first_index = static_cast<std::size_t>(&first - triples.data());
    if (!used.insert({first_index, pick}).second) continue;
    const auto& second = triples[pick];
    QAInstance qa;
    qa.id = prefix + std::to_string(out.size());
    qa.question = "What is the " + second.relation + " of the " + first.relation + " of " +
                  first.subject + "?";
    qa.answer = second.object;
    qa.evidence = {first, second};
    qa.hop_count = 2;
    out.push_back(std::move(qa));
  }
  return out;
}

// Brute-force completion oracle: linear scans over the raw triple list,
// results sorted by entity sequence.
inline void brute_force_extend(const std::vector<SurfaceTriple>& triples,
                               const std::vector<std::string>& relations,
                               std::vector<std::string>& entities,
                               std::vector<std::vector<std::string>>& out) {
  const std::size_t depth = entities.size() - 1;
  if (depth == relations.size()) {
    out.push_back(entities);
    return;
  }
  std::set<std::string> objects;
  for (const auto& t : triples)
    if (t.subject == entities.back() && t.relation == relations[depth]) objects.insert(t.object);
  for (const auto& o : objects) {
    entities.push_back(o);
    brute_force_extend(triples, relations, entities, out);
    entities.pop_back();
  }
}

inline std::vector<WalkPath> brute_force_completions(const std::vector<SurfaceTriple>& triples,
                                                     const WalkQuery& q) {
  std::vector<std::vector<std::string>> sequences;
  std::vector<std::string> entities{q.seed};
  brute_force_extend(triples, q.relations, entities, sequences);
  std::sort(sequences.begin(), sequences.end());
  std::vector<WalkPath> out;
  for (auto& s : sequences) out.push_back(WalkPath{std::move(s), q.relations});
  return out;
}

inline std::string to_tsv(const std::vector<SurfaceTriple>& triples) {
  std::ostringstream out;
  for (const auto& t : triples) out << t.subject << '\t' << t.relation << '\t' << t.object << '\n';
  return out.str();
}

}  // namespace kgwalk::testing
