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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "kgwalk/kg_store.hpp"
#include "support/fixtures.hpp"

namespace kgwalk {
namespace {

KnowledgeGraph load_tsv(const std::string& text) {
  std::istringstream in(text);
  return load_triples(in, TripleFormat::kTsv);
}

TEST(LoadTriples, SingleTsvLine) {
  auto kg = load_tsv("Inception\tdirector\tChristopher Nolan\n");
  EXPECT_EQ(kg.stats(), (GraphStats{2, 1, 1}));
  EXPECT_TRUE(kg.contains("Inception", "director", "Christopher Nolan"));
}

TEST(LoadTriples, EmptyStream) {
  auto kg = load_tsv("");
  EXPECT_EQ(kg.stats(), (GraphStats{0, 0, 0}));
  EXPECT_TRUE(kg.empty());
}

TEST(LoadTriples, DuplicateLinesAreDropped) {
  auto kg = load_tsv("a\tr\tb\na\tr\tb\n");
  EXPECT_EQ(kg.stats().triples, 1u);
  EXPECT_EQ(kg.duplicates_dropped(), 1u);
}

TEST(LoadTriples, WrongFieldCountReportsLine) {
  try {
    load_tsv("a\tr\tb\na\tr\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(load_tsv("a\tr\tb\tc\n"), ParseError);
}

TEST(LoadTriples, RejectsDelimiterAndEmptyFields) {
  try {
    load_tsv("a ; b\tr\tc\n");
    FAIL() << "expected rejection";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("subject"), std::string::npos);
  }
  EXPECT_THROW(load_tsv("a\t\tc\n"), ParseError);
  EXPECT_THROW(load_tsv(" a\tr\tc\n"), ParseError);
  EXPECT_THROW(load_tsv("a ;\tr\tc\n"), ParseError);
  EXPECT_THROW(load_tsv("a\tr\t; c\n"), ParseError);
  EXPECT_THROW(load_tsv("a\tr\t\xff\n"), ParseError);
  // A bare semicolon is not the delimiter.
  EXPECT_NO_THROW(load_tsv("a;b\tr\tc ;; d\n"));
}

TEST(LoadTriples, JsonLines) {
  std::istringstream in(R"({"s":"Inception","r":"director","o":"Christopher Nolan"})" "\n"
                        R"({"s":"Inception","r":"director","o":"Christopher Nolan"})" "\n");
  auto kg = load_triples(in, TripleFormat::kJsonLines);
  EXPECT_EQ(kg.stats(), (GraphStats{2, 1, 1}));
  EXPECT_EQ(kg.duplicates_dropped(), 1u);

  std::istringstream bad(R"({"s":"a","r":"b"})" "\n");
  EXPECT_THROW(load_triples(bad, TripleFormat::kJsonLines), ParseError);
}

TEST(Neighbors, ExampleGraph) {
  auto kg = testing::example_kg();
  auto edges = kg.neighbors(kg.entity("Violet Tendencies"));
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(kg.surface(edges[0].relation), "director");
  EXPECT_EQ(kg.surface(edges[0].object), "Casper Andreas");
  EXPECT_TRUE(kg.neighbors(kg.entity("Sweden")).empty());
  EXPECT_THROW(kg.entity("Nowhere"), LookupError);
  EXPECT_THROW(kg.neighbors(EntityId{999}), LookupError);
}

TEST(Neighbors, ChainMiddleHasOneEdge) {
  auto kg = load_tsv("a\tr\tb\nb\tr\tc\nc\tr\td\n");
  EXPECT_EQ(kg.neighbors(kg.entity("b")).size(), 1u);
}

TEST(Neighbors, SortedBySurfaces) {
  auto kg = load_tsv("x\tzeta\tb\nx\talpha\tz\nx\talpha\ta\nx\tmid\tq\n");
  auto edges = kg.neighbors(kg.entity("x"));
  std::vector<std::pair<std::string, std::string>> seen;
  for (const auto& e : edges) seen.emplace_back(kg.surface(e.relation), kg.surface(e.object));
  EXPECT_EQ(seen, (std::vector<std::pair<std::string, std::string>>{
                      {"alpha", "a"}, {"alpha", "z"}, {"mid", "q"}, {"zeta", "b"}}));
}

TEST(ContainsTriple, Directed) {
  auto kg = load_tsv("s\tr\to\n");
  EXPECT_TRUE(kg.contains("s", "r", "o"));
  EXPECT_FALSE(kg.contains("o", "r", "s"));
  EXPECT_FALSE(kg.contains("s", "missing", "o"));
}

TEST(ContainsTriple, AgreesWithLinearScan) {
  const auto triples = testing::random_triples(30, 4, 100, 11);
  auto kg = KnowledgeGraph::from_surfaces(triples);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    SurfaceTriple probe{testing::entity_name(rng() % 30), testing::relation_name(rng() % 4),
                        testing::entity_name(rng() % 30)};
    const bool scan = std::find(triples.begin(), triples.end(), probe) != triples.end();
    EXPECT_EQ(kg.contains(probe), scan);
  }
}

TEST(Stats, TenEntityChain) {
  std::string text;
  for (int i = 0; i < 9; ++i)
    text += "e" + std::to_string(i) + "\tnext\te" + std::to_string(i + 1) + "\n";
  EXPECT_EQ(load_tsv(text).stats(), (GraphStats{10, 1, 9}));
}

TEST(Index, RoundTripsEveryTriple) {
  const auto triples = testing::random_triples(200, 6, 1500, 3);
  auto kg = KnowledgeGraph::from_surfaces(triples);
  std::size_t edges = 0;
  for (const auto& t : kg.triples()) {
    const auto out = kg.successors(t.subject, t.relation);
    EXPECT_TRUE(std::any_of(out.begin(), out.end(),
                            [&](const Edge& e) { return e.object == t.object; }));
  }
  for (EntityId e : kg.entities_by_surface()) {
    for (const Edge& edge : kg.neighbors(e)) {
      EXPECT_TRUE(kg.contains(Triple{e, edge.relation, edge.object}));
      ++edges;
    }
  }
  EXPECT_EQ(edges, kg.triples().size());
}

TEST(Index, DeterministicAcrossLoads) {
  const std::string text = testing::to_tsv(testing::random_triples(50, 3, 200, 8));
  auto a = load_tsv(text);
  auto b = load_tsv(text);
  ASSERT_EQ(a.triples(), b.triples());
  for (EntityId e : a.entities_by_surface()) {
    const auto ea = a.neighbors(e);
    const auto eb = b.neighbors(e);
    EXPECT_TRUE(std::equal(ea.begin(), ea.end(), eb.begin(), eb.end()));
  }
}

TEST(DelimiterSafety, NoStoredSurfaceContainsDelimiter) {
  auto kg = KnowledgeGraph::from_surfaces(testing::random_triples(100, 5, 300, 2));
  for (EntityId e : kg.entities_by_surface())
    EXPECT_EQ(kg.surface(e).find(" ; "), std::string::npos);
}

}  // namespace
}  // namespace kgwalk
