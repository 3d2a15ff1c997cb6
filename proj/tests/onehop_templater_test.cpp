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

#include <cmath>
#include <map>
#include <sstream>

#include "kgwalk/onehop_templater.hpp"
#include "support/fixtures.hpp"

namespace kgwalk {
namespace {

TemplateTable shipped_table() {
  auto in = io::open_input(KGWALK_DATA_DIR "/relation_templates.jsonl");
  return read_template_table(in);
}

TEST(RenderTemplate, ReplacesPlaceholder) {
  EXPECT_EQ(render_template("Who is the director of X?", "Inception"),
            "Who is the director of Inception?");
  EXPECT_EQ(render_template("X", "Paris"), "Paris");
  EXPECT_EQ(render_template("Where did X die?", "Alain Corneau"), "Where did Alain Corneau die?");
  EXPECT_EQ(render_template("Who is X's mother?", "Harriet Hemings"),
            "Who is Harriet Hemings's mother?");
}

TEST(RenderTemplate, SubjectIsInsertedVerbatim) {
  EXPECT_EQ(render_template("Who directed the film X?", "X-Men (film)"),
            "Who directed the film X-Men (film)?");
}

TEST(RenderTemplate, PlaceholderCountErrors) {
  EXPECT_THROW(render_template("Who is it?", "a"), ValidationError);
  EXPECT_THROW(render_template("X and X", "a"), ValidationError);
  // Letters inside words are not placeholders.
  EXPECT_THROW(render_template("Xavier met XX", "a"), ValidationError);
}

TEST(TemplateTable, ShippedTableCoversAllRelations) {
  auto table = shipped_table();
  EXPECT_EQ(table.size(), 29u);
  ASSERT_NE(table.find("date of birth"), nullptr);
  EXPECT_EQ(table.find("date of birth")->size(), 3u);
  EXPECT_EQ(table.find("director")->front(), "Who is the director of X?");
  EXPECT_EQ(table.find("inception")->size(), 1u);
}

TEST(TemplateTable, RejectsBadRows) {
  std::istringstream no_x(R"({"relation":"r","templates":["no placeholder"]})");
  EXPECT_THROW(read_template_table(no_x), ParseError);
  std::istringstream empty(R"({"relation":"r","templates":[]})");
  EXPECT_THROW(read_template_table(empty), ParseError);
}

TEST(GenerateOnehop, InceptionExample) {
  auto table = shipped_table();
  auto qas = generate_onehop({{"Inception", "director", "Christopher Nolan"}}, table, 1);
  ASSERT_EQ(qas.size(), 1u);
  EXPECT_TRUE(qas[0].question == "Who is the director of Inception?" ||
              qas[0].question == "Who directed the film Inception?");
  EXPECT_EQ(qas[0].answer, "Christopher Nolan");
  EXPECT_EQ(qas[0].hop_count, 1);
  EXPECT_EQ(qas[0].evidence.size(), 1u);
}

TEST(GenerateOnehop, SingleTemplateAlwaysChosen) {
  TemplateTable table;
  table.add("inception", {"When was X founded?"});
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    EXPECT_EQ(generate_onehop({{"Acme", "inception", "1901"}}, table, seed)[0].question,
              "When was Acme founded?");
}

TEST(GenerateOnehop, UncoveredRelationNamed) {
  TemplateTable table;
  table.add("director", {"Who directed X?"});
  try {
    generate_onehop({{"a", "spouse", "b"}}, table, 0);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("spouse"), std::string::npos);
  }
}

TEST(GenerateOnehop, DeduplicatesAndIsDeterministic) {
  auto table = shipped_table();
  std::vector<SurfaceTriple> triples{{"a", "father", "b"}, {"a", "father", "b"}, {"c", "mother", "d"}};
  auto first = generate_onehop(triples, table, 42);
  EXPECT_EQ(first.size(), 2u);
  EXPECT_EQ(first, generate_onehop(triples, table, 42));
  for (const auto& qa : first) EXPECT_EQ(qa.answer, qa.evidence.back().object);
}

TEST(GenerateOnehop, TemplateFrequencyIsUniform) {
  auto table = shipped_table();
  std::vector<SurfaceTriple> triples;
  for (int i = 0; i < 9000; ++i) triples.push_back({"P" + std::to_string(i), "educated at", "U"});
  std::map<std::string, int> counts;
  for (const auto& qa : generate_onehop(triples, table, 7)) {
    for (const char* word : {"graduate", "alma", "study"})
      if (qa.question.find(word) != std::string::npos) counts[word]++;
  }
  ASSERT_EQ(counts.size(), 3u);
  const double n = 9000.0;
  const double sigma = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
  for (const auto& [prefix, c] : counts) EXPECT_LT(std::abs(c - n / 3), 5 * sigma) << prefix;
}

TEST(GenerateOnehopSplits, PrecedenceTestOverValOverTrain) {
  auto table = shipped_table();
  QAInstance tr{"tr", "?", "c", {{"a", "father", "b"}, {"b", "mother", "c"}}, 2};
  QAInstance va{"va", "?", "e", {{"b", "mother", "c"}, {"c", "spouse", "e"}}, 2};
  QAInstance te{"te", "?", "f", {{"c", "spouse", "e"}, {"e", "child", "f"}}, 2};
  auto splits = generate_onehop_splits({tr}, {va}, {te}, table, 3);
  ASSERT_EQ(splits.train.size(), 1u);
  EXPECT_EQ(splits.train[0].evidence[0], (SurfaceTriple{"a", "father", "b"}));
  ASSERT_EQ(splits.validation.size(), 1u);
  EXPECT_EQ(splits.validation[0].evidence[0], (SurfaceTriple{"b", "mother", "c"}));
  EXPECT_EQ(splits.test.size(), 2u);
}

}  // namespace
}  // namespace kgwalk
