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

#include <map>
#include <sstream>

#include "kgwalk/mixture_builder.hpp"
#include "support/fixtures.hpp"

namespace kgwalk {
namespace {

std::vector<TaskInstance> stream(const std::string& name, int n) {
  std::vector<TaskInstance> out;
  for (int i = 0; i < n; ++i)
    out.push_back({name + std::to_string(i), TaskKind::kQa, "in", "out", nullptr});
  return out;
}

std::map<std::string, std::size_t> count_by_prefix(const Mixture& m) {
  std::map<std::string, std::size_t> out;
  for (const auto& t : m.items) out[t.id.substr(0, 1)]++;
  return out;
}

MixtureSpec half_half(std::size_t epoch, std::uint64_t seed = 1) {
  return {{{"a", 0.5}, {"b", 0.5}}, seed, epoch};
}

TEST(MakeTaskInstances, KnowledgeIntegration) {
  auto tasks = make_ki_instances(std::vector<SurfaceTriple>{{"Inception", "director", "Christopher Nolan"}});
  ASSERT_EQ(tasks.size(), 1u);
  EXPECT_EQ(tasks[0].input, "Inception ; director");
  EXPECT_EQ(tasks[0].target, "Christopher Nolan");
  EXPECT_EQ(tasks[0].task, TaskKind::kKi);
}

TEST(MakeTaskInstances, Walk) {
  WalkRecord w{"w0", {{"Violet Tendencies", "Casper Andreas", "Sweden"}, {"director", "place of birth"}},
               "Violet Tendencies", 0};
  auto tasks = make_walk_instances({w});
  EXPECT_EQ(tasks[0].input, "Violet Tendencies ; director ; place of birth");
  EXPECT_EQ(tasks[0].target, "Violet Tendencies ; director ; Casper Andreas ; place of birth ; Sweden");
}

TEST(MakeTaskInstances, QuestionTasks) {
  const auto qs = testing::example_questions();
  auto parse = make_qa_instances({qs[0]}, TaskKind::kParse);
  EXPECT_EQ(parse[0].input, "Where was David Beckham's daughter born?");
  EXPECT_EQ(parse[0].target, "David Beckham ; daughter ; place of birth");
  EXPECT_EQ(make_qa_instances({qs[0]}, TaskKind::kQa)[0].target, "Los Angeles");
  EXPECT_EQ(make_qa_instances({qs[0]}, TaskKind::kMixhopQa)[0].target,
            "David Beckham ; daughter ; Harper Beckham ; place of birth ; Los Angeles");
}

TEST(MakeTaskInstances, UnchainedEvidenceRejected) {
  QAInstance broken{"x", "?", "c", {{"a", "r", "b"}, {"z", "r", "c"}}, 2};
  EXPECT_THROW(make_qa_instances({broken}, TaskKind::kParse), ValidationError);
  EXPECT_THROW(make_qa_instances({broken}, TaskKind::kMixhopQa), ValidationError);
  EXPECT_NO_THROW(make_qa_instances({broken}, TaskKind::kQa));
}

TEST(MakeTaskInstances, TargetsParseIntoDeclaredShapes) {
  auto kg = KnowledgeGraph::from_surfaces(testing::random_triples(50, 3, 150, 3));
  for (const auto& t : make_ki_instances(kg)) {
    EXPECT_EQ(parse_segments(t.input).shape, Shape::kQuery);
    EXPECT_EQ(parse_segments(t.target).shape, Shape::kAnswerOnly);
  }
  for (const auto& t : make_qa_instances(testing::example_questions(), TaskKind::kMixhopQa))
    EXPECT_EQ(parse_segments(t.target).shape, Shape::kFullWalk);
}

TEST(BuildMixture, ExactHalves) {
  auto m = build_mixture({{"a", stream("a", 3)}, {"b", stream("b", 3)}}, half_half(6));
  EXPECT_EQ(m.items.size(), 6u);
  EXPECT_EQ(count_by_prefix(m), (std::map<std::string, std::size_t>{{"a", 3}, {"b", 3}}));
}

TEST(BuildMixture, ShortStreamCycles) {
  auto m = build_mixture({{"a", stream("a", 2)}, {"b", stream("b", 10)}}, half_half(10));
  EXPECT_EQ(count_by_prefix(m), (std::map<std::string, std::size_t>{{"a", 5}, {"b", 5}}));
  std::map<std::string, int> a_ids;
  for (const auto& t : m.items)
    if (t.id[0] == 'a') a_ids[t.id]++;
  EXPECT_EQ(a_ids.size(), 2u);
}

TEST(BuildMixture, ProportionWithinOne) {
  for (std::size_t epoch : {1u, 7u, 101u, 1000u}) {
    MixtureSpec spec{{{"a", 0.3}, {"b", 0.45}, {"c", 0.25}}, 9, epoch};
    auto m = build_mixture({{"a", stream("a", 4)}, {"b", stream("b", 5)}, {"c", stream("c", 6)}}, spec);
    EXPECT_EQ(m.items.size(), epoch);
    for (const auto& c : spec.components)
      EXPECT_LE(std::abs(static_cast<double>(m.counts.at(c.name)) -
                         c.proportion * static_cast<double>(epoch)),
                1.0);
  }
}

TEST(BuildMixture, DeterministicAndOrderIndependent) {
  std::map<std::string, std::vector<TaskInstance>> streams{{"a", stream("a", 7)}, {"b", stream("b", 4)}};
  auto m1 = build_mixture(streams, half_half(20, 5));
  auto m2 = build_mixture(streams, MixtureSpec{{{"b", 0.5}, {"a", 0.5}}, 5, 20});
  EXPECT_EQ(m1.items, m2.items);
  EXPECT_NE(m1.items, build_mixture(streams, half_half(20, 6)).items);
}

TEST(BuildMixture, Errors) {
  EXPECT_THROW(build_mixture({{"a", stream("a", 2)}, {"b", {}}}, half_half(4)), ValidationError);
  EXPECT_THROW(build_mixture({{"a", stream("a", 2)}}, half_half(4)), ValidationError);
  EXPECT_THROW(build_mixture({{"a", stream("a", 2)}, {"b", stream("b", 2)}},
                             MixtureSpec{{{"a", 0.5}, {"b", 0.6}}, 1, 4}),
               ConfigError);
}

TEST(TaskRecords, JsonRoundTrip) {
  auto tasks = make_qa_instances(testing::example_questions(), TaskKind::kParse);
  std::stringstream buf;
  write_tasks(buf, tasks);
  EXPECT_EQ(read_tasks(buf), tasks);
}

}  // namespace
}  // namespace kgwalk
