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

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int status = -1;
  std::string out;
};

Result shell(const std::string& cmd) {
  Result r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int raw = ::pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

Result run(const std::string& args) {
  return shell(std::string(KGWALK_CLI) + " " + args + " 2>/dev/null");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kgwalk_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string at(const std::string& name) const { return (dir_ / name).string(); }
  std::string kg() const { return std::string(KGWALK_SAMPLES_DIR) + "/kg.tsv"; }
  std::string questions() const { return std::string(KGWALK_SAMPLES_DIR) + "/questions.jsonl"; }
  fs::path dir_;
};

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("bogus").status, 1);
  EXPECT_EQ(run("walks sample --kg " + kg() + " --out " + at("c.jsonl")).status, 1);
  EXPECT_EQ(run("walks sample --kg " + kg() + " --seed 1 --out " + at("c.jsonl") + " --no-such-flag").status, 1);
  EXPECT_EQ(run("--help").status, 0);
}

TEST_F(CliTest, ValidationAndIoErrors) {
  EXPECT_EQ(run("kg validate --kg " + kg()).status, 0);
  std::ofstream(at("bad.tsv")) << "a\tr\n";
  EXPECT_EQ(run("kg validate --kg " + at("bad.tsv")).status, 1);
  std::ofstream(at("delim.tsv")) << "a ; b\tr\tc\n";
  EXPECT_EQ(run("kg validate --kg " + at("delim.tsv")).status, 1);
  EXPECT_EQ(run("kg validate --kg " + at("missing.tsv")).status, 2);
}

TEST_F(CliTest, StatsJson) {
  auto r = run("kg stats --kg " + kg());
  ASSERT_EQ(r.status, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["triples"], 20);
  EXPECT_EQ(j["entities"], 23);
}

TEST_F(CliTest, SampleIsReproducibleAndManifested) {
  const std::string base = "walks sample --kg " + kg() + " --length 3 --cap 20 --rounds 5 --seed 7 ";
  ASSERT_EQ(run(base + "--out " + at("a/corpus.jsonl")).status, 0);
  const std::string first = slurp(at("a/corpus.jsonl"));
  const json m1 = json::parse(slurp(at("a/manifest.json")));
  ASSERT_EQ(run(base + "--out " + at("a/corpus.jsonl")).status, 0);
  const json m2 = json::parse(slurp(at("a/manifest.json")));
  EXPECT_EQ(slurp(at("a/corpus.jsonl")), first);
  EXPECT_EQ(m1["run"], m2["run"]);
  EXPECT_TRUE(m1.contains("timing"));
  ASSERT_EQ(run(base + "--jobs 4 --out " + at("b/corpus.jsonl")).status, 0);
  EXPECT_EQ(slurp(at("b/corpus.jsonl")), first);
  EXPECT_FALSE(first.empty());

  // The digest is checked against an external tool.
  auto sum = shell("sha256sum " + kg());
  const std::string digest = sum.out.substr(0, 64);
  EXPECT_EQ(m1["run"]["inputs"][kg()], "sha256:" + digest);
  EXPECT_EQ(m1["run"]["config"]["--seed"], "7");
  EXPECT_EQ(m1["run"]["counts"]["walks"].get<std::size_t>(),
            static_cast<std::size_t>(std::count(first.begin(), first.end(), '\n')));
}

TEST_F(CliTest, SplitKeepsHeldOutTriplesOutOfTrain) {
  ASSERT_EQ(run("walks sample --kg " + kg() + " --seed 3 --out " + at("corpus.jsonl")).status, 0);
  const std::string samples = KGWALK_SAMPLES_DIR;
  ASSERT_EQ(run("walks split --walks " + at("corpus.jsonl") + " --qa-val " + samples + "/qa_val.jsonl --qa-test " +
                samples + "/qa_test.jsonl --out-dir " + at("split"))
                .status,
            0);
  const std::string train = slurp(at("split/train.jsonl"));
  EXPECT_EQ(train.find("David Beckham ; daughter ; Harper Beckham"), std::string::npos);
  EXPECT_EQ(train.find("Alain Corneau ; place of burial"), std::string::npos);
  EXPECT_NE(slurp(at("split/test.jsonl")).find("New World"), std::string::npos);
  EXPECT_TRUE(fs::exists(at("split/manifest.json")));
}

TEST_F(CliTest, EmptyPredictionsScoreZero) {
  std::ofstream(at("empty.jsonl")).flush();
  auto r = run("eval qa --gold " + questions() + " --pred " + at("empty.jsonl"));
  ASSERT_EQ(r.status, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["metrics"]["em"], 0.0);
  EXPECT_EQ(j["diagnostics"]["missing-prediction"], 5);
}

TEST_F(CliTest, PathPipelineWithOracle) {
  auto r = run("pipeline path --questions " + questions() + " --parse-adapter gold --hop-adapter oracle --kg " +
               kg() + " --out-dir " + at("pp"));
  ASSERT_EQ(r.status, 0);
  auto report = json::parse(slurp(at("pp/report.json")));
  EXPECT_EQ(report["metrics"]["em"], 100.0);
  EXPECT_EQ(report["metrics"]["parse_full_em"], 100.0);
  EXPECT_NE(slurp(at("pp/predictions.jsonl")).find(R"({"id":"beckham","output":"Los Angeles"})"), std::string::npos);
  EXPECT_TRUE(fs::exists(at("pp/manifest.json")));
  EXPECT_EQ(run("pipeline path --questions " + questions() + " --parse-adapter oracle --hop-adapter oracle --kg " + kg()).status, 1);
}

TEST_F(CliTest, ChildAdapterFailureExitsTwo) {
  EXPECT_EQ(run("pipeline path --questions " + questions() + " --parse-adapter 'cmd:exit 3' --hop-adapter oracle --kg " + kg()).status, 2);
  std::ofstream(at("partial.jsonl")) << R"({"id":"beckham","output":"Los Angeles"})" << "\n";
  EXPECT_EQ(run("pipeline mixhop --questions " + questions() + " --adapter replay:" + at("partial.jsonl")).status, 2);
}

TEST_F(CliTest, MixtureFromTaskFiles) {
  ASSERT_EQ(run("mixture tasks --kind qa --qa " + questions() + " --out " + at("t/qa.jsonl")).status, 0);
  ASSERT_EQ(run("mixture tasks --kind ki --kg " + kg() + " --out " + at("t/ki.jsonl")).status, 0);
  ASSERT_EQ(run("mixture build --component qa=" + at("t/qa.jsonl") + ":0.5 --component ki=" + at("t/ki.jsonl") +
                ":0.5 --epoch-size 10 --seed 2 --out " + at("m/epoch.jsonl"))
                .status,
            0);
  const std::string epoch = slurp(at("m/epoch.jsonl"));
  EXPECT_EQ(std::count(epoch.begin(), epoch.end(), '\n'), 10);
  auto m = json::parse(slurp(at("m/manifest.json")));
  EXPECT_EQ(m["run"]["counts"]["per_component"]["qa"], 5);
  EXPECT_EQ(run("mixture build --component qa=" + at("t/qa.jsonl") + ":0.7 --epoch-size 10 --seed 2 --out " +
                at("m/x.jsonl"))
                .status,
            1);
}

TEST_F(CliTest, OracleCompleteAndSimulate) {
  auto r = run("oracle complete --kg " + kg() + " --query 'David Beckham ; daughter ; place of birth'");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "David Beckham ; daughter ; Harper Beckham ; place of birth ; Los Angeles\n");
  EXPECT_EQ(run("oracle complete --kg " + kg() + " --query 'Inception ; director ; spouse'").status, 1);

  std::ofstream(at("req.jsonl")) << R"({"id":"1","task":"hop","input":"David Beckham ; daughter ; place of birth"})"
                                 << "\n";
  auto zero = run("simulate noisy --kg " + kg() + " --requests " + at("req.jsonl") + " --seed 1");
  auto oracle = run("oracle complete --kg " + kg() + " --requests " + at("req.jsonl"));
  ASSERT_EQ(zero.status, 0);
  EXPECT_EQ(zero.out, oracle.out);
}

TEST_F(CliTest, OnehopFromSplits) {
  const std::string samples = KGWALK_SAMPLES_DIR;
  ASSERT_EQ(run("onehop generate --templates " + std::string(KGWALK_DATA_DIR) +
                "/relation_templates.jsonl --seed 1 --qa-train " + samples + "/qa_train.jsonl --qa-val " + samples +
                "/qa_train.jsonl --qa-test " + samples + "/qa_train.jsonl --out-dir " + at("oh"))
                .status,
            0);
  EXPECT_NE(slurp(at("oh/test.jsonl")).find("Christopher Nolan"), std::string::npos);
  EXPECT_EQ(slurp(at("oh/train.jsonl")), "");
}

TEST_F(CliTest, FileModeMatchesLiveRun) {
  ASSERT_EQ(run("pipeline requests --questions " + questions() + " --out " + at("req.jsonl")).status, 0);
  EXPECT_NE(slurp(at("req.jsonl")).find(R"("task":"parse")"), std::string::npos);
  ASSERT_EQ(run("pipeline path --questions " + questions() + " --parse-adapter gold --hop-adapter oracle --kg " +
                kg() + " --out-dir " + at("live"))
                .status,
            0);
  ASSERT_EQ(run("oracle complete --kg " + kg() + " --requests " + at("live/hop_requests.jsonl") + " --out " +
                at("hops.jsonl"))
                .status,
            0);
  ASSERT_EQ(run("pipeline path --questions " + questions() + " --parse-adapter replay:" + at("live/parses.jsonl") +
                " --hop-adapter replay:" + at("hops.jsonl") + " --out-dir " + at("replayed"))
                .status,
            0);
  EXPECT_EQ(slurp(at("replayed/paths.jsonl")), slurp(at("live/paths.jsonl")));
  EXPECT_EQ(slurp(at("replayed/report.json")), slurp(at("live/report.json")));
}

}  // namespace
