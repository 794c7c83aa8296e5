// Copyright 2026 The qweval Authors.
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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"

namespace qweval {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    previous_ = fs::current_path();
    fs::current_path(QWEVAL_TEST_DATA);
    tmp_ = fs::temp_directory_path() /
           ("qweval_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(tmp_);
    fs::create_directories(tmp_);
  }
  void TearDown() override {
    fs::current_path(previous_);
    fs::remove_all(tmp_);
  }

  CliResult invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "qweval");
    std::ostringstream out, err;
    CliResult r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
  }

  std::string tmp(const std::string& name) const { return (tmp_ / name).string(); }

  std::string slurp(const std::string& path) const {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  /// Compares with golden/<name>, after replacing the scratch directory.
  void expect_golden(const std::string& name, std::string actual) {
    const auto scratch = tmp_.string();
    for (auto pos = actual.find(scratch); pos != std::string::npos;
         pos = actual.find(scratch, pos)) {
      actual.replace(pos, scratch.size(), "$TMP");
    }
    const auto path = "golden/" + name;
    if (std::getenv("QWEVAL_UPDATE_GOLDEN")) {
      std::ofstream(path, std::ios::binary) << actual;
      return;
    }
    EXPECT_EQ(actual, slurp(path)) << "golden file " << path;
  }

  static std::vector<json> records(const std::string& jsonl) {
    std::vector<json> out;
    std::istringstream in(jsonl);
    std::string line;
    while (std::getline(in, line)) out.push_back(json::parse(line));
    return out;
  }

 private:
  fs::path previous_;
  fs::path tmp_;
};

const std::vector<std::string> kFixtureScore = {
    "score", "--corpus", "fixture_corpus.jsonl", "--candidates", "fixture_candidates.jsonl",
    "-m", "bleu-1,meteor,rouge-l", "-m", "cider"};

TEST_F(Cli, ScoreFixtureMatchesHandComputedValues) {
  const auto r = invoke(kFixtureScore);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto recs = records(r.out);
  ASSERT_EQ(recs.size(), 6u);
  EXPECT_EQ(recs[0]["type"], "header");
  EXPECT_EQ(recs[0]["config"]["quality_map"], "(mean_grade - 1) / 4");
  EXPECT_NEAR(recs[1]["scores"]["W-BLEU-1"].get<double>(), 2.5 / 3.0, 1e-9);
  EXPECT_NEAR(recs[2]["scores"]["W-METEOR"].get<double>(), 0.9921875, 1e-9);
  EXPECT_NEAR(recs[3]["scores"]["W-METEOR"].get<double>(), 0.49609375, 1e-9);
  EXPECT_NEAR(recs[4]["scores"]["W-ROUGE-L"].get<double>(), 0.75, 1e-9);
  EXPECT_EQ(recs[5]["type"], "corpus");
  expect_golden("score_fixture.jsonl", r.out);

  auto table = kFixtureScore;
  table.insert(table.end(), {"--format", "table"});
  expect_golden("score_fixture.table", invoke(table).out);
}

TEST_F(Cli, ScoreSampleCorpus) {
  const auto r = invoke({"score", "--corpus", "corpus.jsonl", "--candidates", "candidates.jsonl",
                      "-m", "bleu-2,meteor,rouge-l,cider"});
  ASSERT_EQ(r.code, 0) << r.err;
  expect_golden("score_sample.jsonl", r.out);
}

TEST_F(Cli, UnweightedEqualsWeightedWhenAllGradesAreFive) {
  const std::string corpus = tmp("fives.jsonl");
  std::ofstream(corpus)
      << R"({"id":"a","title":["t"],"content":[],"category":"c","comments":[)"
         R"({"tokens":["x","y","z"],"upvotes":1,"grades":[5,5]},)"
         R"({"tokens":["y","q"],"upvotes":1,"grades":[5,5]}]})"
      << "\n";
  const std::string cands = tmp("c.jsonl");
  std::ofstream(cands) << R"({"article_id":"a","candidate_id":"s","tokens":["x","y","q"]})"
                       << "\n";
  const auto w = records(invoke({"score", "--corpus", corpus, "--candidates", cands}).out);
  const auto u =
      records(invoke({"score", "--corpus", corpus, "--candidates", cands, "--unweighted"}).out);
  ASSERT_EQ(w.size(), u.size());
  for (std::size_t i = 1; i < w.size(); ++i) {
    std::vector<double> a, b;
    for (const auto& [k, v] : w[i]["scores"].items()) a.push_back(v.get<double>());
    for (const auto& [k, v] : u[i]["scores"].items()) b.push_back(v.get<double>());
    EXPECT_EQ(a, b);
  }
}

TEST_F(Cli, WeightedScoringRefusesUngradedReferences) {
  const auto r = invoke({"score", "--corpus", "ungraded_corpus.jsonl", "--candidates",
                      "ungraded_candidates.jsonl"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("comments[0]"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("'grades'"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());

  const auto assumed = invoke({"score", "--corpus", "ungraded_corpus.jsonl", "--candidates",
                            "ungraded_candidates.jsonl", "--assume-quality", "0.5"});
  EXPECT_EQ(assumed.code, 0) << assumed.err;
  EXPECT_EQ(records(assumed.out)[0]["config"]["assume_quality"], 0.5);
}

TEST_F(Cli, UnmatchedArticleIdIsReported) {
  const std::string cands = tmp("c.jsonl");
  std::ofstream(cands) << R"({"article_id":"nope","candidate_id":"s","tokens":["a"]})" << "\n";
  const auto r = invoke({"score", "--corpus", "corpus.jsonl", "--candidates", cands});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("c.jsonl:1: article id 'nope'"), std::string::npos) << r.err;
}

TEST_F(Cli, MalformedCorpusReportsLines) {
  const std::string corpus = tmp("bad.jsonl");
  std::ofstream(corpus) << "{}\n{\"id\":1}\n";
  const auto r = invoke({"stats", "--corpus", corpus});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(":1:"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find(":2:"), std::string::npos) << r.err;
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"score", "--corpus", "corpus.jsonl"}).code, 2);
  EXPECT_EQ(invoke({"retrieve", "--corpus", "x", "--queries", "y", "--mode", "body"}).code, 2);
  EXPECT_EQ(invoke({"score", "--corpus", "a", "--candidates", "b", "--weighted", "--unweighted"})
                .code,
            2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(Cli, Correlate) {
  const std::string report = tmp("metrics.jsonl");
  ASSERT_EQ(invoke({"score", "--corpus", "corpus.jsonl", "--candidates", "candidates.jsonl", "-m",
                 "bleu-2,meteor,rouge-l,cider", "-o", report})
                .code,
            0);
  const auto r = invoke({"correlate", "--human", "human.jsonl", "--metrics", report, "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  expect_golden("correlate.jsonl", r.out);
  const auto t = invoke({"correlate", "--human", "human.jsonl", "--metrics", report, "--seed", "7",
                      "--format", "table"});
  expect_golden("correlate.table", t.out);
  std::istringstream lines(t.out);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  std::getline(lines, line);
  EXPECT_EQ(line.substr(0, line.find_last_not_of(' ') + 1), "Metric     Spearman  Pearson");

  const auto extras = invoke({"correlate", "--human", "human.jsonl", "--metrics", report, "--seed",
                           "7", "--normalize", "--jitter-sigma", "0.05", "--pvalue",
                           "permutation", "--permutations", "500"});
  ASSERT_EQ(extras.code, 0) << extras.err;
  expect_golden("correlate_extras.jsonl", extras.out);
}

TEST_F(Cli, CorrelateIdentityColumnIsPerfect) {
  const std::string report = tmp("m.jsonl");
  std::ofstream m(report);
  m << R"({"type":"header"})" << "\n";
  const std::string human = tmp("h.jsonl");
  std::ofstream h(human);
  for (int i = 0; i < 6; ++i) {
    const double v = 1.0 + 0.5 * i * i;
    m << json{{"type", "instance"}, {"article_id", "a"}, {"candidate_id", std::to_string(i)},
              {"scores", {{"X", v}}}}
             .dump()
      << "\n";
    h << json{{"article_id", "a"}, {"candidate_id", std::to_string(i)}, {"score", v}}.dump()
      << "\n";
  }
  m.close();
  h.close();
  const auto r = records(invoke({"correlate", "--human", human, "--metrics", report}).out);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[1]["spearman"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(r[1]["pearson"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(r[0]["config"].count("seed"), 0u);
}

TEST_F(Cli, CorrelateJoinMismatchNamesIds) {
  const std::string report = tmp("m.jsonl");
  std::ofstream(report) << R"({"type":"instance","article_id":"zz","candidate_id":"S2S","scores":{"X":1}})"
                        << "\n";
  const auto r = invoke({"correlate", "--human", "human.jsonl", "--metrics", report});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("article 'zz' candidate 'S2S'"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("article 'a1' candidate 'IR-T'"), std::string::npos) << r.err;
}

TEST_F(Cli, StatsAgreementVocab) {
  expect_golden("stats.table", invoke({"stats", "--corpus", "corpus.jsonl", "--format", "table"}).out);
  expect_golden("stats.jsonl", invoke({"stats", "--corpus", "corpus.jsonl"}).out);
  expect_golden("agreement.table", invoke({"agreement", "--corpus", "corpus.jsonl", "--seed", "3",
                                        "--format", "table"})
                                       .out);
  const auto v = invoke({"vocab", "--corpus", "corpus.jsonl", "--cap", "10", "--vocab-out",
                      tmp("v.tsv"), "--corpus-out", tmp("c.jsonl")});
  ASSERT_EQ(v.code, 0) << v.err;
  expect_golden("vocab.jsonl", v.out);
  expect_golden("vocab.tsv", slurp(tmp("v.tsv")));
}

TEST_F(Cli, Retrieve) {
  const auto t = invoke({"retrieve", "--corpus", "corpus.jsonl", "--queries", "corpus.jsonl",
                      "--k", "2", "--candidates-out", tmp("ir.jsonl")});
  ASSERT_EQ(t.code, 0) << t.err;
  expect_golden("retrieve_title.jsonl", t.out);
  expect_golden("retrieve_candidates.jsonl", slurp(tmp("ir.jsonl")));
  const auto tc = invoke({"retrieve", "--corpus", "corpus.jsonl", "--queries", "corpus.jsonl",
                       "--mode", "title-content", "--format", "table", "--index-out",
                       tmp("idx.jsonl")});
  ASSERT_EQ(tc.code, 0) << tc.err;
  expect_golden("retrieve_title_content.table", tc.out);
  const auto reloaded = invoke({"retrieve", "--corpus", "corpus.jsonl", "--queries", "corpus.jsonl",
                             "--mode", "title-content", "--format", "table", "--index",
                             tmp("idx.jsonl")});
  EXPECT_EQ(reloaded.out, tc.out);
  const auto wrong_mode = invoke({"retrieve", "--corpus", "corpus.jsonl", "--queries",
                               "corpus.jsonl", "--index", tmp("idx.jsonl")});
  EXPECT_EQ(wrong_mode.code, 1);
}

TEST_F(Cli, SeededCommandsAreByteIdentical) {
  for (int round = 0; round < 2; ++round) {
    const auto suffix = std::to_string(round);
    ASSERT_EQ(invoke({"split", "--corpus", "corpus.jsonl", "--sizes", "2,1,1", "--prefix",
                   tmp("s" + suffix), "--seed", "11", "-o", tmp("split" + suffix)})
                  .code,
              0);
    ASSERT_EQ(invoke({"make-test-set", "--corpus", "corpus.jsonl", "--corpus-out",
                   tmp("t" + suffix), "--min-comments", "2", "--comment-tokens-over", "2",
                   "--upvotes-over", "5", "--sample-size", "2", "--seed", "11", "-o",
                   tmp("mt" + suffix)})
                  .code,
              0);
  }
  for (const char* part : {".train.jsonl", ".dev.jsonl", ".test.jsonl"}) {
    EXPECT_EQ(slurp(tmp(std::string("s0") + part)), slurp(tmp(std::string("s1") + part)));
  }
  EXPECT_EQ(slurp(tmp("t0")), slurp(tmp("t1")));
  expect_golden("make_test_set.jsonl", slurp(tmp("mt0")));
  EXPECT_NE(slurp(tmp("mt0")).find("\"seed\":11"), std::string::npos);
}

TEST_F(Cli, GeneratedSeedIsRecorded) {
  const auto r = invoke({"split", "--corpus", "corpus.jsonl", "--sizes", "1,1,1", "--prefix",
                      tmp("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto header = records(r.out)[0];
  EXPECT_TRUE(header["config"]["seed_generated"].get<bool>());
  EXPECT_TRUE(header["config"]["seed"].is_number_unsigned());
}

TEST_F(Cli, Filter) {
  const auto r = invoke({"filter", "--corpus", "corpus.jsonl", "--corpus-out", tmp("f.jsonl"),
                      "--min-content", "11", "--min-comments", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  expect_golden("filter.jsonl", r.out);
  const auto kept = slurp(tmp("f.jsonl"));
  EXPECT_NE(kept.find("\"id\":\"a1\""), std::string::npos);
  EXPECT_EQ(kept.find("\"id\":\"a2\""), std::string::npos);
}

}  // namespace
}  // namespace qweval
