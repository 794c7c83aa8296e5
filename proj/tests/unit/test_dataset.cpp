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

#include <set>
#include <sstream>
#include <stdexcept>

#include "qweval/dataset.hpp"
#include "support.hpp"

namespace qweval {
namespace {

TokenSeq words(std::size_t n, const std::string& stem = "w") {
  TokenSeq out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

Article article(std::string id, std::size_t content_len, std::size_t comments,
                std::size_t comment_len = 6, std::int64_t upvotes = 10) {
  Article a;
  a.id = std::move(id);
  a.title = {"title", a.id};
  a.content = words(content_len, "c");
  a.category = "news";
  for (std::size_t i = 0; i < comments; ++i) {
    a.comments.push_back({words(comment_len, "k"), upvotes, std::nullopt});
  }
  return a;
}

Article random_article(testing::Gen& g, std::size_t i) {
  Article a;
  a.id = "art" + std::to_string(i);
  a.title = testing::random_tokens(g, 1, 6, 20);
  a.content = testing::random_tokens(g, 0, 40, 30);
  a.category = "cat" + std::to_string(i % 3);
  const auto n = std::uniform_int_distribution<int>(0, 6)(g);
  for (int k = 0; k < n; ++k) {
    CommentRecord c{testing::random_tokens(g, 1, 12, 25),
                    std::uniform_int_distribution<std::int64_t>(0, 50)(g), std::nullopt};
    if (k % 2) {
      c.grades = std::array<int, 2>{std::uniform_int_distribution<int>(1, 5)(g),
                                    std::uniform_int_distribution<int>(1, 5)(g)};
    }
    a.comments.push_back(std::move(c));
  }
  return a;
}

TEST(Parse, EmptyStream) {
  std::istringstream in("");
  EXPECT_TRUE(parse_corpus(in).empty());
}

TEST(Parse, WellFormedRecord) {
  const auto a = parse_article(
      R"({"id":"x","title":["t"],"content":["a","b"],"category":"c",)"
      R"("comments":[{"tokens":["u"],"upvotes":3,"grades":[4,5]}]})");
  EXPECT_EQ(a.id, "x");
  EXPECT_EQ(a.content, (TokenSeq{"a", "b"}));
  ASSERT_EQ(a.comments.size(), 1u);
  EXPECT_EQ(a.comments[0].upvotes, 3);
  EXPECT_NEAR(*a.comments[0].quality(), 0.875, 1e-15);
}

TEST(Parse, GradeOutOfRangeNamesTheField) {
  try {
    parse_article(R"({"id":"x","title":["t"],"content":[],"category":"c",)"
                  R"("comments":[{"tokens":["u"],"upvotes":3,"grades":[4,6]}]})");
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("comments[0].grades[1]"), std::string::npos);
  }
}

TEST(Parse, RejectsNonIntegerUpvotesAndEmptyTitle) {
  EXPECT_THROW(parse_article(R"({"id":"x","title":["t"],"content":[],"category":"c",)"
                             R"("comments":[{"tokens":["u"],"upvotes":1.5}]})"),
               std::invalid_argument);
  EXPECT_THROW(parse_article(R"({"id":"x","title":[],"content":[],"category":"c","comments":[]})"),
               std::invalid_argument);
}

TEST(Parse, ReportsEveryIssueWithLineNumbers) {
  std::istringstream in(
      R"({"id":"a","title":["t"],"content":[],"category":"c","comments":[]})"
      "\n{not json}\n"
      R"({"id":"a","title":["t"],"content":[],"category":"c","comments":[]})"
      "\n");
  try {
    parse_corpus(in, "corpus.jsonl");
    FAIL() << "expected an error";
  } catch (const CorpusFormatError& e) {
    ASSERT_EQ(e.issues().size(), 2u);
    EXPECT_EQ(e.issues()[0].line, 2u);
    EXPECT_EQ(e.issues()[1].line, 3u);
    EXPECT_NE(e.issues()[1].message.find("duplicate"), std::string::npos);
  }
}

TEST(Parse, RoundTrip) {
  testing::Gen g(1);
  std::vector<Article> corpus;
  for (std::size_t i = 0; i < 30; ++i) corpus.push_back(random_article(g, i));
  std::ostringstream out;
  write_corpus(out, corpus);
  std::istringstream in(out.str());
  EXPECT_EQ(parse_corpus(in), corpus);
  for (const auto& a : corpus) EXPECT_EQ(parse_article(serialize_article(a)), a);
}

TEST(Filter, Boundaries) {
  EXPECT_FALSE(passes_filter(article("a", 29, 25)));
  EXPECT_TRUE(passes_filter(article("a", 30, 20)));
  EXPECT_FALSE(passes_filter(article("a", 30, 19)));
}

TEST(Filter, IdempotentAndExact) {
  testing::Gen g(2);
  std::vector<Article> corpus;
  std::size_t expected = 0;
  for (std::size_t i = 0; i < 60; ++i) {
    const auto content = std::uniform_int_distribution<std::size_t>(25, 35)(g);
    const auto comments = std::uniform_int_distribution<std::size_t>(15, 25)(g);
    expected += (content >= 30 && comments >= 20) ? 1 : 0;
    corpus.push_back(article("a" + std::to_string(i), content, comments, 2));
  }
  const auto once = filter_corpus(corpus);
  EXPECT_EQ(once.size(), expected);
  EXPECT_EQ(filter_corpus(once), once);
  for (const auto& a : once) EXPECT_TRUE(passes_filter(a));
}

TEST(TestSet, EligibilityBoundaries) {
  auto a = article("a", 40, 30, 6, 0);
  a.comments[0].upvotes = 201;
  EXPECT_TRUE(is_test_eligible(a));
  a.comments[0].upvotes = 200;
  EXPECT_FALSE(is_test_eligible(a));
  a.comments[0].upvotes = 201;
  a.comments[0].tokens = words(5);
  EXPECT_FALSE(is_test_eligible(a));
  a.comments.push_back({words(6), 0, std::nullopt});
  EXPECT_TRUE(is_test_eligible(a));
}

TEST(TestSet, SamplesExactlyTwentySevenDistinctComments) {
  std::vector<Article> corpus;
  for (int i = 0; i < 5; ++i) {
    auto a = article("a" + std::to_string(i), 40, 35 + i, 6, 7);
    for (std::size_t k = 0; k < a.comments.size(); ++k) a.comments[k].upvotes = 7 + k;
    corpus.push_back(a);
  }
  corpus.push_back(article("short", 40, 29, 6, 50));
  Rng r1(5), r2(5);
  const auto s1 = select_test_candidates(corpus, r1);
  const auto s2 = select_test_candidates(corpus, r2);
  ASSERT_EQ(s1.articles.size(), 5u);
  EXPECT_EQ(s1.articles, s2.articles);
  for (const auto& a : s1.articles) {
    ASSERT_EQ(a.comments.size(), 27u);
    std::set<std::int64_t> distinct;
    for (const auto& c : a.comments) distinct.insert(c.upvotes);
    EXPECT_EQ(distinct.size(), 27u);
  }
}

TEST(TestSet, ShortPoolIsSkippedWithWarning) {
  TestSetRules rules;
  rules.min_comments = 20;
  Rng rng(1);
  const auto s = select_test_candidates(std::vector<Article>{article("a", 40, 25, 6, 10)},
                                        rng, rules);
  EXPECT_TRUE(s.articles.empty());
  ASSERT_EQ(s.warnings.size(), 1u);
}

TEST(Stats, TwoArticles) {
  std::vector<Article> corpus = {article("a", 10, 27, 4, 2), article("b", 20, 27, 6, 4)};
  corpus[1].category = "sports";
  const auto s = corpus_stats(corpus);
  EXPECT_EQ(s.article_count, 2u);
  EXPECT_DOUBLE_EQ(s.comments_per_article, 27.0);
  EXPECT_DOUBLE_EQ(s.upvotes_per_comment, 3.0);
  EXPECT_DOUBLE_EQ(s.avg_content_len, 15.0);
  EXPECT_DOUBLE_EQ(s.avg_comment_len, 5.0);
  EXPECT_DOUBLE_EQ(s.avg_title_len, 2.0);
  // title, a, b, c0..c19, k0..k5
  EXPECT_EQ(s.vocab_size, 3u + 20u + 6u);
  EXPECT_EQ(s.category_histogram.at("news"), 1u);
  EXPECT_EQ(s.category_histogram.at("sports"), 1u);
}

TEST(Stats, MatchesBruteForceAndMergeOrder) {
  testing::Gen g(3);
  std::vector<Article> corpus;
  for (std::size_t i = 0; i < 80; ++i) corpus.push_back(random_article(g, i));
  double comments = 0, upvotes = 0, title = 0, content = 0, comment_len = 0;
  std::set<std::string> vocab;
  for (const auto& a : corpus) {
    title += a.title.size();
    content += a.content.size();
    vocab.insert(a.title.begin(), a.title.end());
    vocab.insert(a.content.begin(), a.content.end());
    for (const auto& c : a.comments) {
      comments += 1;
      upvotes += c.upvotes;
      comment_len += c.tokens.size();
      vocab.insert(c.tokens.begin(), c.tokens.end());
    }
  }
  const auto s = corpus_stats(corpus);
  EXPECT_NEAR(s.comments_per_article, comments / 80, 1e-12);
  EXPECT_NEAR(s.upvotes_per_comment, upvotes / comments, 1e-12);
  EXPECT_NEAR(s.avg_title_len, title / 80, 1e-12);
  EXPECT_NEAR(s.avg_content_len, content / 80, 1e-12);
  EXPECT_NEAR(s.avg_comment_len, comment_len / comments, 1e-12);
  EXPECT_EQ(s.vocab_size, vocab.size());

  CorpusStatsAccumulator left, right;
  for (std::size_t i = 0; i < corpus.size(); ++i) (i < 30 ? left : right).add(corpus[i]);
  right.merge(left);
  const auto merged = right.finish();
  EXPECT_NEAR(merged.upvotes_per_comment, s.upvotes_per_comment, 1e-12);
  EXPECT_EQ(merged.vocab_size, s.vocab_size);
  EXPECT_EQ(merged.category_histogram, s.category_histogram);
}

TEST(Stats, EmptyCorpusRejected) {
  EXPECT_THROW(corpus_stats(std::vector<Article>{}), std::invalid_argument);
}

TEST(Vocab, CapAndUnk) {
  Article a;
  a.id = "x";
  a.title = {"a", "a", "b"};
  const std::vector<Article> corpus = {a};
  const auto v = build_vocab(corpus, 1);
  EXPECT_EQ(v.tokens(), (std::vector<std::string>{"a"}));
  EXPECT_EQ(apply_vocab(TokenSeq{"a", "b"}, v), (TokenSeq{"a", "<unk>"}));
  const auto all = build_vocab(corpus, 100);
  EXPECT_EQ(apply_vocab(TokenSeq{"a", "b"}, all), (TokenSeq{"a", "b"}));
}

TEST(Vocab, TiesKeepFirstOccurrence) {
  Article a;
  a.id = "x";
  a.title = {"z", "b", "c", "c", "b"};
  const auto v = build_vocab(std::vector<Article>{a}, 10);
  EXPECT_EQ(v.tokens(), (std::vector<std::string>{"b", "c", "z"}));
}

TEST(Truncate, Boundaries) {
  std::vector<Article> corpus = {article("a", 3, 1, 49), article("b", 3, 1, 51)};
  const auto t = truncate_comments(corpus, 50);
  EXPECT_EQ(t[0].comments[0].tokens.size(), 49u);
  EXPECT_EQ(t[1].comments[0].tokens, words(50, "k"));
  const auto zero = truncate_comments(corpus, 0);
  EXPECT_EQ(zero.size(), 2u);
  EXPECT_TRUE(zero[1].comments[0].tokens.empty());
  EXPECT_EQ(zero[1].content, corpus[1].content);
}

TEST(Split, ExactDisjointAndSeeded) {
  std::vector<Article> corpus;
  for (int i = 0; i < 4; ++i) corpus.push_back(article("a" + std::to_string(i), 1, 0));
  Rng r1(3), r2(3);
  const auto s = split_corpus(corpus, {2, 1, 1}, r1);
  EXPECT_EQ(s.train.size(), 2u);
  EXPECT_EQ(s.dev.size(), 1u);
  EXPECT_EQ(s.test.size(), 1u);
  std::set<std::string> ids;
  for (const auto* part : {&s.train, &s.dev, &s.test}) {
    for (const auto& a : *part) ids.insert(a.id);
  }
  EXPECT_EQ(ids.size(), 4u);
  const auto again = split_corpus(corpus, {2, 1, 1}, r2);
  EXPECT_EQ(again.train, s.train);
  EXPECT_EQ(again.test, s.test);
  Rng r3(3);
  EXPECT_THROW(split_corpus(corpus, {3, 1, 1}, r3), std::invalid_argument);
}

}  // namespace
}  // namespace qweval
