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

// Article/comment corpora: canonical JSONL format, construction rules for
// the filtered corpus and the annotated test set, statistics and
// preprocessing (vocabulary capping, comment truncation, splits).

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qweval/stats.hpp"
#include "qweval/textcore.hpp"

namespace qweval {

struct CommentRecord {
  TokenSeq tokens;
  std::int64_t upvotes = 0;
  std::optional<std::array<int, 2>> grades;

  /// Mean of the two grades mapped to [0, 1]; nullopt when ungraded.
  std::optional<double> quality() const;

  bool operator==(const CommentRecord&) const = default;
};

struct Article {
  std::string id;
  TokenSeq title;
  TokenSeq content;
  std::string category;
  std::vector<CommentRecord> comments;

  bool operator==(const Article&) const = default;
};

struct ParseIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

/// All problems found in a corpus stream, each with its line number.
class CorpusFormatError : public std::runtime_error {
 public:
  CorpusFormatError(std::string source, std::vector<ParseIssue> issues);
  const std::vector<ParseIssue>& issues() const { return issues_; }

 private:
  std::vector<ParseIssue> issues_;
};

/// Parses one JSON record. Throws std::invalid_argument naming the
/// offending field.
Article parse_article(std::string_view json_line);
/// Compact single-line JSON with a fixed key order.
std::string serialize_article(const Article& article);

/// Streams records to `sink` one at a time; blank lines are skipped.
/// Collects every malformed line and duplicate id, then throws
/// CorpusFormatError if there were any.
void for_each_article(std::istream& in, const std::function<void(Article&&)>& sink,
                      std::string_view source = "<input>");
std::vector<Article> parse_corpus(std::istream& in,
                                  std::string_view source = "<input>");
std::vector<Article> load_corpus(const std::string& path);
void write_corpus(std::ostream& out, std::span<const Article> articles);

// Construction rules -----------------------------------------------------------

struct FilterRules {
  std::size_t min_content_tokens = 30;
  std::size_t min_comments = 20;
};

bool passes_filter(const Article& article, const FilterRules& rules = {});
/// Keeps articles with at least `min_content_tokens` content tokens and at
/// least `min_comments` comments.
std::vector<Article> filter_corpus(std::span<const Article> articles,
                                   const FilterRules& rules = {});

struct TestSetRules {
  std::size_t min_comments = 30;  // counted after the length screen
  // strict bounds: a comment needs more than 5 tokens, an article more
  // than 200 upvotes summed over all of its comments
  std::size_t comment_tokens_over = 5;
  std::int64_t total_upvotes_over = 200;
  std::size_t sample_size = 27;
};

struct TestSelection {
  /// Eligible articles with their comments replaced by the sample.
  std::vector<Article> articles;
  std::vector<std::string> warnings;
};

/// Comments long enough to be annotated.
std::vector<std::size_t> screened_comments(const Article& article,
                                           const TestSetRules& rules = {});
bool is_test_eligible(const Article& article, const TestSetRules& rules = {});

/// Samples `sample_size` distinct screened comments from every eligible
/// article, optionally keeping only `max_articles` random eligible
/// articles. Articles short of screened comments are skipped with a
/// warning.
TestSelection select_test_candidates(std::span<const Article> articles, Rng& rng,
                                     const TestSetRules& rules = {},
                                     std::optional<std::size_t> max_articles = {});

// Statistics ------------------------------------------------------------------

struct CorpusStats {
  std::size_t article_count = 0;
  std::size_t comment_count = 0;
  double comments_per_article = 0.0;
  double upvotes_per_comment = 0.0;
  std::size_t vocab_size = 0;
  double avg_title_len = 0.0;
  double avg_content_len = 0.0;
  double avg_comment_len = 0.0;
  std::map<std::string, std::size_t> category_histogram;
};

/// Single-pass accumulator; shards may be merged in any order.
class CorpusStatsAccumulator {
 public:
  void add(const Article& article);
  CorpusStatsAccumulator& merge(const CorpusStatsAccumulator& other);
  /// Throws std::invalid_argument when nothing was added.
  CorpusStats finish() const;

 private:
  std::size_t articles_ = 0;
  std::size_t comments_ = 0;
  std::int64_t upvotes_ = 0;
  std::size_t title_tokens_ = 0;
  std::size_t content_tokens_ = 0;
  std::size_t comment_tokens_ = 0;
  std::unordered_set<std::string> vocab_;
  std::map<std::string, std::size_t> categories_;
};

CorpusStats corpus_stats(std::span<const Article> articles);

// Preprocessing ---------------------------------------------------------------

class Vocabulary {
 public:
  Vocabulary(std::vector<std::string> ranked, std::vector<std::int64_t> counts,
             std::string unk);

  /// Ranked by descending frequency; ties keep first-occurrence order.
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  const std::string& unk() const { return unk_; }
  std::size_t size() const { return tokens_.size(); }
  bool contains(const std::string& token) const { return index_.count(token) > 0; }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::int64_t> counts_;
  std::string unk_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Counts title, content and comment tokens in corpus order and keeps the
/// `cap` most frequent. The unk symbol itself is never ranked.
Vocabulary build_vocab(std::span<const Article> articles, std::size_t cap = 30000,
                       std::string unk = "<unk>");
TokenSeq apply_vocab(TokenSpan seq, const Vocabulary& vocab);
/// Applies the vocabulary to every title, content and comment.
std::vector<Article> apply_vocab(std::span<const Article> articles,
                                 const Vocabulary& vocab);

/// Clips every comment to its first `max_len` tokens.
std::vector<Article> truncate_comments(std::span<const Article> articles,
                                       std::size_t max_len = 50);

struct SplitSizes {
  std::size_t train = 0;
  std::size_t dev = 0;
  std::size_t test = 0;
};

struct CorpusSplit {
  std::vector<Article> train;
  std::vector<Article> dev;
  std::vector<Article> test;
};

/// Seeded disjoint split with exactly the requested sizes; each part keeps
/// corpus order. Throws std::invalid_argument when the sizes exceed the
/// corpus.
CorpusSplit split_corpus(std::span<const Article> articles, const SplitSizes& sizes,
                         Rng& rng);

}  // namespace qweval
