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

// Two-stage retrieval baseline: find training articles similar to a query
// article by unigram TF-IDF cosine (over the title, or title and content),
// then pick the most relevant comment from their pooled comments.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qweval/dataset.hpp"
#include "qweval/textcore.hpp"

namespace qweval {

enum class IndexMode { kTitle, kTitleContent };

std::string_view index_mode_name(IndexMode mode);  // "title" / "title-content"
IndexMode parse_index_mode(std::string_view name);

/// The token sequence an article is indexed (or queried) by.
TokenSeq index_text(const Article& article, IndexMode mode);

class TfIdfIndex {
 public:
  struct Entry {
    std::string id;
    TfIdfVector vector;
  };

  TfIdfIndex(IndexMode mode, DocumentFrequencyTable df, std::vector<Entry> entries);

  IndexMode mode() const { return mode_; }
  const DocumentFrequencyTable& df() const { return df_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  TfIdfVector vectorize(const Article& query) const;
  TfIdfVector vectorize(TokenSpan tokens) const;

  /// FNV-1a over the sorted df vocabulary, hex encoded.
  std::string vocabulary_hash() const;

  /// Line-delimited JSON: a header line, a df line, then one line per
  /// article vector. See docs/index-format.md.
  void save(std::ostream& out) const;
  /// Throws std::runtime_error on a malformed or inconsistent file.
  static TfIdfIndex load(std::istream& in);

 private:
  IndexMode mode_;
  DocumentFrequencyTable df_;
  std::vector<Entry> entries_;
};

/// Throws std::invalid_argument on an empty corpus.
TfIdfIndex build_index(std::span<const Article> articles, IndexMode mode);

struct ScoredArticle {
  std::size_t position = 0;  // entry index in the TfIdfIndex
  std::string id;
  double cosine = 0.0;
};

struct ArticleHits {
  std::vector<ScoredArticle> hits;  // descending cosine, ties by id
  bool truncated = false;           // fewer than k articles were available
};

/// Top-k indexed articles by cosine, never including the query's own id.
/// Throws std::invalid_argument for k == 0.
ArticleHits retrieve_articles(const TfIdfIndex& index, const Article& query,
                              std::size_t k);

class RelevanceScorer {
 public:
  virtual ~RelevanceScorer() = default;
  /// Higher is more relevant; must be deterministic.
  virtual double score(const Article& article, TokenSpan comment) const = 0;
};

/// Cosine between unigram TF-IDF vectors of the comment and the article's
/// title followed by its content.
class TfIdfCosineScorer : public RelevanceScorer {
 public:
  explicit TfIdfCosineScorer(DocumentFrequencyTable df);
  double score(const Article& article, TokenSpan comment) const override;

 private:
  DocumentFrequencyTable df_;
};

/// Default scorer with unigram document frequencies over the title and
/// content of every article.
TfIdfCosineScorer make_default_scorer(std::span<const Article> articles);

class EmptyCandidatePool : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RankedComment {
  std::size_t pool_index = 0;
  double relevance = 0.0;
};

/// Descending relevance, ties by pool order. Throws EmptyCandidatePool.
std::vector<RankedComment> rank_comments(const Article& query,
                                         std::span<const CommentRecord> pool,
                                         const RelevanceScorer& scorer);

struct RetrievalResult {
  std::string query_id;
  std::vector<ScoredArticle> candidates;
  bool truncated = false;
  CommentRecord comment;
  std::string comment_article_id;
  double relevance = 0.0;
};

/// Both stages. `corpus` must be the article list the index was built from.
RetrievalResult retrieve_comment(const TfIdfIndex& index,
                                 std::span<const Article> corpus,
                                 const Article& query, std::size_t k,
                                 const RelevanceScorer& scorer);

}  // namespace qweval
