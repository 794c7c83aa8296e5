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

// Token-sequence primitives shared by every metric: n-gram counting,
// longest common subsequence and TF-IDF vectors.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qweval {

/// A pre-segmented sentence. Tokens are compared byte-for-byte.
using TokenSeq = std::vector<std::string>;
using TokenSpan = std::span<const std::string>;

/// Throws std::invalid_argument if any token is empty or contains
/// whitespace or the n-gram key separator.
void validate_tokens(TokenSpan tokens);

/// Splits on ASCII whitespace. Convenience for tests and bindings.
TokenSeq split_tokens(std::string_view text);

/// N-grams are keyed by their tokens joined with a unit separator (0x1f),
/// which validate_tokens() keeps out of tokens.
inline constexpr char kNGramSeparator = '\x1f';

std::string ngram_key(TokenSpan gram);
std::vector<std::string> split_ngram_key(std::string_view key);

class NGramProfile {
 public:
  using CountMap = std::unordered_map<std::string, std::int64_t>;

  explicit NGramProfile(int order);

  int order() const { return order_; }
  const CountMap& counts() const { return counts_; }
  std::size_t distinct() const { return counts_.size(); }
  std::int64_t total() const { return total_; }

  std::int64_t count(std::string_view key) const;
  std::int64_t count(TokenSpan gram) const { return count(ngram_key(gram)); }

  void add(std::string key, std::int64_t times = 1);

 private:
  int order_;
  std::int64_t total_ = 0;
  CountMap counts_;
};

/// Counts every contiguous n-gram of `seq`. Throws std::invalid_argument
/// for n < 1.
NGramProfile ngram_profile(TokenSpan seq, int n);

std::size_t lcs_length(TokenSpan a, TokenSpan b);

/// Candidate indices (ascending) of the lexicographically smallest
/// longest common subsequence, i.e. the LCS that prefers earlier
/// candidate positions. The size always equals lcs_length().
std::vector<std::size_t> lcs_positions(TokenSpan candidate,
                                       TokenSpan reference);

/// Document frequencies of order-n n-grams. idf(g) = ln(D / df(g)), with
/// unseen n-grams treated as df = 1.
class DocumentFrequencyTable {
 public:
  explicit DocumentFrequencyTable(int order);

  int order() const { return order_; }
  std::int64_t doc_count() const { return doc_count_; }
  const std::unordered_map<std::string, std::int64_t>& df() const {
    return df_;
  }

  std::int64_t df(std::string_view key) const;
  double idf(std::string_view key) const;

  /// Adds one document made of one or more sequences; an n-gram counts once
  /// per document however often it occurs.
  void add_document(std::span<const TokenSeq> sequences);
  void add_document(std::span<const TokenSpan> sequences);
  void add_document(TokenSpan sequence);

  /// Rebuilds a table from stored counts (index files). Throws
  /// std::invalid_argument when a count is outside [1, doc_count].
  static DocumentFrequencyTable from_counts(
      int order, std::int64_t doc_count,
      std::unordered_map<std::string, std::int64_t> df);

  /// Shard merge; commutative and associative.
  DocumentFrequencyTable& merge(const DocumentFrequencyTable& other);

 private:
  void add_keys(std::vector<std::string> keys);

  int order_;
  std::int64_t doc_count_ = 0;
  std::unordered_map<std::string, std::int64_t> df_;
};

/// One table per order 1..n_max. Each element of `documents` is one
/// document (e.g. the reference set of one instance). Throws
/// std::invalid_argument on an empty corpus or n_max < 1.
std::vector<DocumentFrequencyTable> build_df_table(
    std::span<const std::vector<TokenSeq>> documents, int n_max);

class TfIdfVector {
 public:
  using WeightMap = std::unordered_map<std::string, double>;

  TfIdfVector() = default;
  TfIdfVector(int order, WeightMap weights);

  int order() const { return order_; }
  const WeightMap& weights() const { return weights_; }
  double weight(std::string_view key) const;
  double norm() const { return norm_; }
  bool is_zero() const { return norm_ == 0.0; }

  /// Multiplies every weight by `factor` (> 0).
  TfIdfVector scaled(double factor) const;

 private:
  int order_ = 1;
  WeightMap weights_;
  double norm_ = 0.0;
};

/// tf = raw count, weight = tf * idf. Throws std::invalid_argument when
/// df.order() != n.
TfIdfVector tfidf_vector(TokenSpan seq, int n,
                         const DocumentFrequencyTable& df);

double dot(const TfIdfVector& a, const TfIdfVector& b);

/// 0 when either side is the zero vector.
double cosine(const TfIdfVector& a, const TfIdfVector& b);

}  // namespace qweval
