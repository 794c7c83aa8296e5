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

#include "qweval/textcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace qweval {
namespace {

bool is_space(char ch) {
  return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\v' ||
         ch == '\f';
}

std::vector<std::string> ngram_keys(TokenSpan seq, int n) {
  std::vector<std::string> keys;
  const auto len = static_cast<std::ptrdiff_t>(seq.size());
  for (std::ptrdiff_t i = 0; i + n <= len; ++i) {
    keys.push_back(ngram_key(seq.subspan(static_cast<std::size_t>(i),
                                         static_cast<std::size_t>(n))));
  }
  return keys;
}

}  // namespace

void validate_tokens(TokenSpan tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& tok = tokens[i];
    if (tok.empty()) {
      throw std::invalid_argument("token " + std::to_string(i) + " is empty");
    }
    for (char ch : tok) {
      if (is_space(ch) || ch == kNGramSeparator) {
        throw std::invalid_argument("token " + std::to_string(i) +
                                    " contains whitespace or a control "
                                    "separator");
      }
    }
  }
}

TokenSeq split_tokens(std::string_view text) {
  TokenSeq out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string ngram_key(TokenSpan gram) {
  std::string key;
  for (std::size_t i = 0; i < gram.size(); ++i) {
    if (i) key.push_back(kNGramSeparator);
    key += gram[i];
  }
  return key;
}

std::vector<std::string> split_ngram_key(std::string_view key) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = key.find(kNGramSeparator, start);
    out.emplace_back(key.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// NGramProfile

NGramProfile::NGramProfile(int order) : order_(order) {
  if (order < 1) throw std::invalid_argument("n-gram order must be >= 1");
}

std::int64_t NGramProfile::count(std::string_view key) const {
  const auto it = counts_.find(std::string(key));
  return it == counts_.end() ? 0 : it->second;
}

void NGramProfile::add(std::string key, std::int64_t times) {
  if (times <= 0) return;
  counts_[std::move(key)] += times;
  total_ += times;
}

NGramProfile ngram_profile(TokenSpan seq, int n) {
  NGramProfile profile(n);
  for (auto& key : ngram_keys(seq, n)) profile.add(std::move(key));
  return profile;
}

// LCS

std::size_t lcs_length(TokenSpan a, TokenSpan b) {
  if (a.empty() || b.empty()) return 0;
  // Two rolling rows over b.
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<std::size_t> lcs_positions(TokenSpan candidate,
                                       TokenSpan reference) {
  const std::size_t n = candidate.size();
  const std::size_t m = reference.size();
  std::vector<std::size_t> positions;
  if (n == 0 || m == 0) return positions;

  // suffix[i][j] = LCS(candidate[i:], reference[j:])
  const std::size_t width = m + 1;
  std::vector<std::uint32_t> suffix((n + 1) * width, 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& {
    return suffix[i * width + j];
  };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      at(i, j) = candidate[i] == reference[j]
                     ? at(i + 1, j + 1) + 1
                     : std::max(at(i + 1, j), at(i, j + 1));
    }
  }

  // next_match[p][j] = first q >= j with reference[q] == candidate[p], or m.
  std::vector<std::uint32_t> next_match(n * width, 0);
  for (std::size_t p = 0; p < n; ++p) {
    auto* row = &next_match[p * width];
    row[m] = static_cast<std::uint32_t>(m);
    for (std::size_t j = m; j-- > 0;) {
      row[j] = candidate[p] == reference[j] ? static_cast<std::uint32_t>(j)
                                            : row[j + 1];
    }
  }

  // Take the earliest candidate position that can still complete an LCS,
  // pairing it with its earliest usable reference position.
  std::size_t remaining = at(0, 0);
  std::size_t i = 0, j = 0;
  while (remaining > 0) {
    for (std::size_t p = i; p < n; ++p) {
      const std::size_t q = next_match[p * width + j];
      if (q < m && at(p + 1, q + 1) + 1 == remaining) {
        positions.push_back(p);
        i = p + 1;
        j = q + 1;
        --remaining;
        break;
      }
    }
  }
  return positions;
}

// DocumentFrequencyTable

DocumentFrequencyTable::DocumentFrequencyTable(int order) : order_(order) {
  if (order < 1) throw std::invalid_argument("n-gram order must be >= 1");
}

std::int64_t DocumentFrequencyTable::df(std::string_view key) const {
  const auto it = df_.find(std::string(key));
  return it == df_.end() ? 0 : it->second;
}

double DocumentFrequencyTable::idf(std::string_view key) const {
  if (doc_count_ == 0) return 0.0;
  const auto d = std::max<std::int64_t>(df(key), 1);
  return std::log(static_cast<double>(doc_count_) / static_cast<double>(d));
}

void DocumentFrequencyTable::add_keys(std::vector<std::string> keys) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  for (auto& key : keys) ++df_[std::move(key)];
  ++doc_count_;
}

void DocumentFrequencyTable::add_document(std::span<const TokenSeq> sequences) {
  std::vector<TokenSpan> spans(sequences.begin(), sequences.end());
  add_document(std::span<const TokenSpan>(spans));
}

void DocumentFrequencyTable::add_document(std::span<const TokenSpan> sequences) {
  std::vector<std::string> keys;
  for (const auto seq : sequences) {
    auto more = ngram_keys(seq, order_);
    keys.insert(keys.end(), std::make_move_iterator(more.begin()),
                std::make_move_iterator(more.end()));
  }
  add_keys(std::move(keys));
}

void DocumentFrequencyTable::add_document(TokenSpan sequence) {
  add_keys(ngram_keys(sequence, order_));
}

DocumentFrequencyTable DocumentFrequencyTable::from_counts(
    int order, std::int64_t doc_count,
    std::unordered_map<std::string, std::int64_t> df) {
  if (doc_count < 1) throw std::invalid_argument("doc_count must be >= 1");
  for (const auto& [key, count] : df) {
    if (count < 1 || count > doc_count) {
      throw std::invalid_argument("document frequency out of range [1, D]");
    }
  }
  DocumentFrequencyTable table(order);
  table.doc_count_ = doc_count;
  table.df_ = std::move(df);
  return table;
}

DocumentFrequencyTable& DocumentFrequencyTable::merge(
    const DocumentFrequencyTable& other) {
  if (other.order_ != order_) {
    throw std::invalid_argument("cannot merge tables of different orders");
  }
  for (const auto& [key, count] : other.df_) df_[key] += count;
  doc_count_ += other.doc_count_;
  return *this;
}

std::vector<DocumentFrequencyTable> build_df_table(
    std::span<const std::vector<TokenSeq>> documents, int n_max) {
  if (documents.empty()) {
    throw std::invalid_argument("cannot build df tables from an empty corpus");
  }
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  std::vector<DocumentFrequencyTable> tables;
  tables.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    DocumentFrequencyTable table(n);
    for (const auto& doc : documents) table.add_document(std::span(doc));
    tables.push_back(std::move(table));
  }
  return tables;
}

// TfIdfVector

TfIdfVector::TfIdfVector(int order, WeightMap weights)
    : order_(order), weights_(std::move(weights)) {
  double sq = 0.0;
  for (const auto& [key, w] : weights_) sq += w * w;
  norm_ = std::sqrt(sq);
}

double TfIdfVector::weight(std::string_view key) const {
  const auto it = weights_.find(std::string(key));
  return it == weights_.end() ? 0.0 : it->second;
}

TfIdfVector TfIdfVector::scaled(double factor) const {
  WeightMap out = weights_;
  for (auto& [key, w] : out) w *= factor;
  return TfIdfVector(order_, std::move(out));
}

TfIdfVector tfidf_vector(TokenSpan seq, int n,
                         const DocumentFrequencyTable& df) {
  if (df.order() != n) {
    throw std::invalid_argument("df table order " +
                                std::to_string(df.order()) +
                                " does not match n = " + std::to_string(n));
  }
  TfIdfVector::WeightMap weights;
  for (auto& key : ngram_keys(seq, n)) weights[std::move(key)] += 1.0;
  for (auto& [key, w] : weights) w *= df.idf(key);
  return TfIdfVector(n, std::move(weights));
}

double dot(const TfIdfVector& a, const TfIdfVector& b) {
  const auto& small = a.weights().size() <= b.weights().size() ? a : b;
  const auto& large = &small == &a ? b : a;
  double sum = 0.0;
  for (const auto& [key, w] : small.weights()) {
    const auto it = large.weights().find(key);
    if (it != large.weights().end()) sum += w * it->second;
  }
  return sum;
}

double cosine(const TfIdfVector& a, const TfIdfVector& b) {
  if (a.is_zero() || b.is_zero()) return 0.0;
  const double c = dot(a, b) / (a.norm() * b.norm());
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace qweval
