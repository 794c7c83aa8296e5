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

#include "qweval/retrieval.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace qweval {
namespace {

using nlohmann::json;

constexpr const char* kIndexFormat = "qweval-tfidf-index";
constexpr int kIndexVersion = 1;

std::vector<std::string> sorted_keys(const DocumentFrequencyTable& df) {
  std::vector<std::string> keys;
  keys.reserve(df.df().size());
  for (const auto& [key, count] : df.df()) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  return keys;
}

bool hit_before(const ScoredArticle& a, const ScoredArticle& b) {
  if (a.cosine != b.cosine) return a.cosine > b.cosine;
  return a.id < b.id;
}

}  // namespace

std::string_view index_mode_name(IndexMode mode) {
  return mode == IndexMode::kTitle ? "title" : "title-content";
}

IndexMode parse_index_mode(std::string_view name) {
  if (name == "title" || name == "t") return IndexMode::kTitle;
  if (name == "title-content" || name == "tc") return IndexMode::kTitleContent;
  throw std::invalid_argument("unknown index mode '" + std::string(name) +
                              "' (expected title or title-content)");
}

TokenSeq index_text(const Article& article, IndexMode mode) {
  TokenSeq text = article.title;
  if (mode == IndexMode::kTitleContent) {
    text.insert(text.end(), article.content.begin(), article.content.end());
  }
  return text;
}

TfIdfIndex::TfIdfIndex(IndexMode mode, DocumentFrequencyTable df,
                       std::vector<Entry> entries)
    : mode_(mode), df_(std::move(df)), entries_(std::move(entries)) {
  if (df_.order() != 1) throw std::invalid_argument("index df must be unigram");
  if (static_cast<std::int64_t>(entries_.size()) != df_.doc_count()) {
    throw std::invalid_argument("index has " + std::to_string(entries_.size()) +
                                " vectors but df counts " +
                                std::to_string(df_.doc_count()) + " documents");
  }
}

TfIdfVector TfIdfIndex::vectorize(const Article& query) const {
  return vectorize(index_text(query, mode_));
}

TfIdfVector TfIdfIndex::vectorize(TokenSpan tokens) const {
  return tfidf_vector(tokens, 1, df_);
}

std::string TfIdfIndex::vocabulary_hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& key : sorted_keys(df_)) {
    for (unsigned char ch : key) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    h ^= static_cast<unsigned char>('\n');
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void TfIdfIndex::save(std::ostream& out) const {
  nlohmann::ordered_json header;
  header["format"] = kIndexFormat;
  header["version"] = kIndexVersion;
  header["mode"] = index_mode_name(mode_);
  header["doc_count"] = df_.doc_count();
  header["vocabulary_size"] = df_.df().size();
  header["vocabulary_hash"] = vocabulary_hash();
  out << header.dump() << '\n';

  auto df_rows = json::array();
  for (const auto& key : sorted_keys(df_)) df_rows.push_back({key, df_.df(key)});
  out << json{{"df", std::move(df_rows)}}.dump() << '\n';

  for (const auto& e : entries_) {
    std::vector<std::pair<std::string, double>> weights(e.vector.weights().begin(),
                                                        e.vector.weights().end());
    std::sort(weights.begin(), weights.end());
    auto rows = json::array();
    for (const auto& [key, w] : weights) rows.push_back({key, w});
    nlohmann::ordered_json line;
    line["id"] = e.id;
    line["weights"] = std::move(rows);
    out << line.dump() << '\n';
  }
}

TfIdfIndex TfIdfIndex::load(std::istream& in) {
  auto fail = [](const std::string& what) -> std::runtime_error {
    return std::runtime_error("index file: " + what);
  };
  std::string line;
  if (!std::getline(in, line)) throw fail("missing header");
  json header;
  try {
    header = json::parse(line);
    if (header.at("format") != kIndexFormat) throw fail("not a qweval index");
    if (header.at("version") != kIndexVersion) {
      throw fail("unsupported version " + header.at("version").dump());
    }
  } catch (const json::exception& e) {
    throw fail(std::string("bad header: ") + e.what());
  }
  try {
    const auto mode = parse_index_mode(header.at("mode").get<std::string>());
    const auto doc_count = header.at("doc_count").get<std::int64_t>();

    if (!std::getline(in, line)) throw fail("missing df line");
    std::unordered_map<std::string, std::int64_t> df;
    const auto df_line = json::parse(line);
    for (const auto& row : df_line.at("df")) {
      df.emplace(row.at(0).get<std::string>(), row.at(1).get<std::int64_t>());
    }
    if (df.size() != header.at("vocabulary_size").get<std::size_t>()) {
      throw fail("vocabulary size mismatch");
    }
    auto table = DocumentFrequencyTable::from_counts(1, doc_count, std::move(df));

    std::vector<Entry> entries;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = json::parse(line);
      if (!seen.insert(j.at("id").get<std::string>()).second) {
        throw fail("duplicate id '" + j.at("id").get<std::string>() + "'");
      }
      TfIdfVector::WeightMap weights;
      for (const auto& row : j.at("weights")) {
        weights.emplace(row.at(0).get<std::string>(), row.at(1).get<double>());
      }
      entries.push_back({j.at("id").get<std::string>(), TfIdfVector(1, std::move(weights))});
    }
    if (static_cast<std::int64_t>(entries.size()) != doc_count) {
      throw fail("expected " + std::to_string(doc_count) + " vectors, found " +
                 std::to_string(entries.size()));
    }
    TfIdfIndex index(mode, std::move(table), std::move(entries));
    if (index.vocabulary_hash() != header.at("vocabulary_hash").get<std::string>()) {
      throw fail("vocabulary hash mismatch");
    }
    return index;
  } catch (const json::exception& e) {
    throw fail(e.what());
  } catch (const std::invalid_argument& e) {
    throw fail(e.what());
  }
}

TfIdfIndex build_index(std::span<const Article> articles, IndexMode mode) {
  if (articles.empty()) throw std::invalid_argument("cannot index an empty corpus");
  DocumentFrequencyTable df(1);
  std::vector<TokenSeq> texts;
  texts.reserve(articles.size());
  for (const auto& a : articles) {
    texts.push_back(index_text(a, mode));
    df.add_document(TokenSpan(texts.back()));
  }
  std::vector<TfIdfIndex::Entry> entries;
  entries.reserve(articles.size());
  for (std::size_t i = 0; i < articles.size(); ++i) {
    entries.push_back({articles[i].id, tfidf_vector(texts[i], 1, df)});
  }
  return TfIdfIndex(mode, std::move(df), std::move(entries));
}

ArticleHits retrieve_articles(const TfIdfIndex& index, const Article& query,
                              std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  const auto q = index.vectorize(query);
  std::vector<ScoredArticle> all;
  all.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto& e = index.entries()[i];
    if (e.id == query.id) continue;
    all.push_back({i, e.id, cosine(q, e.vector)});
  }
  ArticleHits out;
  out.truncated = all.size() < k;
  const auto keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep),
                    all.end(), hit_before);
  all.resize(keep);
  out.hits = std::move(all);
  return out;
}

TfIdfCosineScorer::TfIdfCosineScorer(DocumentFrequencyTable df) : df_(std::move(df)) {
  if (df_.order() != 1) throw std::invalid_argument("scorer df must be unigram");
}

double TfIdfCosineScorer::score(const Article& article, TokenSpan comment) const {
  const auto text = index_text(article, IndexMode::kTitleContent);
  return cosine(tfidf_vector(comment, 1, df_), tfidf_vector(text, 1, df_));
}

TfIdfCosineScorer make_default_scorer(std::span<const Article> articles) {
  DocumentFrequencyTable df(1);
  for (const auto& a : articles) {
    df.add_document(TokenSpan(index_text(a, IndexMode::kTitleContent)));
  }
  return TfIdfCosineScorer(std::move(df));
}

std::vector<RankedComment> rank_comments(const Article& query,
                                         std::span<const CommentRecord> pool,
                                         const RelevanceScorer& scorer) {
  if (pool.empty()) {
    throw EmptyCandidatePool("no candidate comments for article '" + query.id + "'");
  }
  std::vector<RankedComment> ranked;
  ranked.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    ranked.push_back({i, scorer.score(query, pool[i].tokens)});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedComment& a, const RankedComment& b) {
                     return a.relevance > b.relevance;
                   });
  return ranked;
}

RetrievalResult retrieve_comment(const TfIdfIndex& index,
                                 std::span<const Article> corpus,
                                 const Article& query, std::size_t k,
                                 const RelevanceScorer& scorer) {
  if (corpus.size() != index.size()) {
    throw std::invalid_argument("corpus does not match the index");
  }
  auto hits = retrieve_articles(index, query, k);
  std::vector<CommentRecord> pool;
  std::vector<std::size_t> owner;
  for (const auto& hit : hits.hits) {
    const auto& article = corpus[hit.position];
    if (article.id != hit.id) throw std::invalid_argument("corpus does not match the index");
    for (const auto& c : article.comments) {
      pool.push_back(c);
      owner.push_back(hit.position);
    }
  }
  const auto ranked = rank_comments(query, pool, scorer);
  RetrievalResult out;
  out.query_id = query.id;
  out.candidates = std::move(hits.hits);
  out.truncated = hits.truncated;
  out.comment = pool[ranked.front().pool_index];
  out.comment_article_id = corpus[owner[ranked.front().pool_index]].id;
  out.relevance = ranked.front().relevance;
  return out;
}

}  // namespace qweval
