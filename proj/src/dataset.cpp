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

#include "qweval/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "json.hpp"

namespace qweval {
namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw std::invalid_argument("field '" + field + "': " + what);
}

TokenSeq parse_tokens(const json& j, const std::string& field) {
  if (!j.is_array()) field_error(field, "expected an array of token strings");
  TokenSeq out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) {
      field_error(field + "[" + std::to_string(i) + "]", "expected a string");
    }
    out.push_back(j[i].get<std::string>());
  }
  try {
    validate_tokens(out);
  } catch (const std::invalid_argument& e) {
    field_error(field, e.what());
  }
  return out;
}

const json& require(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) field_error(key, "missing");
  return *it;
}

CommentRecord parse_comment(const json& j, const std::string& field) {
  if (!j.is_object()) field_error(field, "expected an object");
  CommentRecord c;
  const auto tokens = j.find("tokens");
  if (tokens == j.end()) field_error(field + ".tokens", "missing");
  c.tokens = parse_tokens(*tokens, field + ".tokens");

  const auto upvotes = j.find("upvotes");
  if (upvotes == j.end()) field_error(field + ".upvotes", "missing");
  if (!upvotes->is_number_integer()) {
    field_error(field + ".upvotes", "expected a non-negative integer");
  }
  c.upvotes = upvotes->get<std::int64_t>();
  if (c.upvotes < 0) field_error(field + ".upvotes", "must be >= 0");

  const auto grades = j.find("grades");
  if (grades != j.end() && !grades->is_null()) {
    if (!grades->is_array() || grades->size() != 2) {
      field_error(field + ".grades", "expected exactly two integer grades");
    }
    std::array<int, 2> g{};
    for (std::size_t k = 0; k < 2; ++k) {
      const auto& v = (*grades)[k];
      const auto name = field + ".grades[" + std::to_string(k) + "]";
      if (!v.is_number_integer()) field_error(name, "expected an integer");
      const auto grade = v.get<std::int64_t>();
      if (grade < 1 || grade > 5) {
        field_error(name, "grade " + std::to_string(grade) + " outside 1..5");
      }
      g[k] = static_cast<int>(grade);
    }
    c.grades = g;
  }
  return c;
}

}  // namespace

std::optional<double> CommentRecord::quality() const {
  if (!grades) return std::nullopt;
  return normalize_quality(((*grades)[0] + (*grades)[1]) / 2.0);
}

CorpusFormatError::CorpusFormatError(std::string source,
                                     std::vector<ParseIssue> issues)
    : std::runtime_error([&] {
        std::string msg = source + ": " + std::to_string(issues.size()) +
                          " malformed record(s)";
        for (const auto& issue : issues) {
          msg += "\n  " + source + ":" + std::to_string(issue.line) + ": " +
                 issue.message;
        }
        return msg;
      }()),
      issues_(std::move(issues)) {}

Article parse_article(std::string_view json_line) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");

  Article a;
  const auto& id = require(j, "id");
  if (!id.is_string() || id.get<std::string>().empty()) {
    field_error("id", "expected a nonempty string");
  }
  a.id = id.get<std::string>();
  a.title = parse_tokens(require(j, "title"), "title");
  if (a.title.empty()) field_error("title", "must not be empty");
  a.content = parse_tokens(require(j, "content"), "content");
  const auto& category = require(j, "category");
  if (!category.is_string()) field_error("category", "expected a string");
  a.category = category.get<std::string>();
  const auto& comments = require(j, "comments");
  if (!comments.is_array()) field_error("comments", "expected an array");
  a.comments.reserve(comments.size());
  for (std::size_t i = 0; i < comments.size(); ++i) {
    a.comments.push_back(
        parse_comment(comments[i], "comments[" + std::to_string(i) + "]"));
  }
  return a;
}

std::string serialize_article(const Article& article) {
  nlohmann::ordered_json j;
  j["id"] = article.id;
  j["title"] = article.title;
  j["content"] = article.content;
  j["category"] = article.category;
  auto comments = nlohmann::ordered_json::array();
  for (const auto& c : article.comments) {
    nlohmann::ordered_json cj;
    cj["tokens"] = c.tokens;
    cj["upvotes"] = c.upvotes;
    if (c.grades) cj["grades"] = {(*c.grades)[0], (*c.grades)[1]};
    comments.push_back(std::move(cj));
  }
  j["comments"] = std::move(comments);
  return j.dump();
}

void for_each_article(std::istream& in, const std::function<void(Article&&)>& sink,
                      std::string_view source) {
  std::vector<ParseIssue> issues;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      Article a = parse_article(line);
      const auto [it, fresh] = seen.emplace(a.id, lineno);
      if (!fresh) {
        issues.push_back({lineno, "duplicate id '" + a.id + "' (first seen on line " +
                                      std::to_string(it->second) + ")"});
        continue;
      }
      if (issues.empty()) sink(std::move(a));
    } catch (const std::invalid_argument& e) {
      issues.push_back({lineno, e.what()});
    }
  }
  if (!issues.empty()) throw CorpusFormatError(std::string(source), std::move(issues));
}

std::vector<Article> parse_corpus(std::istream& in, std::string_view source) {
  std::vector<Article> out;
  for_each_article(in, [&](Article&& a) { out.push_back(std::move(a)); }, source);
  return out;
}

std::vector<Article> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file '" + path + "'");
  return parse_corpus(in, path);
}

void write_corpus(std::ostream& out, std::span<const Article> articles) {
  for (const auto& a : articles) out << serialize_article(a) << '\n';
}

// Construction rules -----------------------------------------------------------

bool passes_filter(const Article& article, const FilterRules& rules) {
  return article.content.size() >= rules.min_content_tokens &&
         article.comments.size() >= rules.min_comments;
}

std::vector<Article> filter_corpus(std::span<const Article> articles,
                                   const FilterRules& rules) {
  std::vector<Article> out;
  for (const auto& a : articles) {
    if (passes_filter(a, rules)) out.push_back(a);
  }
  return out;
}

std::vector<std::size_t> screened_comments(const Article& article,
                                           const TestSetRules& rules) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < article.comments.size(); ++i) {
    if (article.comments[i].tokens.size() > rules.comment_tokens_over) idx.push_back(i);
  }
  return idx;
}

bool is_test_eligible(const Article& article, const TestSetRules& rules) {
  std::int64_t upvotes = 0;
  for (const auto& c : article.comments) upvotes += c.upvotes;
  return upvotes > rules.total_upvotes_over &&
         screened_comments(article, rules).size() >= rules.min_comments;
}

TestSelection select_test_candidates(std::span<const Article> articles, Rng& rng,
                                     const TestSetRules& rules,
                                     std::optional<std::size_t> max_articles) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < articles.size(); ++i) {
    if (is_test_eligible(articles[i], rules)) eligible.push_back(i);
  }
  if (max_articles && *max_articles < eligible.size()) {
    std::vector<std::size_t> chosen;
    std::sample(eligible.begin(), eligible.end(), std::back_inserter(chosen),
                *max_articles, rng);
    eligible = std::move(chosen);
  }

  TestSelection out;
  for (auto i : eligible) {
    const auto& article = articles[i];
    const auto pool = screened_comments(article, rules);
    if (pool.size() < rules.sample_size) {
      out.warnings.push_back("article '" + article.id + "' has only " +
                             std::to_string(pool.size()) +
                             " comments long enough to sample; skipped");
      continue;
    }
    std::vector<std::size_t> picked;
    std::sample(pool.begin(), pool.end(), std::back_inserter(picked),
                rules.sample_size, rng);
    Article sampled = article;
    sampled.comments.clear();
    for (auto c : picked) sampled.comments.push_back(article.comments[c]);
    out.articles.push_back(std::move(sampled));
  }
  return out;
}

// Statistics ------------------------------------------------------------------

void CorpusStatsAccumulator::add(const Article& article) {
  ++articles_;
  ++categories_[article.category];
  title_tokens_ += article.title.size();
  content_tokens_ += article.content.size();
  vocab_.insert(article.title.begin(), article.title.end());
  vocab_.insert(article.content.begin(), article.content.end());
  for (const auto& c : article.comments) {
    ++comments_;
    upvotes_ += c.upvotes;
    comment_tokens_ += c.tokens.size();
    vocab_.insert(c.tokens.begin(), c.tokens.end());
  }
}

CorpusStatsAccumulator& CorpusStatsAccumulator::merge(
    const CorpusStatsAccumulator& other) {
  articles_ += other.articles_;
  comments_ += other.comments_;
  upvotes_ += other.upvotes_;
  title_tokens_ += other.title_tokens_;
  content_tokens_ += other.content_tokens_;
  comment_tokens_ += other.comment_tokens_;
  vocab_.insert(other.vocab_.begin(), other.vocab_.end());
  for (const auto& [cat, n] : other.categories_) categories_[cat] += n;
  return *this;
}

CorpusStats CorpusStatsAccumulator::finish() const {
  if (articles_ == 0) throw std::invalid_argument("corpus is empty");
  CorpusStats s;
  const auto a = static_cast<double>(articles_);
  const auto c = static_cast<double>(comments_);
  s.article_count = articles_;
  s.comment_count = comments_;
  s.comments_per_article = c / a;
  s.upvotes_per_comment = comments_ ? static_cast<double>(upvotes_) / c : 0.0;
  s.vocab_size = vocab_.size();
  s.avg_title_len = static_cast<double>(title_tokens_) / a;
  s.avg_content_len = static_cast<double>(content_tokens_) / a;
  s.avg_comment_len = comments_ ? static_cast<double>(comment_tokens_) / c : 0.0;
  s.category_histogram = categories_;
  return s;
}

CorpusStats corpus_stats(std::span<const Article> articles) {
  CorpusStatsAccumulator acc;
  for (const auto& a : articles) acc.add(a);
  return acc.finish();
}

// Preprocessing ---------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> ranked,
                       std::vector<std::int64_t> counts, std::string unk)
    : tokens_(std::move(ranked)), counts_(std::move(counts)), unk_(std::move(unk)) {
  if (counts_.size() != tokens_.size()) {
    throw std::invalid_argument("vocabulary tokens and counts differ in length");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i] == unk_) {
      throw std::invalid_argument("unk symbol '" + unk_ + "' is a vocabulary entry");
    }
    if (!index_.emplace(tokens_[i], i).second) {
      throw std::invalid_argument("duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

Vocabulary build_vocab(std::span<const Article> articles, std::size_t cap,
                       std::string unk) {
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::string> order;
  std::vector<std::int64_t> counts;
  auto count = [&](const TokenSeq& seq) {
    for (const auto& tok : seq) {
      if (tok == unk) continue;
      const auto [it, fresh] = slot.emplace(tok, order.size());
      if (fresh) {
        order.push_back(tok);
        counts.push_back(0);
      }
      ++counts[it->second];
    }
  };
  for (const auto& a : articles) {
    count(a.title);
    count(a.content);
    for (const auto& c : a.comments) count(c.tokens);
  }

  std::vector<std::size_t> rank(order.size());
  std::iota(rank.begin(), rank.end(), 0);
  // stable: equal counts keep first-occurrence order
  std::stable_sort(rank.begin(), rank.end(),
                   [&](std::size_t x, std::size_t y) { return counts[x] > counts[y]; });
  if (rank.size() > cap) rank.resize(cap);

  std::vector<std::string> tokens;
  std::vector<std::int64_t> kept;
  tokens.reserve(rank.size());
  kept.reserve(rank.size());
  for (auto r : rank) {
    tokens.push_back(order[r]);
    kept.push_back(counts[r]);
  }
  return Vocabulary(std::move(tokens), std::move(kept), std::move(unk));
}

TokenSeq apply_vocab(TokenSpan seq, const Vocabulary& vocab) {
  TokenSeq out;
  out.reserve(seq.size());
  for (const auto& tok : seq) out.push_back(vocab.contains(tok) ? tok : vocab.unk());
  return out;
}

std::vector<Article> apply_vocab(std::span<const Article> articles,
                                 const Vocabulary& vocab) {
  std::vector<Article> out(articles.begin(), articles.end());
  for (auto& a : out) {
    a.title = apply_vocab(a.title, vocab);
    a.content = apply_vocab(a.content, vocab);
    for (auto& c : a.comments) c.tokens = apply_vocab(c.tokens, vocab);
  }
  return out;
}

std::vector<Article> truncate_comments(std::span<const Article> articles,
                                       std::size_t max_len) {
  std::vector<Article> out(articles.begin(), articles.end());
  for (auto& a : out) {
    for (auto& c : a.comments) {
      if (c.tokens.size() > max_len) c.tokens.resize(max_len);
    }
  }
  return out;
}

CorpusSplit split_corpus(std::span<const Article> articles, const SplitSizes& sizes,
                         Rng& rng) {
  const auto wanted = sizes.train + sizes.dev + sizes.test;
  if (wanted > articles.size()) {
    throw std::invalid_argument("split sizes sum to " + std::to_string(wanted) +
                                " but the corpus has " +
                                std::to_string(articles.size()) + " articles");
  }
  std::vector<std::size_t> idx(articles.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);

  auto take = [&](std::size_t from, std::size_t count) {
    std::vector<std::size_t> part(idx.begin() + static_cast<std::ptrdiff_t>(from),
                                  idx.begin() + static_cast<std::ptrdiff_t>(from + count));
    std::sort(part.begin(), part.end());
    std::vector<Article> out;
    out.reserve(count);
    for (auto i : part) out.push_back(articles[i]);
    return out;
  };
  CorpusSplit split;
  split.train = take(0, sizes.train);
  split.dev = take(sizes.train, sizes.dev);
  split.test = take(sizes.train + sizes.dev, sizes.test);
  return split;
}

}  // namespace qweval
