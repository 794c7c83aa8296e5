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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qweval/dataset.hpp"
#include "qweval/metrics.hpp"
#include "qweval/retrieval.hpp"
#include "qweval/stats.hpp"
#include "qweval/textcore.hpp"

namespace py = pybind11;

namespace {

using qweval::TokenSeq;

qweval::ReferenceSet to_reference_set(
    const std::vector<std::pair<TokenSeq, double>>& refs) {
  std::vector<qweval::QualityReference> out;
  out.reserve(refs.size());
  for (const auto& [tokens, quality] : refs) out.emplace_back(tokens, quality);
  return qweval::ReferenceSet(std::move(out));
}

std::vector<qweval::ReferenceSet> to_reference_sets(
    const std::vector<std::vector<std::pair<TokenSeq, double>>>& corpus) {
  std::vector<qweval::ReferenceSet> out;
  out.reserve(corpus.size());
  for (const auto& refs : corpus) out.push_back(to_reference_set(refs));
  return out;
}

qweval::CorrelationMethod parse_method(const std::string& name) {
  if (name == "pearson") return qweval::CorrelationMethod::kPearson;
  if (name == "spearman") return qweval::CorrelationMethod::kSpearman;
  throw py::value_error("method must be 'pearson' or 'spearman'");
}

qweval::KappaWeights parse_weights(const std::string& name) {
  if (name == "linear") return qweval::KappaWeights::kLinear;
  if (name == "quadratic") return qweval::KappaWeights::kQuadratic;
  throw py::value_error("weights must be 'linear' or 'quadratic'");
}

std::vector<qweval::AnnotationRecord> to_records(
    const std::vector<std::pair<int, int>>& grades) {
  std::vector<qweval::AnnotationRecord> records;
  records.reserve(grades.size());
  for (std::size_t i = 0; i < grades.size(); ++i) {
    records.push_back({std::to_string(i), {grades[i].first, grades[i].second}});
  }
  return records;
}

}  // namespace

PYBIND11_MODULE(_qweval, m) {
  m.doc() = "Quality-weighted metrics for article comment generation";

  py::register_exception<qweval::UndefinedCorrelation>(m, "UndefinedCorrelation",
                                                       PyExc_ValueError);
  py::register_exception<qweval::CorpusFormatError>(m, "CorpusFormatError",
                                                    PyExc_ValueError);

  m.def("split_tokens", &qweval::split_tokens, py::arg("text"));

  py::class_<qweval::MetricConfig>(m, "MetricConfig")
      .def(py::init<>())
      .def_readwrite("bleu_max_order", &qweval::MetricConfig::bleu_max_order)
      .def_property(
          "bleu_smoothing",
          [](const qweval::MetricConfig& c) {
            return c.bleu_smoothing == qweval::BleuSmoothing::kEpsilon
                       ? std::string("epsilon")
                       : std::string("off");
          },
          [](qweval::MetricConfig& c, const std::string& v) {
            if (v == "off") {
              c.bleu_smoothing = qweval::BleuSmoothing::kOff;
            } else if (v == "epsilon") {
              c.bleu_smoothing = qweval::BleuSmoothing::kEpsilon;
            } else {
              throw py::value_error("bleu_smoothing must be 'off' or 'epsilon'");
            }
          })
      .def_readwrite("bleu_epsilon", &qweval::MetricConfig::bleu_epsilon)
      .def_readwrite("rouge_beta", &qweval::MetricConfig::rouge_beta)
      .def_readwrite("meteor_penalty_gamma",
                     &qweval::MetricConfig::meteor_penalty_gamma)
      .def_readwrite("meteor_penalty_power",
                     &qweval::MetricConfig::meteor_penalty_power)
      .def_readwrite("meteor_alpha", &qweval::MetricConfig::meteor_alpha)
      .def_readwrite("meteor_search_budget",
                     &qweval::MetricConfig::meteor_search_budget)
      .def_readwrite("cider_max_order", &qweval::MetricConfig::cider_max_order)
      .def("validate", &qweval::MetricConfig::validate);

  py::class_<qweval::MetricScore>(m, "MetricScore")
      .def_readonly("value", &qweval::MetricScore::value)
      .def_readonly("components", &qweval::MetricScore::components)
      .def_readonly("per_reference", &qweval::MetricScore::per_reference)
      .def_readonly("best_reference", &qweval::MetricScore::best_reference)
      .def("__float__", [](const qweval::MetricScore& s) { return s.value; })
      .def("__repr__", [](const qweval::MetricScore& s) {
        return "MetricScore(value=" + std::to_string(s.value) + ")";
      });

  py::class_<qweval::DocumentFrequencyTable>(m, "DocumentFrequencyTable")
      .def_property_readonly("order", &qweval::DocumentFrequencyTable::order)
      .def_property_readonly("doc_count",
                             &qweval::DocumentFrequencyTable::doc_count)
      .def("df",
           py::overload_cast<std::string_view>(
               &qweval::DocumentFrequencyTable::df, py::const_),
           py::arg("key"))
      .def("idf", &qweval::DocumentFrequencyTable::idf, py::arg("key"));

  py::class_<qweval::MeteorAlignment>(m, "MeteorAlignment")
      .def_readonly("links", &qweval::MeteorAlignment::links)
      .def_readonly("chunks", &qweval::MeteorAlignment::chunks)
      .def_readonly("optimal", &qweval::MeteorAlignment::optimal)
      .def_property_readonly("matches", &qweval::MeteorAlignment::matches);

  const auto cfg_default = qweval::MetricConfig{};

  m.def(
      "weighted_bleu",
      [](const TokenSeq& cand, const std::vector<std::pair<TokenSeq, double>>& refs,
         const qweval::MetricConfig& cfg) {
        return qweval::weighted_bleu(cand, to_reference_set(refs), cfg);
      },
      py::arg("candidate"), py::arg("references"), py::arg("config") = cfg_default);
  m.def(
      "weighted_meteor",
      [](const TokenSeq& cand, const std::vector<std::pair<TokenSeq, double>>& refs,
         const qweval::MetricConfig& cfg) {
        return qweval::weighted_meteor(cand, to_reference_set(refs), cfg);
      },
      py::arg("candidate"), py::arg("references"), py::arg("config") = cfg_default);
  m.def(
      "weighted_rouge_l",
      [](const TokenSeq& cand, const std::vector<std::pair<TokenSeq, double>>& refs,
         const qweval::MetricConfig& cfg) {
        return qweval::weighted_rouge_l(cand, to_reference_set(refs), cfg);
      },
      py::arg("candidate"), py::arg("references"), py::arg("config") = cfg_default);
  m.def(
      "weighted_cider",
      [](const TokenSeq& cand, const std::vector<std::pair<TokenSeq, double>>& refs,
         const std::vector<qweval::DocumentFrequencyTable>& df,
         const qweval::MetricConfig& cfg) {
        return qweval::weighted_cider(cand, to_reference_set(refs), df, cfg);
      },
      py::arg("candidate"), py::arg("references"), py::arg("df"),
      py::arg("config") = cfg_default);
  m.def(
      "build_df_table",
      [](const std::vector<std::vector<std::pair<TokenSeq, double>>>& corpus,
         int n_max) {
        const auto sets = to_reference_sets(corpus);
        return qweval::build_df_table(sets, n_max);
      },
      py::arg("references"), py::arg("n_max") = 4);
  m.def(
      "meteor_align",
      [](const TokenSeq& cand, const TokenSeq& ref, std::size_t budget) {
        return qweval::meteor_align(cand, ref, budget);
      },
      py::arg("candidate"), py::arg("reference"),
      py::arg("search_budget") = std::size_t{200000});
  m.def(
      "corpus_score",
      [](const std::string& metric, const std::vector<TokenSeq>& candidates,
         const std::vector<std::vector<std::pair<TokenSeq, double>>>& references,
         qweval::MetricConfig cfg) {
        int order = cfg.bleu_max_order;
        const auto which = qweval::parse_metric(metric, &order);
        cfg.bleu_max_order = order;
        const auto sets = to_reference_sets(references);
        std::vector<qweval::DocumentFrequencyTable> df;
        if (which == qweval::Metric::kCider) {
          df = qweval::build_df_table(sets, cfg.cider_max_order);
        }
        return qweval::corpus_score(which, candidates, sets, df, cfg);
      },
      py::arg("metric"), py::arg("candidates"), py::arg("references"),
      py::arg("config") = cfg_default);

  py::class_<qweval::CorrelationResult>(m, "CorrelationResult")
      .def_readonly("coefficient", &qweval::CorrelationResult::coefficient)
      .def_readonly("p_value", &qweval::CorrelationResult::p_value)
      .def_readonly("n", &qweval::CorrelationResult::n)
      .def("__repr__", [](const qweval::CorrelationResult& r) {
        return "CorrelationResult(coefficient=" + std::to_string(r.coefficient) +
               ", p_value=" + std::to_string(r.p_value) + ")";
      });

  m.def(
      "pearson",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        return qweval::pearson(x, y);
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "spearman",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        return qweval::spearman(x, y);
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "average_ranks",
      [](const std::vector<double>& v) { return qweval::average_ranks(v); },
      py::arg("values"));
  m.def(
      "permutation_p_value",
      [](const std::string& method, const std::vector<double>& x,
         const std::vector<double>& y, std::size_t shuffles, std::uint64_t seed) {
        qweval::Rng rng(seed);
        return qweval::permutation_p_value(parse_method(method), x, y, shuffles,
                                           rng);
      },
      py::arg("method"), py::arg("x"), py::arg("y"),
      py::arg("shuffles") = std::size_t{1000}, py::arg("seed") = 0);
  m.def(
      "cohen_weighted_kappa",
      [](const std::vector<std::pair<int, int>>& grades,
         const std::string& weights) {
        return qweval::cohen_weighted_kappa(to_records(grades),
                                            parse_weights(weights));
      },
      py::arg("grades"), py::arg("weights") = "linear");
  m.def(
      "normalize_to_human",
      [](const std::vector<double>& metric, const std::vector<double>& human,
         double lo, double hi) {
        return qweval::normalize_to_human(metric, human, lo, hi);
      },
      py::arg("metric_scores"), py::arg("human_scores"), py::arg("lo") = 1.0,
      py::arg("hi") = 5.0);
  m.def("normalize_quality",
        py::overload_cast<double>(&qweval::normalize_quality),
        py::arg("mean_grade"));
  m.def(
      "jitter",
      [](const std::vector<double>& scores, double sigma, std::uint64_t seed) {
        qweval::Rng rng(seed);
        return qweval::jitter(scores, sigma, rng);
      },
      py::arg("scores"), py::arg("sigma"), py::arg("seed") = 0);

  py::class_<qweval::CommentRecord>(m, "CommentRecord")
      .def_readonly("tokens", &qweval::CommentRecord::tokens)
      .def_readonly("upvotes", &qweval::CommentRecord::upvotes)
      .def_readonly("grades", &qweval::CommentRecord::grades)
      .def_property_readonly("quality", &qweval::CommentRecord::quality);

  py::class_<qweval::Article>(m, "Article")
      .def_readonly("id", &qweval::Article::id)
      .def_readonly("title", &qweval::Article::title)
      .def_readonly("content", &qweval::Article::content)
      .def_readonly("category", &qweval::Article::category)
      .def_readonly("comments", &qweval::Article::comments)
      .def("to_json", [](const qweval::Article& a) {
        return qweval::serialize_article(a);
      });

  m.def(
      "parse_article",
      [](const std::string& line) { return qweval::parse_article(line); },
      py::arg("json_line"));
  m.def("load_corpus", &qweval::load_corpus, py::arg("path"));

  py::class_<qweval::CorpusStats>(m, "CorpusStats")
      .def_readonly("article_count", &qweval::CorpusStats::article_count)
      .def_readonly("comment_count", &qweval::CorpusStats::comment_count)
      .def_readonly("comments_per_article",
                    &qweval::CorpusStats::comments_per_article)
      .def_readonly("upvotes_per_comment",
                    &qweval::CorpusStats::upvotes_per_comment)
      .def_readonly("vocab_size", &qweval::CorpusStats::vocab_size)
      .def_readonly("avg_title_len", &qweval::CorpusStats::avg_title_len)
      .def_readonly("avg_content_len", &qweval::CorpusStats::avg_content_len)
      .def_readonly("avg_comment_len", &qweval::CorpusStats::avg_comment_len)
      .def_readonly("category_histogram",
                    &qweval::CorpusStats::category_histogram);

  m.def(
      "corpus_stats",
      [](const std::vector<qweval::Article>& articles) {
        return qweval::corpus_stats(articles);
      },
      py::arg("articles"));

  py::class_<qweval::ScoredArticle>(m, "ScoredArticle")
      .def_readonly("id", &qweval::ScoredArticle::id)
      .def_readonly("cosine", &qweval::ScoredArticle::cosine);

  py::class_<qweval::TfIdfIndex>(m, "TfIdfIndex")
      .def_property_readonly("mode",
                             [](const qweval::TfIdfIndex& index) {
                               return std::string(
                                   qweval::index_mode_name(index.mode()));
                             })
      .def("__len__", &qweval::TfIdfIndex::size)
      .def("vocabulary_hash", &qweval::TfIdfIndex::vocabulary_hash)
      .def("dumps",
           [](const qweval::TfIdfIndex& index) {
             std::ostringstream out;
             index.save(out);
             return out.str();
           })
      .def_static(
          "loads",
          [](const std::string& text) {
            std::istringstream in(text);
            return qweval::TfIdfIndex::load(in);
          },
          py::arg("text"));

  m.def(
      "build_index",
      [](const std::vector<qweval::Article>& articles, const std::string& mode) {
        return qweval::build_index(articles, qweval::parse_index_mode(mode));
      },
      py::arg("articles"), py::arg("mode") = "title");
  m.def(
      "retrieve_articles",
      [](const qweval::TfIdfIndex& index, const qweval::Article& query,
         std::size_t k) {
        return qweval::retrieve_articles(index, query, k).hits;
      },
      py::arg("index"), py::arg("query"), py::arg("k") = std::size_t{10});
  m.def(
      "retrieve_comment",
      [](const qweval::TfIdfIndex& index,
         const std::vector<qweval::Article>& corpus, const qweval::Article& query,
         std::size_t k) {
        const auto scorer = qweval::make_default_scorer(corpus);
        const auto result =
            qweval::retrieve_comment(index, corpus, query, k, scorer);
        return py::make_tuple(result.comment.tokens, result.comment_article_id,
                              result.relevance);
      },
      py::arg("index"), py::arg("corpus"), py::arg("query"),
      py::arg("k") = std::size_t{10});
}
