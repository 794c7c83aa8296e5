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

// Quality-weighted BLEU, METEOR, ROUGE-L and CIDEr.
//
// Every reference carries a quality s in [0, 1]. With all qualities set to 1
// each metric reduces to its usual multi-reference form, so the vanilla
// scores are computed by the same code on a unit-quality ReferenceSet.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qweval/textcore.hpp"

namespace qweval {

class QualityReference {
 public:
  /// Throws std::invalid_argument unless 0 <= quality <= 1.
  QualityReference(TokenSeq tokens, double quality = 1.0);

  const TokenSeq& tokens() const { return tokens_; }
  double quality() const { return quality_; }

 private:
  TokenSeq tokens_;
  double quality_;
};

class ReferenceSet {
 public:
  /// Throws std::invalid_argument for an empty set or an empty reference.
  explicit ReferenceSet(std::vector<QualityReference> refs);

  std::size_t size() const { return refs_.size(); }
  const QualityReference& operator[](std::size_t j) const { return refs_[j]; }
  std::span<const QualityReference> refs() const { return refs_; }
  auto begin() const { return refs_.begin(); }
  auto end() const { return refs_.end(); }

  /// Same references with every quality set to 1.
  ReferenceSet with_unit_quality() const;

 private:
  std::vector<QualityReference> refs_;
};

enum class BleuSmoothing { kOff, kEpsilon };

struct MetricConfig {
  int bleu_max_order = 4;
  BleuSmoothing bleu_smoothing = BleuSmoothing::kOff;
  double bleu_epsilon = 1e-9;
  double rouge_beta = 1.2;
  double meteor_penalty_gamma = 0.5;
  double meteor_penalty_power = 3.0;
  /// F = P*R / (alpha*P + (1-alpha)*R); 0.9 gives 10PR / (R + 9P).
  double meteor_alpha = 0.9;
  /// Search nodes per (candidate, reference) alignment before the best
  /// alignment found so far is returned.
  std::size_t meteor_search_budget = 200000;
  int cider_max_order = 4;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// Sentence or corpus score plus a breakdown of the terms that produced it.
struct MetricScore {
  double value = 0.0;
  std::map<std::string, double> components;
  std::vector<double> per_reference;
  std::optional<std::size_t> best_reference;
};

// BLEU ----------------------------------------------------------------------

/// Sufficient statistics; summing them over instances gives corpus BLEU.
struct BleuStats {
  std::vector<double> matched;  // weighted clipped n-gram mass per order
  std::vector<double> total;    // candidate n-gram count per order
  double candidate_length = 0.0;
  double reference_length = 0.0;  // closest reference length

  BleuStats& operator+=(const BleuStats& other);
  MetricScore finalize(const MetricConfig& cfg) const;
};

BleuStats bleu_stats(TokenSpan candidate, const ReferenceSet& refs,
                     const MetricConfig& cfg);
MetricScore weighted_bleu(TokenSpan candidate, const ReferenceSet& refs,
                          const MetricConfig& cfg = {});

// METEOR --------------------------------------------------------------------

struct MeteorAlignment {
  /// (candidate index, reference index), ascending by candidate index.
  std::vector<std::pair<std::size_t, std::size_t>> links;
  std::size_t chunks = 0;
  /// False when the search budget ran out before optimality was proven.
  bool optimal = true;

  std::size_t matches() const { return links.size(); }
};

/// One-to-one exact-token alignment with the most links and, among those,
/// the fewest chunks.
MeteorAlignment meteor_align(TokenSpan candidate, TokenSpan reference,
                             std::size_t search_budget = 200000);

struct MeteorStats {
  double weighted_matches = 0.0;  // s * matches of the chosen reference
  double matches = 0.0;
  double chunks = 0.0;
  double candidate_length = 0.0;
  double reference_length = 0.0;

  MeteorStats& operator+=(const MeteorStats& other);
  MetricScore finalize(const MetricConfig& cfg) const;
};

/// Statistics of the reference maximizing s * (1 - penalty) * F_mean.
MeteorStats meteor_stats(TokenSpan candidate, const ReferenceSet& refs,
                         const MetricConfig& cfg,
                         MetricScore* sentence = nullptr);
MetricScore weighted_meteor(TokenSpan candidate, const ReferenceSet& refs,
                            const MetricConfig& cfg = {});

// ROUGE-L -------------------------------------------------------------------

/// Union-LCS F-measure. Each candidate position is credited with the
/// largest quality among references whose LCS covers it; recall divides by
/// the mean reference length.
MetricScore weighted_rouge_l(TokenSpan candidate, const ReferenceSet& refs,
                             const MetricConfig& cfg = {});

// CIDEr ---------------------------------------------------------------------

/// (1/K) sum_n (1/N) sum_j s_j cos(g_n(c), g_n(r_j)) without the x10 scale.
/// `df` must hold a table for every order 1..cfg.cider_max_order.
MetricScore weighted_cider(TokenSpan candidate, const ReferenceSet& refs,
                           std::span<const DocumentFrequencyTable> df,
                           const MetricConfig& cfg = {});

/// df tables with one document per reference set.
std::vector<DocumentFrequencyTable> build_df_table(
    std::span<const ReferenceSet> reference_corpus, int n_max);

// Corpus level ----------------------------------------------------------------

enum class Metric { kBleu, kMeteor, kRougeL, kCider };

/// "BLEU-4", "W-METEOR", ... as printed in reports.
std::string metric_label(Metric metric, bool weighted, int bleu_order = 4);
/// Accepts bleu, bleu-N, meteor, rouge-l, cider (case-insensitive). Sets
/// *bleu_order when the name carries one.
Metric parse_metric(std::string_view name, int* bleu_order = nullptr);

MetricScore sentence_score(Metric metric, TokenSpan candidate,
                           const ReferenceSet& refs,
                           std::span<const DocumentFrequencyTable> df,
                           const MetricConfig& cfg);

/// Streams instances into a corpus score. add() returns the sentence score
/// of the instance; merge() combines accumulators built over disjoint
/// shards (sums for BLEU/METEOR, weighted means otherwise).
class CorpusAccumulator {
 public:
  CorpusAccumulator(Metric metric, MetricConfig cfg,
                    std::span<const DocumentFrequencyTable> df = {});

  MetricScore add(TokenSpan candidate, const ReferenceSet& refs);
  CorpusAccumulator& merge(const CorpusAccumulator& other);
  std::size_t instances() const { return instances_; }
  /// Throws std::invalid_argument when no instance was added.
  MetricScore finalize() const;

 private:
  Metric metric_;
  MetricConfig cfg_;
  std::span<const DocumentFrequencyTable> df_;
  std::size_t instances_ = 0;
  BleuStats bleu_;
  MeteorStats meteor_;
  double sentence_sum_ = 0.0;
};

/// BLEU and METEOR sum sufficient statistics before scoring once; ROUGE-L
/// and CIDEr average sentence scores. Throws std::invalid_argument when the
/// inputs are empty or misaligned.
MetricScore corpus_score(Metric metric, std::span<const TokenSeq> candidates,
                         std::span<const ReferenceSet> references,
                         std::span<const DocumentFrequencyTable> df,
                         const MetricConfig& cfg);

}  // namespace qweval
