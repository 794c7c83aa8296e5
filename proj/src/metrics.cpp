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

#include "qweval/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace qweval {

QualityReference::QualityReference(TokenSeq tokens, double quality)
    : tokens_(std::move(tokens)), quality_(quality) {
  if (!(quality >= 0.0 && quality <= 1.0)) {
    throw std::invalid_argument("reference quality must lie in [0, 1], got " +
                                std::to_string(quality));
  }
}

ReferenceSet::ReferenceSet(std::vector<QualityReference> refs)
    : refs_(std::move(refs)) {
  if (refs_.empty()) throw std::invalid_argument("reference set is empty");
  for (std::size_t j = 0; j < refs_.size(); ++j) {
    if (refs_[j].tokens().empty()) {
      throw std::invalid_argument("reference " + std::to_string(j) +
                                  " is empty");
    }
  }
}

ReferenceSet ReferenceSet::with_unit_quality() const {
  std::vector<QualityReference> out;
  out.reserve(refs_.size());
  for (const auto& r : refs_) out.emplace_back(r.tokens(), 1.0);
  return ReferenceSet(std::move(out));
}

void MetricConfig::validate() const {
  if (bleu_max_order < 1) throw std::invalid_argument("BLEU order must be >= 1");
  if (cider_max_order < 1) {
    throw std::invalid_argument("CIDEr order must be >= 1");
  }
  if (!(rouge_beta > 0.0)) throw std::invalid_argument("ROUGE beta must be > 0");
  if (bleu_smoothing == BleuSmoothing::kEpsilon && !(bleu_epsilon > 0.0)) {
    throw std::invalid_argument("BLEU smoothing epsilon must be > 0");
  }
  if (!(meteor_alpha > 0.0 && meteor_alpha < 1.0)) {
    throw std::invalid_argument("METEOR alpha must lie in (0, 1)");
  }
  if (meteor_penalty_gamma < 0.0 || meteor_penalty_gamma > 1.0) {
    throw std::invalid_argument("METEOR penalty gamma must lie in [0, 1]");
  }
  if (meteor_penalty_power < 0.0) {
    throw std::invalid_argument("METEOR penalty power must be >= 0");
  }
}

// BLEU ----------------------------------------------------------------------

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  if (matched.size() < other.matched.size()) {
    matched.resize(other.matched.size(), 0.0);
    total.resize(other.total.size(), 0.0);
  }
  for (std::size_t n = 0; n < other.matched.size(); ++n) {
    matched[n] += other.matched[n];
    total[n] += other.total[n];
  }
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

MetricScore BleuStats::finalize(const MetricConfig& cfg) const {
  MetricScore score;
  const bool smooth = cfg.bleu_smoothing == BleuSmoothing::kEpsilon;
  double bp = 1.0;
  if (candidate_length > 0.0 && candidate_length < reference_length) {
    bp = std::exp(1.0 - reference_length / candidate_length);
  }
  score.components["bp"] = bp;
  score.components["candidate_length"] = candidate_length;
  score.components["reference_length"] = reference_length;

  bool zero = candidate_length == 0.0;
  double log_sum = 0.0;
  const auto orders = matched.size();
  for (std::size_t n = 0; n < orders; ++n) {
    double p = total[n] > 0.0 ? matched[n] / total[n] : 0.0;
    score.components["p" + std::to_string(n + 1)] = p;
    if (p == 0.0) {
      if (!smooth) {
        zero = true;
        continue;
      }
      p = total[n] > 0.0 ? cfg.bleu_epsilon / total[n] : cfg.bleu_epsilon;
    }
    log_sum += std::log(p) / static_cast<double>(orders);
  }
  score.value = zero || orders == 0 ? 0.0 : bp * std::exp(log_sum);
  return score;
}

BleuStats bleu_stats(TokenSpan candidate, const ReferenceSet& refs,
                     const MetricConfig& cfg) {
  cfg.validate();
  const int max_order = cfg.bleu_max_order;
  BleuStats stats;
  stats.matched.assign(static_cast<std::size_t>(max_order), 0.0);
  stats.total.assign(static_cast<std::size_t>(max_order), 0.0);
  stats.candidate_length = static_cast<double>(candidate.size());

  // Closest reference length, ties to the shorter one.
  const auto c_len = static_cast<long>(candidate.size());
  long best_len = -1;
  for (const auto& ref : refs) {
    const auto len = static_cast<long>(ref.tokens().size());
    if (best_len < 0) {
      best_len = len;
      continue;
    }
    const long d = std::labs(len - c_len), best_d = std::labs(best_len - c_len);
    if (d < best_d || (d == best_d && len < best_len)) best_len = len;
  }
  stats.reference_length = static_cast<double>(best_len);

  for (int n = 1; n <= max_order; ++n) {
    const auto cand = ngram_profile(candidate, n);
    std::vector<NGramProfile> ref_profiles;
    ref_profiles.reserve(refs.size());
    for (const auto& ref : refs) {
      ref_profiles.push_back(ngram_profile(ref.tokens(), n));
    }
    double matched = 0.0;
    for (const auto& [key, count] : cand.counts()) {
      double clip = 0.0;
      for (std::size_t j = 0; j < refs.size(); ++j) {
        clip = std::max(clip, refs[j].quality() *
                                  static_cast<double>(ref_profiles[j].count(key)));
      }
      matched += std::min(static_cast<double>(count), clip);
    }
    stats.matched[static_cast<std::size_t>(n - 1)] = matched;
    stats.total[static_cast<std::size_t>(n - 1)] =
        static_cast<double>(cand.total());
  }
  return stats;
}

MetricScore weighted_bleu(TokenSpan candidate, const ReferenceSet& refs,
                          const MetricConfig& cfg) {
  return bleu_stats(candidate, refs, cfg).finalize(cfg);
}

// METEOR alignment --------------------------------------------------------------

namespace {

// Depth-first branch and bound over candidate positions. Each position
// either links to an unused reference position holding the same token or
// stays unlinked; per token type exactly min(count_c, count_r) positions
// link, which is the maximum number of exact matches.
class AlignmentSearch {
 public:
  AlignmentSearch(TokenSpan candidate, TokenSpan reference, std::size_t budget)
      : n_(candidate.size()), m_(reference.size()), budget_(budget) {
    std::unordered_map<std::string, int> ids;
    auto id_of = [&](const std::string& tok) {
      return ids.emplace(tok, static_cast<int>(ids.size())).first->second;
    };
    cand_.reserve(n_);
    for (const auto& t : candidate) cand_.push_back(id_of(t));
    ref_.reserve(m_);
    for (const auto& t : reference) ref_.push_back(id_of(t));

    const auto types = ids.size();
    ref_positions_.resize(types);
    std::vector<int> cand_count(types, 0);
    for (auto t : cand_) ++cand_count[static_cast<std::size_t>(t)];
    for (std::size_t j = 0; j < m_; ++j) {
      ref_positions_[static_cast<std::size_t>(ref_[j])].push_back(j);
    }
    link_quota_.resize(types);
    skip_quota_.resize(types);
    for (std::size_t t = 0; t < types; ++t) {
      const int in_ref = static_cast<int>(ref_positions_[t].size());
      link_quota_[t] = std::min(cand_count[t], in_ref);
      skip_quota_[t] = cand_count[t] - link_quota_[t];
    }

    // A linked position whose preceding bigram never occurs in the
    // reference must open a new chunk; positions of types with no skip
    // quota are always linked.
    std::unordered_set<long long> ref_bigrams;
    for (std::size_t j = 1; j < m_; ++j) {
      ref_bigrams.insert(bigram(ref_[j - 1], ref_[j]));
    }
    forced_chunks_.assign(n_ + 1, 0);
    for (std::size_t i = n_; i-- > 0;) {
      const auto t = static_cast<std::size_t>(cand_[i]);
      const bool always_linked = link_quota_[t] > 0 && skip_quota_[t] == 0;
      const bool opens = i == 0 || !ref_bigrams.count(bigram(cand_[i - 1], cand_[i]));
      forced_chunks_[i] = forced_chunks_[i + 1] + (always_linked && opens ? 1 : 0);
    }

    // Every link from position i on either continues a chunk through a
    // reference bigram occurrence or opens a new chunk, and each reference
    // bigram occurrence can carry at most one continuation.
    std::unordered_map<long long, int> ref_bigram_count, used;
    for (std::size_t j = 1; j < m_; ++j) ++ref_bigram_count[bigram(ref_[j - 1], ref_[j])];
    continuations_.assign(n_ + 1, 0);
    for (std::size_t i = n_; i-- > 0;) {
      continuations_[i] = continuations_[i + 1];
      if (i == 0) continue;
      const auto b = bigram(cand_[i - 1], cand_[i]);
      const auto it = ref_bigram_count.find(b);
      if (it != ref_bigram_count.end() && used[b] < it->second) {
        ++used[b];
        ++continuations_[i];
      }
    }
    for (auto q : link_quota_) total_links_ += static_cast<std::size_t>(q);
    root_bound_ = lower_bound(0);
  }

  MeteorAlignment run() {
    linked_to_.assign(n_, kNone);
    ref_used_.assign(m_, false);
    linked_.assign(link_quota_.size(), 0);
    skipped_.assign(link_quota_.size(), 0);
    best_chunks_ = std::numeric_limits<std::size_t>::max();
    search(0, 0);

    MeteorAlignment out;
    out.optimal = !exhausted_;
    out.chunks = best_chunks_ == std::numeric_limits<std::size_t>::max()
                     ? 0
                     : best_chunks_;
    for (std::size_t i = 0; i < n_; ++i) {
      if (best_links_.size() == n_ && best_links_[i] != kNone) {
        out.links.emplace_back(i, best_links_[i]);
      }
    }
    return out;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  static long long bigram(int a, int b) {
    return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b);
  }

  bool done() const {
    return best_chunks_ == root_bound_ ||
           (exhausted_ && best_chunks_ != std::numeric_limits<std::size_t>::max());
  }

  std::size_t lower_bound(std::size_t i) const {
    const std::size_t remaining = total_links_ - links_made_;
    const std::size_t opened =
        remaining > continuations_[i] ? remaining - continuations_[i] : 0;
    return std::max(forced_chunks_[i], opened);
  }

  void search(std::size_t i, std::size_t chunks) {
    if (++nodes_ > budget_ && !best_links_.empty()) exhausted_ = true;
    if (done()) return;
    if (best_chunks_ != std::numeric_limits<std::size_t>::max() &&
        chunks + lower_bound(i) >= best_chunks_) {
      return;
    }
    if (i == n_) {
      best_chunks_ = chunks;
      best_links_ = linked_to_;
      return;
    }
    const auto t = static_cast<std::size_t>(cand_[i]);
    const std::size_t prev =
        i > 0 && linked_to_[i - 1] != kNone ? linked_to_[i - 1] : kNone;

    if (linked_[t] < link_quota_[t]) {
      // Try chunk extensions first, then positions that could start a
      // chunk continuing at i + 1, then the rest left to right.
      std::vector<std::pair<int, std::size_t>> options;
      for (auto j : ref_positions_[t]) {
        if (ref_used_[j]) continue;
        int rank = 2;
        if (prev != kNone && j == prev + 1) {
          rank = 0;
        } else if (i + 1 < n_ && j + 1 < m_ && cand_[i + 1] == ref_[j + 1]) {
          rank = 1;
        }
        options.emplace_back(rank, j);
      }
      std::stable_sort(options.begin(), options.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [rank, j] : options) {
        ref_used_[j] = true;
        linked_to_[i] = j;
        ++linked_[t];
        ++links_made_;
        search(i + 1, chunks + (rank == 0 ? 0 : 1));
        --links_made_;
        --linked_[t];
        linked_to_[i] = kNone;
        ref_used_[j] = false;
        if (done()) return;
      }
    }
    if (skipped_[t] < skip_quota_[t]) {
      ++skipped_[t];
      search(i + 1, chunks);
      --skipped_[t];
    }
  }

  std::size_t n_, m_;
  std::size_t budget_;
  std::vector<int> cand_, ref_;
  std::vector<std::vector<std::size_t>> ref_positions_;
  std::vector<int> link_quota_, skip_quota_;
  std::vector<std::size_t> forced_chunks_;
  std::vector<std::size_t> continuations_;
  std::size_t total_links_ = 0;
  std::size_t links_made_ = 0;
  std::size_t root_bound_ = 0;

  std::vector<std::size_t> linked_to_;
  std::vector<bool> ref_used_;
  std::vector<int> linked_, skipped_;
  std::size_t nodes_ = 0;
  bool exhausted_ = false;
  std::size_t best_chunks_ = 0;
  std::vector<std::size_t> best_links_;
};

double fmean(double precision, double recall, double alpha) {
  if (precision <= 0.0 || recall <= 0.0) return 0.0;
  return precision * recall / (alpha * precision + (1.0 - alpha) * recall);
}

double fragmentation_penalty(double chunks, double matches,
                             const MetricConfig& cfg) {
  if (matches <= 0.0) return 0.0;
  return cfg.meteor_penalty_gamma *
         std::pow(chunks / matches, cfg.meteor_penalty_power);
}

}  // namespace

MeteorAlignment meteor_align(TokenSpan candidate, TokenSpan reference,
                             std::size_t search_budget) {
  if (candidate.empty() || reference.empty()) return {};
  return AlignmentSearch(candidate, reference, search_budget).run();
}

MeteorStats& MeteorStats::operator+=(const MeteorStats& other) {
  weighted_matches += other.weighted_matches;
  matches += other.matches;
  chunks += other.chunks;
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

MetricScore MeteorStats::finalize(const MetricConfig& cfg) const {
  MetricScore score;
  const double p = candidate_length > 0.0 ? weighted_matches / candidate_length : 0.0;
  const double r = reference_length > 0.0 ? weighted_matches / reference_length : 0.0;
  const double f = fmean(p, r, cfg.meteor_alpha);
  const double penalty = fragmentation_penalty(chunks, matches, cfg);
  score.components["precision"] = p;
  score.components["recall"] = r;
  score.components["fmean"] = f;
  score.components["penalty"] = penalty;
  score.components["matches"] = matches;
  score.components["chunks"] = chunks;
  score.value = (1.0 - penalty) * f;
  return score;
}

MeteorStats meteor_stats(TokenSpan candidate, const ReferenceSet& refs,
                         const MetricConfig& cfg, MetricScore* sentence) {
  cfg.validate();
  MeteorStats best;
  best.candidate_length = static_cast<double>(candidate.size());
  best.reference_length = static_cast<double>(refs[0].tokens().size());
  double best_value = -1.0;
  std::size_t best_j = 0;
  std::vector<double> per_ref;
  per_ref.reserve(refs.size());
  bool all_optimal = true;

  for (std::size_t j = 0; j < refs.size(); ++j) {
    const auto& ref = refs[j];
    const auto alignment =
        meteor_align(candidate, ref.tokens(), cfg.meteor_search_budget);
    all_optimal = all_optimal && alignment.optimal;
    const auto m = static_cast<double>(alignment.matches());
    const auto c_len = static_cast<double>(candidate.size());
    const auto r_len = static_cast<double>(ref.tokens().size());
    const double f = fmean(c_len > 0 ? m / c_len : 0.0, m / r_len, cfg.meteor_alpha);
    const double penalty =
        fragmentation_penalty(static_cast<double>(alignment.chunks), m, cfg);
    const double value = ref.quality() * (1.0 - penalty) * f;
    per_ref.push_back(value);
    if (value > best_value) {
      best_value = value;
      best_j = j;
      best.weighted_matches = ref.quality() * m;
      best.matches = m;
      best.chunks = static_cast<double>(alignment.chunks);
      best.reference_length = r_len;
    }
  }
  if (sentence) {
    *sentence = best.finalize(cfg);
    sentence->value = best_value;
    sentence->per_reference = std::move(per_ref);
    sentence->best_reference = best_j;
    sentence->components["quality"] = refs[best_j].quality();
    sentence->components["alignment_optimal"] = all_optimal ? 1.0 : 0.0;
  }
  return best;
}

MetricScore weighted_meteor(TokenSpan candidate, const ReferenceSet& refs,
                            const MetricConfig& cfg) {
  MetricScore score;
  meteor_stats(candidate, refs, cfg, &score);
  return score;
}

// ROUGE-L -------------------------------------------------------------------

MetricScore weighted_rouge_l(TokenSpan candidate, const ReferenceSet& refs,
                             const MetricConfig& cfg) {
  cfg.validate();
  MetricScore score;
  std::vector<double> credit(candidate.size(), 0.0);
  double ref_len_sum = 0.0;
  for (const auto& ref : refs) {
    ref_len_sum += static_cast<double>(ref.tokens().size());
    const auto positions = lcs_positions(candidate, ref.tokens());
    score.per_reference.push_back(static_cast<double>(positions.size()));
    for (auto p : positions) credit[p] = std::max(credit[p], ref.quality());
  }
  double union_mass = 0.0;
  for (double c : credit) union_mass += c;
  const double mean_ref_len = ref_len_sum / static_cast<double>(refs.size());

  const double prc =
      candidate.empty() ? 0.0 : union_mass / static_cast<double>(candidate.size());
  // The union may exceed the mean reference length; recall saturates at 1.
  const double rec = std::min(1.0, union_mass / mean_ref_len);
  const double beta2 = cfg.rouge_beta * cfg.rouge_beta;
  score.components["union"] = union_mass;
  score.components["precision"] = prc;
  score.components["recall"] = rec;
  score.components["mean_reference_length"] = mean_ref_len;
  if (prc > 0.0 && rec > 0.0) {
    score.value = (1.0 + beta2) * prc * rec / (rec + beta2 * prc);
  }
  return score;
}

// CIDEr ---------------------------------------------------------------------

MetricScore weighted_cider(TokenSpan candidate, const ReferenceSet& refs,
                           std::span<const DocumentFrequencyTable> df,
                           const MetricConfig& cfg) {
  cfg.validate();
  const int max_order = cfg.cider_max_order;
  std::vector<const DocumentFrequencyTable*> tables(
      static_cast<std::size_t>(max_order), nullptr);
  for (const auto& table : df) {
    if (table.order() >= 1 && table.order() <= max_order) {
      tables[static_cast<std::size_t>(table.order() - 1)] = &table;
    }
  }
  for (int n = 1; n <= max_order; ++n) {
    if (!tables[static_cast<std::size_t>(n - 1)]) {
      throw std::invalid_argument("no document-frequency table for order " +
                                  std::to_string(n));
    }
  }

  MetricScore score;
  score.per_reference.assign(refs.size(), 0.0);
  const double order_weight = 1.0 / static_cast<double>(max_order);
  double total = 0.0;
  for (int n = 1; n <= max_order; ++n) {
    const auto& table = *tables[static_cast<std::size_t>(n - 1)];
    const auto cand_vec = tfidf_vector(candidate, n, table);
    double order_sum = 0.0;
    for (std::size_t j = 0; j < refs.size(); ++j) {
      const double cos = cosine(cand_vec, tfidf_vector(refs[j].tokens(), n, table));
      score.per_reference[j] += order_weight * cos;
      order_sum += refs[j].quality() * cos;
    }
    const double order_score = order_sum / static_cast<double>(refs.size());
    score.components["cider_" + std::to_string(n)] = order_score;
    total += order_weight * order_score;
  }
  score.value = total;
  return score;
}

std::vector<DocumentFrequencyTable> build_df_table(
    std::span<const ReferenceSet> reference_corpus, int n_max) {
  if (reference_corpus.empty()) {
    throw std::invalid_argument("cannot build df tables from an empty corpus");
  }
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  std::vector<DocumentFrequencyTable> tables;
  for (int n = 1; n <= n_max; ++n) tables.emplace_back(n);
  std::vector<TokenSpan> doc;
  for (const auto& refs : reference_corpus) {
    doc.clear();
    for (const auto& r : refs) doc.emplace_back(r.tokens());
    for (auto& table : tables) table.add_document(std::span<const TokenSpan>(doc));
  }
  return tables;
}

// Corpus level --------------------------------------------------------------

std::string metric_label(Metric metric, bool weighted, int bleu_order) {
  std::string base;
  switch (metric) {
    case Metric::kBleu:
      base = "BLEU-" + std::to_string(bleu_order);
      break;
    case Metric::kMeteor:
      base = "METEOR";
      break;
    case Metric::kRougeL:
      base = "ROUGE-L";
      break;
    case Metric::kCider:
      base = "CIDEr";
      break;
  }
  return weighted ? "W-" + base : base;
}

Metric parse_metric(std::string_view name, int* bleu_order) {
  std::string lower;
  for (char ch : name) {
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (lower == "bleu") return Metric::kBleu;
  if (lower.rfind("bleu-", 0) == 0 && lower.size() > 5) {
    int order = 0;
    for (std::size_t i = 5; i < lower.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(lower[i])) || order > 100) {
        throw std::invalid_argument("bad BLEU order in metric name '" +
                                    std::string(name) + "'");
      }
      order = order * 10 + (lower[i] - '0');
    }
    if (order < 1) throw std::invalid_argument("BLEU order must be >= 1");
    if (bleu_order) *bleu_order = order;
    return Metric::kBleu;
  }
  if (lower == "meteor") return Metric::kMeteor;
  if (lower == "rouge-l" || lower == "rouge_l" || lower == "rougel") {
    return Metric::kRougeL;
  }
  if (lower == "cider") return Metric::kCider;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

MetricScore sentence_score(Metric metric, TokenSpan candidate,
                           const ReferenceSet& refs,
                           std::span<const DocumentFrequencyTable> df,
                           const MetricConfig& cfg) {
  switch (metric) {
    case Metric::kBleu:
      return weighted_bleu(candidate, refs, cfg);
    case Metric::kMeteor:
      return weighted_meteor(candidate, refs, cfg);
    case Metric::kRougeL:
      return weighted_rouge_l(candidate, refs, cfg);
    case Metric::kCider:
      return weighted_cider(candidate, refs, df, cfg);
  }
  throw std::logic_error("unhandled metric");
}

CorpusAccumulator::CorpusAccumulator(Metric metric, MetricConfig cfg,
                                     std::span<const DocumentFrequencyTable> df)
    : metric_(metric), cfg_(std::move(cfg)), df_(df) {
  cfg_.validate();
}

MetricScore CorpusAccumulator::add(TokenSpan candidate, const ReferenceSet& refs) {
  MetricScore sentence;
  switch (metric_) {
    case Metric::kBleu: {
      const auto stats = bleu_stats(candidate, refs, cfg_);
      sentence = stats.finalize(cfg_);
      bleu_ += stats;
      break;
    }
    case Metric::kMeteor:
      meteor_ += meteor_stats(candidate, refs, cfg_, &sentence);
      break;
    case Metric::kRougeL:
    case Metric::kCider:
      sentence = sentence_score(metric_, candidate, refs, df_, cfg_);
      sentence_sum_ += sentence.value;
      break;
  }
  ++instances_;
  return sentence;
}

CorpusAccumulator& CorpusAccumulator::merge(const CorpusAccumulator& other) {
  if (other.metric_ != metric_) {
    throw std::invalid_argument("cannot merge accumulators of different metrics");
  }
  bleu_ += other.bleu_;
  meteor_ += other.meteor_;
  sentence_sum_ += other.sentence_sum_;
  instances_ += other.instances_;
  return *this;
}

MetricScore CorpusAccumulator::finalize() const {
  if (instances_ == 0) throw std::invalid_argument("corpus is empty");
  MetricScore out;
  switch (metric_) {
    case Metric::kBleu:
      out = bleu_.finalize(cfg_);
      break;
    case Metric::kMeteor:
      out = meteor_.finalize(cfg_);
      break;
    case Metric::kRougeL:
    case Metric::kCider:
      out.value = sentence_sum_ / static_cast<double>(instances_);
      break;
  }
  out.components["instances"] = static_cast<double>(instances_);
  return out;
}

MetricScore corpus_score(Metric metric, std::span<const TokenSeq> candidates,
                         std::span<const ReferenceSet> references,
                         std::span<const DocumentFrequencyTable> df,
                         const MetricConfig& cfg) {
  if (candidates.size() != references.size()) {
    throw std::invalid_argument(
        "corpus has " + std::to_string(candidates.size()) + " candidates but " +
        std::to_string(references.size()) + " reference sets");
  }
  if (candidates.empty()) throw std::invalid_argument("corpus is empty");
  CorpusAccumulator acc(metric, cfg, df);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    acc.add(candidates[i], references[i]);
  }
  return acc.finalize();
}

}  // namespace qweval
