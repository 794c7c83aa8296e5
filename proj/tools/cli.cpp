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

#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qweval/dataset.hpp"
#include "qweval/metrics.hpp"
#include "qweval/retrieval.hpp"
#include "qweval/stats.hpp"

namespace qweval::cli {
namespace {

using ojson = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";
constexpr const char* kQualityMap = "(mean_grade - 1) / 4";

class CommandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string join_tokens(const TokenSeq& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

// Output ----------------------------------------------------------------------

struct OutputOptions {
  std::string path;
  std::string format = "jsonl";
};

void add_output_options(CLI::App* cmd, OutputOptions& o) {
  cmd->add_option("-o,--output,--report", o.path, "Write the report here instead of stdout");
  cmd->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"jsonl", "table"}))
      ->capture_default_str();
}

/// Header with the effective configuration, then line-delimited records or
/// an aligned table.
class Report {
 public:
  Report(std::string command, ojson config)
      : command_(std::move(command)), config_(std::move(config)) {}

  void add(ojson record) { records_.push_back(std::move(record)); }
  void columns(std::vector<std::string> names) { columns_ = std::move(names); }
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  void write(const OutputOptions& opts, std::ostream& fallback) const {
    std::ofstream file;
    std::ostream* out = &fallback;
    if (!opts.path.empty()) {
      file.open(opts.path, std::ios::binary);
      if (!file) throw CommandError("cannot write report to '" + opts.path + "'");
      out = &file;
    }
    if (opts.format == "table") {
      write_table(*out);
    } else {
      write_jsonl(*out);
    }
    out->flush();
  }

 private:
  void write_jsonl(std::ostream& out) const {
    ojson header;
    header["type"] = "header";
    header["tool"] = "qweval";
    header["version"] = kVersion;
    header["command"] = command_;
    header["config"] = config_;
    out << header.dump() << '\n';
    for (const auto& r : records_) out << r.dump() << '\n';
  }

  void write_table(std::ostream& out) const {
    out << "# qweval " << kVersion << ' ' << command_ << '\n';
    out << "# config: " << config_.dump() << '\n';
    std::vector<std::size_t> width(columns_.size(), 0);
    for (std::size_t c = 0; c < columns_.size(); ++c) width[c] = columns_[c].size();
    for (const auto& r : rows_) {
      for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) {
        width[c] = std::max(width[c], r[c].size());
      }
    }
    auto line = [&](const std::vector<std::string>& cells) {
      std::string s;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        s += cells[c];
        if (c + 1 < cells.size()) s += std::string(width[c] - cells[c].size() + 2, ' ');
      }
      out << s << '\n';
    };
    line(columns_);
    for (const auto& r : rows_) line(r);
  }

  std::string command_;
  ojson config_;
  std::vector<ojson> records_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// Inputs ------------------------------------------------------------------------

template <typename Fn>
void read_jsonl(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw CommandError("cannot open '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const ojson::parse_error& e) {
      throw CommandError(path + ":" + std::to_string(lineno) + ": invalid JSON: " +
                         e.what());
    }
    try {
      fn(lineno, j);
    } catch (const CommandError&) {
      throw;
    } catch (const std::exception& e) {
      throw CommandError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::string string_field(const ojson& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw std::invalid_argument(std::string("field '") + key + "': expected a string");
  }
  return it->get<std::string>();
}

std::vector<Article> load_articles(const std::string& path) {
  try {
    return load_corpus(path);
  } catch (const CorpusFormatError& e) {
    throw CommandError(e.what());
  } catch (const std::runtime_error& e) {
    throw CommandError(e.what());
  }
}

void write_articles(const std::string& path, std::span<const Article> articles) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CommandError("cannot write corpus to '" + path + "'");
  write_corpus(out, articles);
}

struct Candidate {
  std::string article_id;
  std::string candidate_id;
  TokenSeq tokens;
  std::size_t line = 0;
};

std::vector<Candidate> load_candidates(const std::string& path) {
  std::vector<Candidate> out;
  read_jsonl(path, [&](std::size_t lineno, const ojson& j) {
    Candidate c;
    c.line = lineno;
    c.article_id = string_field(j, "article_id");
    c.candidate_id = string_field(j, "candidate_id");
    const auto it = j.find("tokens");
    if (it == j.end() || !it->is_array()) {
      throw std::invalid_argument("field 'tokens': expected an array of strings");
    }
    for (const auto& t : *it) {
      if (!t.is_string()) throw std::invalid_argument("field 'tokens': expected strings");
      c.tokens.push_back(t.get<std::string>());
    }
    validate_tokens(c.tokens);
    out.push_back(std::move(c));
  });
  return out;
}

std::string join_key(const std::string& article, const std::string& candidate) {
  return article + '\t' + candidate;
}

// Seeds -------------------------------------------------------------------------

struct SeedOption {
  std::uint64_t value = 0;
  CLI::Option* opt = nullptr;

  void add(CLI::App* cmd) {
    opt = cmd->add_option("--seed", value,
                          "64-bit seed; a random one is drawn and reported if omitted");
  }
  /// Returns the seed and records it (and whether it was generated) in `config`.
  std::uint64_t resolve(ojson& config) {
    const bool generated = opt->count() == 0;
    if (generated) {
      std::random_device rd;
      value = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    config["seed"] = value;
    config["seed_generated"] = generated;
    return value;
  }
};

// score ----------------------------------------------------------------------------

struct ScoreOptions {
  std::string corpus;
  std::string candidates;
  std::vector<std::string> metrics;
  bool weighted = false;
  bool unweighted = false;
  double assume_quality = 1.0;
  CLI::Option* assume_opt = nullptr;
  int bleu_order = 4;
  std::string bleu_smoothing = "off";
  double rouge_beta = 1.2;
  int cider_order = 4;
  std::size_t meteor_budget = MetricConfig{}.meteor_search_budget;
  OutputOptions out;
};

struct MetricSpec {
  Metric metric;
  MetricConfig cfg;
  std::string label;
};

std::vector<MetricSpec> parse_metric_specs(const ScoreOptions& o, const MetricConfig& base,
                                           bool weighted) {
  std::vector<std::string> names;
  for (const auto& entry : o.metrics) {
    std::stringstream ss(entry);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) names.push_back(part);
    }
  }
  if (names.empty()) names = {"bleu", "meteor", "rouge-l", "cider"};
  std::vector<MetricSpec> specs;
  for (const auto& name : names) {
    int order = base.bleu_max_order;
    MetricSpec spec{parse_metric(name, &order), base, {}};
    spec.cfg.bleu_max_order = order;
    spec.label = metric_label(spec.metric, weighted, order);
    if (std::none_of(specs.begin(), specs.end(),
                     [&](const MetricSpec& s) { return s.label == spec.label; })) {
      specs.push_back(std::move(spec));
    }
  }
  return specs;
}

ReferenceSet reference_set(const Article& a, bool weighted,
                           std::optional<double> assumed) {
  std::vector<QualityReference> refs;
  for (std::size_t i = 0; i < a.comments.size(); ++i) {
    const auto& c = a.comments[i];
    const auto where = "article '" + a.id + "' comments[" + std::to_string(i) + "]";
    if (c.tokens.empty()) throw CommandError(where + ": empty reference comment");
    double s = 1.0;
    if (weighted) {
      if (auto q = c.quality()) {
        s = *q;
      } else if (assumed) {
        s = *assumed;
      } else {
        throw CommandError(where +
                           ": field 'grades' missing; weighted scoring needs graded "
                           "references (use --assume-quality or --unweighted)");
      }
    }
    refs.emplace_back(c.tokens, s);
  }
  if (refs.empty()) throw CommandError("article '" + a.id + "' has no reference comments");
  return ReferenceSet(std::move(refs));
}

void cmd_score(ScoreOptions& o, std::ostream& out) {
  const bool weighted = !o.unweighted;
  std::optional<double> assumed;
  if (o.assume_opt->count()) {
    if (!(o.assume_quality >= 0.0 && o.assume_quality <= 1.0)) {
      throw CommandError("--assume-quality must lie in [0, 1]");
    }
    assumed = o.assume_quality;
  }

  MetricConfig base;
  base.bleu_max_order = o.bleu_order;
  base.bleu_smoothing =
      o.bleu_smoothing == "epsilon" ? BleuSmoothing::kEpsilon : BleuSmoothing::kOff;
  base.rouge_beta = o.rouge_beta;
  base.cider_max_order = o.cider_order;
  base.meteor_search_budget = o.meteor_budget;
  base.validate();
  const auto specs = parse_metric_specs(o, base, weighted);

  const auto corpus = load_articles(o.corpus);
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < corpus.size(); ++i) by_id.emplace(corpus[i].id, i);
  const auto candidates = load_candidates(o.candidates);
  if (candidates.empty()) throw CommandError(o.candidates + ": no candidates");
  std::string unmatched;
  for (const auto& c : candidates) {
    if (!by_id.count(c.article_id)) {
      unmatched += "\n  " + o.candidates + ":" + std::to_string(c.line) +
                   ": article id '" + c.article_id + "' not in corpus";
    }
  }
  if (!unmatched.empty()) throw CommandError("unmatched candidates:" + unmatched);

  std::map<std::size_t, ReferenceSet> refsets;
  for (const auto& c : candidates) {
    const auto idx = by_id.at(c.article_id);
    if (!refsets.count(idx)) refsets.emplace(idx, reference_set(corpus[idx], weighted, assumed));
  }

  std::vector<DocumentFrequencyTable> df;
  const bool need_df = std::any_of(specs.begin(), specs.end(), [](const MetricSpec& s) {
    return s.metric == Metric::kCider;
  });
  if (need_df) {
    std::vector<std::vector<TokenSeq>> docs;
    for (const auto& a : corpus) {
      std::vector<TokenSeq> doc;
      for (const auto& c : a.comments) doc.push_back(c.tokens);
      if (!doc.empty()) docs.push_back(std::move(doc));
    }
    df = build_df_table(std::span<const std::vector<TokenSeq>>(docs), o.cider_order);
  }

  ojson config;
  config["corpus"] = o.corpus;
  config["candidates"] = o.candidates;
  config["metrics"] = ojson::array();
  for (const auto& s : specs) config["metrics"].push_back(s.label);
  config["weighted"] = weighted;
  config["assume_quality"] = assumed ? ojson(*assumed) : ojson(nullptr);
  config["quality_map"] = weighted ? kQualityMap : "constant 1";
  config["bleu_order"] = o.bleu_order;
  config["bleu_smoothing"] = o.bleu_smoothing;
  config["bleu_epsilon"] = base.bleu_epsilon;
  config["rouge_beta"] = base.rouge_beta;
  config["meteor"] = {{"alpha", base.meteor_alpha},
                      {"gamma", base.meteor_penalty_gamma},
                      {"power", base.meteor_penalty_power},
                      {"search_budget", base.meteor_search_budget}};
  config["cider_order"] = base.cider_max_order;
  config["cider_df"] = "one document per article reference set";
  Report report("score", config);

  std::vector<std::string> columns = {"article_id", "candidate_id"};
  for (const auto& s : specs) columns.push_back(s.label);
  report.columns(columns);

  std::vector<CorpusAccumulator> accs;
  for (const auto& s : specs) accs.emplace_back(s.metric, s.cfg, df);
  std::size_t nonoptimal = 0;
  for (const auto& c : candidates) {
    const auto& refs = refsets.at(by_id.at(c.article_id));
    ojson scores = ojson::object();
    std::vector<std::string> cells = {c.article_id, c.candidate_id};
    for (std::size_t m = 0; m < specs.size(); ++m) {
      const auto sentence = accs[m].add(c.tokens, refs);
      if (specs[m].metric == Metric::kMeteor) {
        const auto it = sentence.components.find("alignment_optimal");
        if (it != sentence.components.end() && it->second == 0.0) ++nonoptimal;
      }
      scores[specs[m].label] = sentence.value;
      cells.push_back(fixed(sentence.value, 6));
    }
    ojson record;
    record["type"] = "instance";
    record["article_id"] = c.article_id;
    record["candidate_id"] = c.candidate_id;
    record["scores"] = std::move(scores);
    report.add(std::move(record));
    report.row(std::move(cells));
  }

  ojson corpus_scores = ojson::object();
  std::vector<std::string> cells = {"corpus", "-"};
  for (std::size_t m = 0; m < specs.size(); ++m) {
    const double v = accs[m].finalize().value;
    corpus_scores[specs[m].label] = v;
    cells.push_back(fixed(v, 6));
  }
  ojson record;
  record["type"] = "corpus";
  record["instances"] = candidates.size();
  record["scores"] = std::move(corpus_scores);
  if (nonoptimal) record["meteor_nonoptimal_alignments"] = nonoptimal;
  report.add(std::move(record));
  report.row(std::move(cells));
  report.write(o.out, out);
}

// correlate ------------------------------------------------------------------------

struct CorrelateOptions {
  std::string human;
  std::string metrics;
  bool normalize = false;
  double jitter_sigma = 0.0;
  std::string pvalue = "t";
  std::size_t permutations = 1000;
  SeedOption seed;
  OutputOptions out;
};

struct HumanEntry {
  double score = 0.0;
  std::optional<std::array<int, 2>> grades;
};

void cmd_correlate(CorrelateOptions& o, std::ostream& out) {
  if (!(o.jitter_sigma >= 0.0)) throw CommandError("--jitter-sigma must be >= 0");

  std::unordered_map<std::string, HumanEntry> human;
  std::vector<std::string> human_order;
  read_jsonl(o.human, [&](std::size_t, const ojson& j) {
    const auto key = join_key(string_field(j, "article_id"), string_field(j, "candidate_id"));
    HumanEntry e;
    if (const auto g = j.find("grades"); g != j.end() && !g->is_null()) {
      if (!g->is_array() || g->size() != 2 || !(*g)[0].is_number_integer() ||
          !(*g)[1].is_number_integer()) {
        throw std::invalid_argument("field 'grades': expected two integer grades");
      }
      std::array<int, 2> grades{(*g)[0].get<int>(), (*g)[1].get<int>()};
      for (int v : grades) {
        if (v < 1 || v > 5) throw std::invalid_argument("field 'grades': grade outside 1..5");
      }
      e.grades = grades;
      e.score = (grades[0] + grades[1]) / 2.0;
    }
    if (const auto s = j.find("score"); s != j.end()) {
      if (!s->is_number()) throw std::invalid_argument("field 'score': expected a number");
      e.score = s->get<double>();
    } else if (!e.grades) {
      throw std::invalid_argument("record needs 'score' or 'grades'");
    }
    if (!human.emplace(key, e).second) {
      throw std::invalid_argument("duplicate human score for this article/candidate");
    }
    human_order.push_back(key);
  });

  struct Item {
    std::string article_id, candidate_id;
    ojson scores;
  };
  std::vector<Item> items;
  std::vector<std::string> labels;
  read_jsonl(o.metrics, [&](std::size_t, const ojson& j) {
    if (j.value("type", "") != "instance") return;
    Item item{string_field(j, "article_id"), string_field(j, "candidate_id"),
              j.at("scores")};
    if (labels.empty()) {
      for (const auto& [label, v] : item.scores.items()) labels.push_back(label);
    }
    items.push_back(std::move(item));
  });
  if (items.empty()) throw CommandError(o.metrics + ": no instance records");

  std::string mismatch;
  std::unordered_map<std::string, bool> in_report;
  for (const auto& it : items) {
    const auto key = join_key(it.article_id, it.candidate_id);
    in_report[key] = true;
    if (!human.count(key)) {
      mismatch += "\n  no human score for article '" + it.article_id + "' candidate '" +
                  it.candidate_id + "'";
    }
  }
  for (const auto& key : human_order) {
    if (!in_report.count(key)) {
      const auto tab = key.find('\t');
      mismatch += "\n  no metric scores for article '" + key.substr(0, tab) +
                  "' candidate '" + key.substr(tab + 1) + "'";
    }
  }
  if (!mismatch.empty()) throw CommandError("join mismatch:" + mismatch);

  std::vector<double> h;
  h.reserve(items.size());
  for (const auto& it : items) h.push_back(human.at(join_key(it.article_id, it.candidate_id)).score);
  std::map<std::string, std::vector<double>> columns;
  for (const auto& label : labels) {
    auto& col = columns[label];
    for (const auto& it : items) {
      const auto v = it.scores.find(label);
      if (v == it.scores.end() || !v->is_number()) {
        throw CommandError("metric report: article '" + it.article_id + "' candidate '" +
                           it.candidate_id + "' lacks a numeric '" + label + "' score");
      }
      col.push_back(v->get<double>());
    }
  }

  const bool all_graded = std::all_of(items.begin(), items.end(), [&](const Item& it) {
    return human.at(join_key(it.article_id, it.candidate_id)).grades.has_value();
  });
  const bool random = o.pvalue == "permutation" || o.jitter_sigma > 0.0 || all_graded;

  ojson config;
  config["human"] = o.human;
  config["metrics"] = o.metrics;
  config["pvalue"] = o.pvalue;
  if (o.pvalue == "permutation") config["permutations"] = o.permutations;
  config["normalize"] = o.normalize;
  if (o.normalize) config["normalize_range"] = {1.0, 5.0};
  config["jitter_sigma"] = o.jitter_sigma;
  Rng rng;
  if (random) rng.seed(o.seed.resolve(config));
  Report report("correlate", config);
  report.columns({"Metric", "Spearman", "Pearson"});

  auto emit = [&](const std::string& label, const CorrelationResult& rho,
                  const CorrelationResult& r) {
    ojson rec;
    rec["type"] = "correlation";
    rec["metric"] = label;
    rec["spearman"] = rho.coefficient;
    rec["spearman_p"] = rho.p_value;
    rec["pearson"] = r.coefficient;
    rec["pearson_p"] = r.p_value;
    rec["n"] = r.n;
    report.add(std::move(rec));
    report.row({label, fixed(rho.coefficient, 4), fixed(r.coefficient, 4)});
  };

  for (const auto& label : labels) {
    const auto& m = columns.at(label);
    CorrelationResult rho, r;
    try {
      rho = spearman(h, m);
      r = pearson(h, m);
    } catch (const UndefinedCorrelation& e) {
      throw CommandError(label + ": " + e.what());
    }
    if (o.pvalue == "permutation") {
      rho.p_value = permutation_p_value(CorrelationMethod::kSpearman, h, m, o.permutations, rng);
      r.p_value = permutation_p_value(CorrelationMethod::kPearson, h, m, o.permutations, rng);
    }
    emit(label, rho, r);
  }

  if (all_graded) {
    std::vector<AnnotationRecord> records;
    for (const auto& it : items) {
      records.push_back({join_key(it.article_id, it.candidate_id),
                         *human.at(join_key(it.article_id, it.candidate_id)).grades});
    }
    try {
      const auto baseline = human_human_baseline(records, rng);
      emit("Human", baseline.spearman, baseline.pearson);
    } catch (const UndefinedCorrelation& e) {
      throw CommandError(std::string("Human: ") + e.what());
    }
  }

  if (o.normalize) {
    std::map<std::string, std::vector<double>> normalized;
    for (const auto& label : labels) {
      try {
        normalized[label] = normalize_to_human(columns.at(label), h);
      } catch (const std::invalid_argument& e) {
        throw CommandError(label + ": " + e.what());
      }
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      ojson rec;
      rec["type"] = "normalized";
      rec["article_id"] = items[i].article_id;
      rec["candidate_id"] = items[i].candidate_id;
      rec["human"] = h[i];
      ojson scores = ojson::object();
      for (const auto& label : labels) scores[label] = normalized.at(label)[i];
      rec["scores"] = std::move(scores);
      report.add(std::move(rec));
    }
  }

  if (o.jitter_sigma > 0.0) {
    const auto jittered = jitter(h, o.jitter_sigma, rng);
    for (std::size_t i = 0; i < items.size(); ++i) {
      ojson rec;
      rec["type"] = "scatter";
      rec["article_id"] = items[i].article_id;
      rec["candidate_id"] = items[i].candidate_id;
      rec["human"] = h[i];
      rec["human_jittered"] = jittered[i];
      rec["scores"] = items[i].scores;
      report.add(std::move(rec));
    }
  }
  report.write(o.out, out);
}

// stats / filter / make-test-set / vocab / split -----------------------------------

struct CorpusOptions {
  std::string corpus;
  std::string corpus_out;
  OutputOptions out;
};

void cmd_stats(CorpusOptions& o, std::ostream& out) {
  std::ifstream in(o.corpus);
  if (!in) throw CommandError("cannot open corpus file '" + o.corpus + "'");
  CorpusStatsAccumulator acc;
  try {
    for_each_article(in, [&](Article&& a) { acc.add(a); }, o.corpus);
  } catch (const CorpusFormatError& e) {
    throw CommandError(e.what());
  }
  CorpusStats s;
  try {
    s = acc.finish();
  } catch (const std::invalid_argument&) {
    throw CommandError(o.corpus + ": corpus is empty");
  }

  ojson config;
  config["corpus"] = o.corpus;
  config["token_unit"] = "word";
  Report report("stats", config);
  ojson rec;
  rec["type"] = "stats";
  rec["articles"] = s.article_count;
  rec["comments"] = s.comment_count;
  rec["comments_per_article"] = s.comments_per_article;
  rec["upvotes_per_comment"] = s.upvotes_per_comment;
  rec["vocab_size"] = s.vocab_size;
  rec["avg_title_len"] = s.avg_title_len;
  rec["avg_content_len"] = s.avg_content_len;
  rec["avg_comment_len"] = s.avg_comment_len;
  rec["categories"] = s.category_histogram;
  report.add(std::move(rec));

  report.columns({"Statistic", "Value"});
  report.row({"# Articles", std::to_string(s.article_count)});
  report.row({"# Comments", std::to_string(s.comment_count)});
  report.row({"Avg. # Cmts per Article", fixed(s.comments_per_article, 2)});
  report.row({"Avg. # Upvotes per Cmt", fixed(s.upvotes_per_comment, 2)});
  report.row({"Vocabulary size", std::to_string(s.vocab_size)});
  report.row({"Avg. title length", fixed(s.avg_title_len, 2)});
  report.row({"Avg. content length", fixed(s.avg_content_len, 2)});
  report.row({"Avg. comment length", fixed(s.avg_comment_len, 2)});
  for (const auto& [cat, n] : s.category_histogram) {
    report.row({"category:" + cat, std::to_string(n)});
  }
  report.write(o.out, out);
}

struct FilterOptions {
  CorpusOptions io;
  FilterRules rules;
};

void cmd_filter(FilterOptions& o, std::ostream& out) {
  const auto corpus = load_articles(o.io.corpus);
  const auto kept = filter_corpus(corpus, o.rules);
  write_articles(o.io.corpus_out, kept);

  ojson config;
  config["corpus"] = o.io.corpus;
  config["corpus_out"] = o.io.corpus_out;
  config["min_content_tokens"] = o.rules.min_content_tokens;
  config["min_comments"] = o.rules.min_comments;
  Report report("filter", config);
  ojson rec;
  rec["type"] = "filter";
  rec["input_articles"] = corpus.size();
  rec["kept"] = kept.size();
  rec["dropped"] = corpus.size() - kept.size();
  report.add(std::move(rec));
  report.columns({"Statistic", "Value"});
  report.row({"input_articles", std::to_string(corpus.size())});
  report.row({"kept", std::to_string(kept.size())});
  report.row({"dropped", std::to_string(corpus.size() - kept.size())});
  report.write(o.io.out, out);
}

struct TestSetOptions {
  CorpusOptions io;
  TestSetRules rules;
  std::size_t max_articles = 0;
  CLI::Option* max_opt = nullptr;
  SeedOption seed;
};

void cmd_make_test_set(TestSetOptions& o, std::ostream& out, std::ostream& err) {
  if (o.rules.sample_size == 0) throw CommandError("--sample-size must be >= 1");
  const auto corpus = load_articles(o.io.corpus);
  ojson config;
  config["corpus"] = o.io.corpus;
  config["corpus_out"] = o.io.corpus_out;
  config["min_comments"] = o.rules.min_comments;
  config["comment_tokens_over"] = o.rules.comment_tokens_over;
  config["total_upvotes_over"] = o.rules.total_upvotes_over;
  config["sample_size"] = o.rules.sample_size;
  std::optional<std::size_t> max;
  if (o.max_opt->count()) max = o.max_articles;
  config["max_articles"] = max ? ojson(*max) : ojson(nullptr);
  Rng rng(o.seed.resolve(config));

  const auto selection = select_test_candidates(corpus, rng, o.rules, max);
  write_articles(o.io.corpus_out, selection.articles);

  std::size_t eligible = 0;
  for (const auto& a : corpus) eligible += is_test_eligible(a, o.rules) ? 1 : 0;
  Report report("make-test-set", config);
  ojson rec;
  rec["type"] = "test_set";
  rec["input_articles"] = corpus.size();
  rec["eligible"] = eligible;
  rec["selected"] = selection.articles.size();
  rec["skipped"] = selection.warnings.size();
  report.add(std::move(rec));
  for (const auto& w : selection.warnings) {
    err << "qweval: warning: " << w << '\n';
    report.add(ojson{{"type", "warning"}, {"message", w}});
  }
  report.columns({"Statistic", "Value"});
  report.row({"input_articles", std::to_string(corpus.size())});
  report.row({"eligible", std::to_string(eligible)});
  report.row({"selected", std::to_string(selection.articles.size())});
  report.row({"skipped", std::to_string(selection.warnings.size())});
  report.write(o.io.out, out);
}

struct VocabOptions {
  CorpusOptions io;
  std::string vocab_out;
  std::size_t cap = 30000;
  std::string unk = "<unk>";
  std::size_t max_comment_len = 50;
  bool no_truncate = false;
};

void cmd_vocab(VocabOptions& o, std::ostream& out) {
  auto corpus = load_articles(o.io.corpus);
  if (!o.no_truncate) corpus = truncate_comments(corpus, o.max_comment_len);
  const auto vocab = build_vocab(corpus, o.cap, o.unk);

  if (!o.vocab_out.empty()) {
    std::ofstream v(o.vocab_out, std::ios::binary);
    if (!v) throw CommandError("cannot write vocabulary to '" + o.vocab_out + "'");
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      v << vocab.tokens()[i] << '\t' << vocab.counts()[i] << '\n';
    }
  }
  std::int64_t total = 0, covered = 0;
  std::unordered_map<std::string, bool> seen;
  auto tally = [&](const TokenSeq& seq) {
    for (const auto& t : seq) {
      ++total;
      covered += vocab.contains(t) ? 1 : 0;
      seen.emplace(t, true);
    }
  };
  for (const auto& a : corpus) {
    tally(a.title);
    tally(a.content);
    for (const auto& c : a.comments) tally(c.tokens);
  }
  if (!o.io.corpus_out.empty()) write_articles(o.io.corpus_out, apply_vocab(corpus, vocab));

  ojson config;
  config["corpus"] = o.io.corpus;
  config["cap"] = o.cap;
  config["unk"] = o.unk;
  config["max_comment_len"] = o.no_truncate ? ojson(nullptr) : ojson(o.max_comment_len);
  config["vocab_out"] = o.vocab_out;
  config["corpus_out"] = o.io.corpus_out;
  Report report("vocab", config);
  const double coverage = total ? static_cast<double>(covered) / static_cast<double>(total) : 0.0;
  ojson rec;
  rec["type"] = "vocab";
  rec["distinct_tokens"] = seen.size();
  rec["vocab_size"] = vocab.size();
  rec["token_coverage"] = coverage;
  report.add(std::move(rec));
  report.columns({"Statistic", "Value"});
  report.row({"distinct_tokens", std::to_string(seen.size())});
  report.row({"vocab_size", std::to_string(vocab.size())});
  report.row({"token_coverage", fixed(coverage, 6)});
  report.write(o.io.out, out);
}

struct SplitOptions {
  std::string corpus;
  std::vector<std::size_t> sizes;
  std::string prefix;
  SeedOption seed;
  OutputOptions out;
};

void cmd_split(SplitOptions& o, std::ostream& out) {
  if (o.sizes.size() != 3) throw CommandError("--sizes takes exactly three counts");
  const auto corpus = load_articles(o.corpus);
  ojson config;
  config["corpus"] = o.corpus;
  config["sizes"] = o.sizes;
  config["prefix"] = o.prefix;
  Rng rng(o.seed.resolve(config));
  CorpusSplit split;
  try {
    split = split_corpus(corpus, {o.sizes[0], o.sizes[1], o.sizes[2]}, rng);
  } catch (const std::invalid_argument& e) {
    throw CommandError(e.what());
  }
  write_articles(o.prefix + ".train.jsonl", split.train);
  write_articles(o.prefix + ".dev.jsonl", split.dev);
  write_articles(o.prefix + ".test.jsonl", split.test);
  Report report("split", config);
  report.columns({"Split", "Articles"});
  for (const auto& [name, part] : {std::pair{"train", &split.train},
                                   std::pair{"dev", &split.dev},
                                   std::pair{"test", &split.test}}) {
    report.add(ojson{{"type", "split"}, {"split", name}, {"articles", part->size()}});
    report.row({name, std::to_string(part->size())});
  }
  report.write(o.out, out);
}

// retrieve ---------------------------------------------------------------------------

struct RetrieveOptions {
  std::string corpus;
  std::string queries;
  std::string mode = "title";
  std::size_t k = 10;
  std::string index_in;
  std::string index_out;
  std::string candidates_out;
  OutputOptions out;
};

void cmd_retrieve(RetrieveOptions& o, std::ostream& out, std::ostream& err) {
  const auto mode = parse_index_mode(o.mode);
  if (o.k == 0) throw CommandError("--k must be >= 1");
  const auto corpus = load_articles(o.corpus);
  if (corpus.empty()) throw CommandError(o.corpus + ": corpus is empty");
  const auto queries = load_articles(o.queries);

  std::optional<TfIdfIndex> index;
  if (!o.index_in.empty()) {
    std::ifstream in(o.index_in);
    if (!in) throw CommandError("cannot open index '" + o.index_in + "'");
    try {
      index.emplace(TfIdfIndex::load(in));
    } catch (const std::runtime_error& e) {
      throw CommandError(o.index_in + ": " + e.what());
    }
    if (index->mode() != mode) {
      throw CommandError(o.index_in + ": index mode '" +
                         std::string(index_mode_name(index->mode())) +
                         "' differs from --mode");
    }
    bool same = index->size() == corpus.size();
    for (std::size_t i = 0; same && i < corpus.size(); ++i) {
      same = index->entries()[i].id == corpus[i].id;
    }
    if (!same) throw CommandError(o.index_in + ": index was not built from " + o.corpus);
  } else {
    index.emplace(build_index(corpus, mode));
  }
  if (!o.index_out.empty()) {
    std::ofstream f(o.index_out, std::ios::binary);
    if (!f) throw CommandError("cannot write index to '" + o.index_out + "'");
    index->save(f);
  }
  const auto scorer = make_default_scorer(corpus);

  ojson config;
  config["corpus"] = o.corpus;
  config["queries"] = o.queries;
  config["mode"] = index_mode_name(mode);
  config["k"] = o.k;
  config["scorer"] = "tfidf-cosine(comment, title+content)";
  config["index_vocabulary_hash"] = index->vocabulary_hash();
  Report report("retrieve", config);
  report.columns({"query_id", "top_article", "cosine", "relevance", "comment"});

  std::ofstream cand_file;
  if (!o.candidates_out.empty()) {
    cand_file.open(o.candidates_out, std::ios::binary);
    if (!cand_file) throw CommandError("cannot write candidates to '" + o.candidates_out + "'");
  }
  const std::string system = mode == IndexMode::kTitle ? "IR-T" : "IR-TC";
  for (const auto& q : queries) {
    RetrievalResult r;
    try {
      r = retrieve_comment(*index, corpus, q, o.k, scorer);
    } catch (const EmptyCandidatePool& e) {
      throw CommandError(e.what());
    }
    if (r.truncated) {
      err << "qweval: warning: query '" << q.id << "': only " << r.candidates.size()
          << " articles available for k = " << o.k << '\n';
    }
    ojson rec;
    rec["type"] = "retrieval";
    rec["query_id"] = r.query_id;
    auto cands = ojson::array();
    for (const auto& c : r.candidates) cands.push_back(ojson{{"id", c.id}, {"cosine", c.cosine}});
    rec["candidates"] = std::move(cands);
    rec["truncated"] = r.truncated;
    rec["comment"] = ojson{{"article_id", r.comment_article_id}, {"tokens", r.comment.tokens}};
    rec["relevance"] = r.relevance;
    report.add(std::move(rec));
    report.row({r.query_id, r.candidates.front().id, fixed(r.candidates.front().cosine, 6),
                fixed(r.relevance, 6), join_tokens(r.comment.tokens)});
    if (cand_file.is_open()) {
      ojson c;
      c["article_id"] = q.id;
      c["candidate_id"] = system;
      c["tokens"] = r.comment.tokens;
      cand_file << c.dump() << '\n';
    }
  }
  report.write(o.out, out);
}

// agreement ---------------------------------------------------------------------------

struct AgreementOptions {
  std::string corpus;
  std::string weights = "linear";
  SeedOption seed;
  OutputOptions out;
};

void cmd_agreement(AgreementOptions& o, std::ostream& out) {
  const auto corpus = load_articles(o.corpus);
  std::vector<AnnotationRecord> records;
  std::vector<double> mean_grades;
  std::size_t ungraded = 0, with_five = 0;
  for (const auto& a : corpus) {
    for (std::size_t i = 0; i < a.comments.size(); ++i) {
      const auto& c = a.comments[i];
      if (!c.grades) {
        ++ungraded;
        continue;
      }
      records.push_back({a.id + "#" + std::to_string(i), *c.grades});
      mean_grades.push_back(((*c.grades)[0] + (*c.grades)[1]) / 2.0);
      with_five += ((*c.grades)[0] == 5 || (*c.grades)[1] == 5) ? 1 : 0;
    }
  }
  if (records.size() < 3) {
    throw CommandError(o.corpus + ": agreement needs at least 3 graded comments, found " +
                       std::to_string(records.size()));
  }
  ojson config;
  config["corpus"] = o.corpus;
  config["kappa_weights"] = o.weights;
  Rng rng(o.seed.resolve(config));

  const auto weights = o.weights == "quadratic" ? KappaWeights::kQuadratic : KappaWeights::kLinear;
  const double kappa = cohen_weighted_kappa(records, weights);
  HumanBaseline baseline;
  try {
    baseline = human_human_baseline(records, rng);
  } catch (const UndefinedCorrelation& e) {
    throw CommandError(std::string("human baseline: ") + e.what());
  }
  const auto summary = summarize(mean_grades);
  const double share_five =
      static_cast<double>(with_five) / static_cast<double>(records.size());

  Report report("agreement", config);
  ojson rec;
  rec["type"] = "agreement";
  rec["graded_comments"] = records.size();
  rec["ungraded_comments"] = ungraded;
  rec["kappa"] = kappa;
  rec["human_spearman"] = baseline.spearman.coefficient;
  rec["human_spearman_p"] = baseline.spearman.p_value;
  rec["human_pearson"] = baseline.pearson.coefficient;
  rec["human_pearson_p"] = baseline.pearson.p_value;
  rec["mean_grade"] = summary.mean;
  rec["grade_stddev"] = summary.stddev;
  rec["share_with_a_five"] = share_five;
  report.add(std::move(rec));
  report.columns({"Statistic", "Value"});
  report.row({"graded_comments", std::to_string(records.size())});
  report.row({"ungraded_comments", std::to_string(ungraded)});
  report.row({"kappa (" + o.weights + ")", fixed(kappa, 4)});
  report.row({"human_spearman", fixed(baseline.spearman.coefficient, 4)});
  report.row({"human_pearson", fixed(baseline.pearson.coefficient, 4)});
  report.row({"mean_grade", fixed(summary.mean, 4)});
  report.row({"grade_stddev", fixed(summary.stddev, 4)});
  report.row({"share_with_a_five", fixed(share_five, 4)});
  report.write(o.out, out);
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quality-weighted evaluation metrics and article-commenting corpus tools",
               "qweval"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Score candidate comments against references");
  score_cmd->add_option("--corpus", score.corpus, "Reference corpus (JSONL)")->required();
  score_cmd->add_option("--candidates", score.candidates, "Candidate comments (JSONL)")
      ->required();
  score_cmd->add_option("-m,--metric", score.metrics,
                        "bleu, bleu-N, meteor, rouge-l, cider (repeatable or comma list)");
  auto* weighted_flag =
      score_cmd->add_flag("--weighted", score.weighted, "Weight references by quality (default)");
  score_cmd->add_flag("--unweighted", score.unweighted, "Force every quality to 1")
      ->excludes(weighted_flag);
  score.assume_opt = score_cmd->add_option("--assume-quality", score.assume_quality,
                                           "Quality used for ungraded references");
  score_cmd->add_option("--bleu-order", score.bleu_order, "BLEU n-gram order for 'bleu'")
      ->capture_default_str();
  score_cmd->add_option("--bleu-smoothing", score.bleu_smoothing)
      ->check(CLI::IsMember({"off", "epsilon"}))
      ->capture_default_str();
  score_cmd->add_option("--rouge-beta", score.rouge_beta)->capture_default_str();
  score_cmd->add_option("--cider-order", score.cider_order)->capture_default_str();
  score_cmd->add_option("--meteor-budget", score.meteor_budget,
                        "Alignment search nodes per reference")
      ->capture_default_str();
  add_output_options(score_cmd, score.out);

  CorrelateOptions corr;
  auto* corr_cmd = app.add_subcommand("correlate", "Correlate metric scores with human scores");
  corr_cmd->add_option("--human", corr.human, "Human scores (JSONL)")->required();
  corr_cmd->add_option("--metrics", corr.metrics, "Report written by 'score'")->required();
  corr_cmd->add_flag("--normalize", corr.normalize,
                     "Emit metric scores mapped to the human mean/std, clipped to [1, 5]");
  corr_cmd->add_option("--jitter-sigma", corr.jitter_sigma,
                       "Emit scatter rows with Gaussian noise added to human scores")
      ->capture_default_str();
  corr_cmd->add_option("--pvalue", corr.pvalue)
      ->check(CLI::IsMember({"t", "permutation"}))
      ->capture_default_str();
  corr_cmd->add_option("--permutations", corr.permutations)
      ->check(CLI::Range(1, 10000))
      ->capture_default_str();
  corr.seed.add(corr_cmd);
  add_output_options(corr_cmd, corr.out);

  CorpusOptions stats;
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
  stats_cmd->add_option("--corpus", stats.corpus)->required();
  add_output_options(stats_cmd, stats.out);

  FilterOptions filter;
  auto* filter_cmd = app.add_subcommand("filter", "Drop short or thinly commented articles");
  filter_cmd->add_option("--corpus", filter.io.corpus)->required();
  filter_cmd->add_option("--corpus-out", filter.io.corpus_out)->required();
  filter_cmd->add_option("--min-content", filter.rules.min_content_tokens)->capture_default_str();
  filter_cmd->add_option("--min-comments", filter.rules.min_comments)->capture_default_str();
  add_output_options(filter_cmd, filter.io.out);

  TestSetOptions test;
  auto* test_cmd = app.add_subcommand("make-test-set", "Sample comments for annotation");
  test_cmd->add_option("--corpus", test.io.corpus)->required();
  test_cmd->add_option("--corpus-out", test.io.corpus_out)->required();
  test_cmd->add_option("--min-comments", test.rules.min_comments)->capture_default_str();
  test_cmd->add_option("--comment-tokens-over", test.rules.comment_tokens_over)
      ->capture_default_str();
  test_cmd->add_option("--upvotes-over", test.rules.total_upvotes_over)->capture_default_str();
  test_cmd->add_option("--sample-size", test.rules.sample_size)->capture_default_str();
  test.max_opt = test_cmd->add_option("--max-articles", test.max_articles);
  test.seed.add(test_cmd);
  add_output_options(test_cmd, test.io.out);

  VocabOptions vocab;
  auto* vocab_cmd = app.add_subcommand("vocab", "Truncate comments and build a capped vocabulary");
  vocab_cmd->add_option("--corpus", vocab.io.corpus)->required();
  vocab_cmd->add_option("--vocab-out", vocab.vocab_out, "token<TAB>count per line");
  vocab_cmd->add_option("--corpus-out", vocab.io.corpus_out,
                        "Write the corpus with out-of-vocabulary tokens replaced");
  vocab_cmd->add_option("--cap", vocab.cap)->capture_default_str();
  vocab_cmd->add_option("--unk", vocab.unk)->capture_default_str();
  vocab_cmd->add_option("--max-comment-len", vocab.max_comment_len)->capture_default_str();
  vocab_cmd->add_flag("--no-truncate", vocab.no_truncate);
  add_output_options(vocab_cmd, vocab.io.out);

  SplitOptions split;
  auto* split_cmd = app.add_subcommand("split", "Random train/dev/test split");
  split_cmd->add_option("--corpus", split.corpus)->required();
  split_cmd->add_option("--sizes", split.sizes, "train dev test counts")
      ->required()
      ->expected(3)
      ->delimiter(',');
  split_cmd->add_option("--prefix", split.prefix, "Writes PREFIX.{train,dev,test}.jsonl")
      ->required();
  split.seed.add(split_cmd);
  add_output_options(split_cmd, split.out);

  RetrieveOptions retrieve;
  auto* retrieve_cmd = app.add_subcommand("retrieve", "TF-IDF retrieval baseline (IR-T / IR-TC)");
  retrieve_cmd->add_option("--corpus", retrieve.corpus, "Articles to retrieve from")->required();
  retrieve_cmd->add_option("--queries", retrieve.queries, "Query articles")->required();
  retrieve_cmd->add_option("--mode", retrieve.mode)
      ->check(CLI::IsMember({"title", "title-content"}))
      ->capture_default_str();
  retrieve_cmd->add_option("-k,--k", retrieve.k, "Articles retrieved per query")
      ->capture_default_str();
  retrieve_cmd->add_option("--index", retrieve.index_in, "Load a saved index");
  retrieve_cmd->add_option("--index-out", retrieve.index_out, "Save the index");
  retrieve_cmd->add_option("--candidates-out", retrieve.candidates_out,
                           "Write chosen comments as a candidates file for 'score'");
  add_output_options(retrieve_cmd, retrieve.out);

  AgreementOptions agreement;
  auto* agree_cmd = app.add_subcommand("agreement", "Annotator agreement on a graded corpus");
  agree_cmd->add_option("--corpus", agreement.corpus)->required();
  agree_cmd->add_option("--weights", agreement.weights)
      ->check(CLI::IsMember({"linear", "quadratic"}))
      ->capture_default_str();
  agreement.seed.add(agree_cmd);
  add_output_options(agree_cmd, agreement.out);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back("qweval");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*score_cmd) cmd_score(score, out);
    else if (*corr_cmd) cmd_correlate(corr, out);
    else if (*stats_cmd) cmd_stats(stats, out);
    else if (*filter_cmd) cmd_filter(filter, out);
    else if (*test_cmd) cmd_make_test_set(test, out, err);
    else if (*vocab_cmd) cmd_vocab(vocab, out);
    else if (*split_cmd) cmd_split(split, out);
    else if (*retrieve_cmd) cmd_retrieve(retrieve, out, err);
    else if (*agree_cmd) cmd_agreement(agreement, out);
  } catch (const std::exception& e) {
    err << "qweval: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace qweval::cli
