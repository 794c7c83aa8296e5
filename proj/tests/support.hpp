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

// Shared generators and brute-force reference implementations for the test
// suites. Nothing here calls into the library's scoring code.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace qweval::testing {

using Tokens = std::vector<std::string>;
using Gen = std::mt19937_64;

inline Tokens random_tokens(Gen& g, std::size_t min_len, std::size_t max_len,
                            int alphabet) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<int> sym(0, alphabet - 1);
  Tokens out(len(g));
  for (auto& t : out) t = "w" + std::to_string(sym(g));
  return out;
}

inline double random_quality(Gen& g) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(g);
}

struct Instance {
  Tokens candidate;
  std::vector<Tokens> references;
  std::vector<double> qualities;
};

inline Instance random_instance(Gen& g, std::size_t max_len, int alphabet,
                                std::size_t max_refs) {
  Instance in;
  in.candidate = random_tokens(g, 1, max_len, alphabet);
  const auto k = std::uniform_int_distribution<std::size_t>(1, max_refs)(g);
  for (std::size_t j = 0; j < k; ++j) {
    in.references.push_back(random_tokens(g, 1, max_len, alphabet));
    in.qualities.push_back(random_quality(g));
  }
  return in;
}

// n-gram counting ---------------------------------------------------------------

using Gram = std::vector<std::string>;

inline std::map<Gram, int> count_grams(const Tokens& s, int n) {
  std::map<Gram, int> out;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= s.size(); ++i) {
    out[Gram(s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(i) + n)]++;
  }
  return out;
}

// BLEU ----------------------------------------------------------------------------

inline double oracle_bleu(const Tokens& c, const std::vector<Tokens>& refs,
                          const std::vector<double>& s, int max_order) {
  if (c.empty()) return 0.0;
  double log_sum = 0.0;
  for (int n = 1; n <= max_order; ++n) {
    const auto cc = count_grams(c, n);
    double matched = 0.0, total = 0.0;
    for (const auto& [gram, cnt] : cc) {
      double best = 0.0;
      for (std::size_t j = 0; j < refs.size(); ++j) {
        const auto rc = count_grams(refs[j], n);
        const auto it = rc.find(gram);
        if (it != rc.end()) best = std::max(best, s[j] * it->second);
      }
      matched += std::min<double>(cnt, best);
      total += cnt;
    }
    if (total == 0.0 || matched == 0.0) return 0.0;
    log_sum += std::log(matched / total) / max_order;
  }
  std::size_t r = refs[0].size();
  for (const auto& ref : refs) {
    const auto d = [&](std::size_t len) {
      return len > c.size() ? len - c.size() : c.size() - len;
    };
    if (d(ref.size()) < d(r) || (d(ref.size()) == d(r) && ref.size() < r)) r = ref.size();
  }
  const double bp =
      c.size() < r ? std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c.size()))
                   : 1.0;
  return bp * std::exp(log_sum);
}

// METEOR ----------------------------------------------------------------------------

struct OracleAlignment {
  std::size_t matches = 0;
  std::size_t chunks = 0;
};

inline std::size_t count_chunks(const std::vector<std::pair<std::size_t, std::size_t>>& links) {
  if (links.empty()) return 0;
  std::size_t chunks = 1;
  for (std::size_t k = 1; k < links.size(); ++k) {
    const bool adjacent = links[k].first == links[k - 1].first + 1 &&
                          links[k].second == links[k - 1].second + 1;
    if (!adjacent) ++chunks;
  }
  return chunks;
}

/// Enumerates every one-to-one exact matching.
inline OracleAlignment oracle_align(const Tokens& c, const Tokens& r) {
  OracleAlignment best;
  bool have = false;
  std::vector<bool> used(r.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> links;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == c.size()) {
      const auto m = links.size();
      const auto ch = count_chunks(links);
      if (!have || m > best.matches || (m == best.matches && ch < best.chunks)) {
        best = {m, ch};
        have = true;
      }
      return;
    }
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (!used[j] && r[j] == c[i]) {
        used[j] = true;
        links.emplace_back(i, j);
        self(self, i + 1);
        links.pop_back();
        used[j] = false;
      }
    }
    self(self, i + 1);
  };
  rec(rec, 0);
  return best;
}

inline double oracle_meteor_single(const Tokens& c, const Tokens& r) {
  const auto a = oracle_align(c, r);
  if (a.matches == 0) return 0.0;
  const double m = static_cast<double>(a.matches);
  const double p = m / static_cast<double>(c.size());
  const double rec = m / static_cast<double>(r.size());
  const double f = 10.0 * p * rec / (rec + 9.0 * p);
  const double pen = 0.5 * std::pow(static_cast<double>(a.chunks) / m, 3.0);
  return (1.0 - pen) * f;
}

inline double oracle_meteor(const Tokens& c, const std::vector<Tokens>& refs) {
  double best = 0.0;
  for (const auto& r : refs) best = std::max(best, oracle_meteor_single(c, r));
  return best;
}

// LCS ---------------------------------------------------------------------------------

inline bool is_subsequence(const Tokens& needle, const Tokens& hay) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < hay.size() && k < needle.size(); ++i) {
    if (hay[i] == needle[k]) ++k;
  }
  return k == needle.size();
}

/// Lexicographically smallest index set among the largest candidate subsets
/// that also occur as a subsequence of the reference. Exponential in |c|.
inline std::vector<std::size_t> oracle_lcs_positions(const Tokens& c, const Tokens& r) {
  std::vector<std::size_t> best;
  const std::uint32_t limit = 1u << c.size();
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    std::vector<std::size_t> idx;
    Tokens sub;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (mask & (1u << i)) {
        idx.push_back(i);
        sub.push_back(c[i]);
      }
    }
    if (idx.size() < best.size() || !is_subsequence(sub, r)) continue;
    if (idx.size() > best.size() || idx < best) best = idx;
  }
  return best;
}

inline double oracle_rouge_l(const Tokens& c, const std::vector<Tokens>& refs,
                             const std::vector<double>& s, double beta) {
  if (c.empty()) return 0.0;
  std::vector<double> weight(c.size(), 0.0);
  double mean_len = 0.0;
  for (std::size_t j = 0; j < refs.size(); ++j) {
    for (auto p : oracle_lcs_positions(c, refs[j])) weight[p] = std::max(weight[p], s[j]);
    mean_len += static_cast<double>(refs[j].size());
  }
  mean_len /= static_cast<double>(refs.size());
  double u = 0.0;
  for (double w : weight) u += w;
  const double prc = u / static_cast<double>(c.size());
  const double rec = std::min(1.0, u / mean_len);
  if (prc == 0.0 && rec == 0.0) return 0.0;
  const double b2 = beta * beta;
  return (1.0 + b2) * prc * rec / (rec + b2 * prc);
}

// CIDEr --------------------------------------------------------------------------------

struct OracleDf {
  double docs = 0.0;
  std::vector<std::map<Gram, int>> df;  // index n - 1
};

inline OracleDf oracle_df(const std::vector<std::vector<Tokens>>& corpus, int max_order) {
  OracleDf out;
  out.docs = static_cast<double>(corpus.size());
  out.df.resize(static_cast<std::size_t>(max_order));
  for (const auto& refs : corpus) {
    for (int n = 1; n <= max_order; ++n) {
      std::set<Gram> seen;
      for (const auto& r : refs) {
        for (const auto& [g, cnt] : count_grams(r, n)) seen.insert(g);
      }
      for (const auto& g : seen) out.df[static_cast<std::size_t>(n - 1)][g]++;
    }
  }
  return out;
}

inline std::map<Gram, double> oracle_tfidf(const Tokens& s, int n, const OracleDf& df) {
  std::map<Gram, double> out;
  const auto& table = df.df[static_cast<std::size_t>(n - 1)];
  for (const auto& [g, tf] : count_grams(s, n)) {
    const auto it = table.find(g);
    const double d = it == table.end() ? 1.0 : it->second;
    out[g] = tf * std::log(df.docs / d);
  }
  return out;
}

inline double oracle_cosine(const std::map<Gram, double>& a, const std::map<Gram, double>& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (const auto& [g, w] : a) {
    aa += w * w;
    const auto it = b.find(g);
    if (it != b.end()) ab += w * it->second;
  }
  for (const auto& [g, w] : b) bb += w * w;
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

inline double oracle_cider(const Tokens& c, const std::vector<Tokens>& refs,
                           const std::vector<double>& s, const OracleDf& df,
                           int max_order) {
  double total = 0.0;
  for (int n = 1; n <= max_order; ++n) {
    const auto gc = oracle_tfidf(c, n, df);
    double inner = 0.0;
    for (std::size_t j = 0; j < refs.size(); ++j) {
      inner += s[j] * oracle_cosine(gc, oracle_tfidf(refs[j], n, df));
    }
    total += inner / max_order;
  }
  return total / static_cast<double>(refs.size());
}

// Statistics ---------------------------------------------------------------------------

inline std::vector<double> oracle_ranks(const std::vector<double>& x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0.0, equal = 0.0;
    for (double v : x) {
      if (v < x[i]) less += 1.0;
      if (v == x[i]) equal += 1.0;
    }
    out[i] = less + (equal + 1.0) / 2.0;
  }
  return out;
}

inline double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double oracle_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return oracle_pearson(oracle_ranks(x), oracle_ranks(y));
}

inline double oracle_kappa(const std::vector<std::array<int, 2>>& grades, bool quadratic) {
  double o[5][5] = {};
  double ra[5] = {}, rb[5] = {};
  const double n = static_cast<double>(grades.size());
  for (const auto& g : grades) {
    o[g[0] - 1][g[1] - 1] += 1.0;
    ra[g[0] - 1] += 1.0;
    rb[g[1] - 1] += 1.0;
  }
  double wo = 0.0, we = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double d = std::abs(i - j);
      const double w = quadratic ? d * d : d;
      wo += w * o[i][j];
      we += w * ra[i] * rb[j] / n;
    }
  }
  if (wo == 0.0) return 1.0;
  return 1.0 - wo / we;
}

// Retrieval -------------------------------------------------------------------------------

struct OracleHit {
  std::string id;
  double cosine = 0.0;
};

/// Scores every document against the query with unigram tf-idf computed from
/// scratch, skips `query_id`, and returns the best k (ties by id).
inline std::vector<OracleHit> oracle_retrieve(const std::vector<Tokens>& docs,
                                              const std::vector<std::string>& ids,
                                              const Tokens& query,
                                              const std::string& query_id, std::size_t k) {
  std::map<std::string, double> df;
  for (const auto& d : docs) {
    for (const auto& w : std::set<std::string>(d.begin(), d.end())) df[w] += 1.0;
  }
  const double n = static_cast<double>(docs.size());
  auto vec = [&](const Tokens& t) {
    std::map<std::string, double> v;
    for (const auto& w : t) v[w] += 1.0;
    for (auto& [w, x] : v) {
      const auto it = df.find(w);
      x *= std::log(n / (it == df.end() ? 1.0 : it->second));
    }
    return v;
  };
  const auto q = vec(query);
  std::vector<OracleHit> all;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (ids[i] == query_id) continue;
    const auto v = vec(docs[i]);
    double dot = 0.0, qq = 0.0, vv = 0.0;
    for (const auto& [w, x] : q) {
      qq += x * x;
      const auto it = v.find(w);
      if (it != v.end()) dot += x * it->second;
    }
    for (const auto& [w, x] : v) vv += x * x;
    all.push_back({ids[i], qq == 0.0 || vv == 0.0 ? 0.0 : dot / std::sqrt(qq * vv)});
  }
  std::sort(all.begin(), all.end(), [](const OracleHit& a, const OracleHit& b) {
    return a.cosine != b.cosine ? a.cosine > b.cosine : a.id < b.id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace qweval::testing
