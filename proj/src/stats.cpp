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

#include "qweval/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

namespace qweval {
namespace {

void check_pairs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("paired samples differ in length: " +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()));
  }
  if (x.size() < 3) {
    throw std::invalid_argument("correlation needs at least 3 pairs, got " +
                                std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw std::invalid_argument("non-finite score at pair " +
                                  std::to_string(i));
    }
  }
}

double pearson_coefficient(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelation("correlation undefined: a sample has zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double coefficient(CorrelationMethod method, std::span<const double> x,
                   std::span<const double> y) {
  if (method == CorrelationMethod::kPearson) return pearson_coefficient(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson_coefficient(rx, ry);
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share ranks i+1..j+1
    const double rank = (static_cast<double>(i + j) + 2.0) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double t_test_p_value(double r, std::size_t n) {
  if (n < 3) throw std::invalid_argument("p-value needs n >= 3");
  if (std::abs(r) >= 1.0) return 0.0;
  const double dof = static_cast<double>(n - 2);
  const double t = r * std::sqrt(dof / ((1.0 - r) * (1.0 + r)));
  const boost::math::students_t_distribution<double> dist(dof);
  const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return std::clamp(p, 0.0, 1.0);
}

CorrelationResult correlate(CorrelationMethod method, std::span<const double> x,
                            std::span<const double> y) {
  check_pairs(x, y);
  CorrelationResult out;
  out.n = x.size();
  out.coefficient = coefficient(method, x, y);
  out.p_value = t_test_p_value(out.coefficient, out.n);
  return out;
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  return correlate(CorrelationMethod::kPearson, x, y);
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
  return correlate(CorrelationMethod::kSpearman, x, y);
}

double permutation_p_value(CorrelationMethod method, std::span<const double> x,
                           std::span<const double> y, std::size_t shuffles,
                           Rng& rng) {
  check_pairs(x, y);
  if (shuffles == 0 || shuffles > 10000) {
    throw std::invalid_argument("permutation test takes 1..10000 shuffles");
  }
  const double observed = std::abs(coefficient(method, x, y));
  std::vector<double> permuted(y.begin(), y.end());
  std::size_t extreme = 0;
  for (std::size_t s = 0; s < shuffles; ++s) {
    std::shuffle(permuted.begin(), permuted.end(), rng);
    // 1e-12 slack so permutations tying the observed value count as extreme
    if (std::abs(coefficient(method, x, permuted)) >= observed - 1e-12) ++extreme;
  }
  return static_cast<double>(extreme + 1) / static_cast<double>(shuffles + 1);
}

double cohen_weighted_kappa(std::span<const AnnotationRecord> records,
                            KappaWeights weights) {
  if (records.size() < 2) {
    throw std::invalid_argument("kappa needs at least two annotated items");
  }
  constexpr int kLevels = 5;
  std::array<std::array<double, kLevels>, kLevels> observed{};
  std::array<double, kLevels> row{}, col{};
  for (const auto& rec : records) {
    for (int g : rec.grades) {
      if (g < 1 || g > kLevels) {
        throw std::invalid_argument("item '" + rec.item_id + "': grade " +
                                    std::to_string(g) + " outside 1..5");
      }
    }
    const int a = rec.grades[0] - 1, b = rec.grades[1] - 1;
    observed[a][b] += 1.0;
    row[a] += 1.0;
    col[b] += 1.0;
  }
  const auto n = static_cast<double>(records.size());
  double w_observed = 0.0, w_expected = 0.0;
  for (int i = 0; i < kLevels; ++i) {
    for (int j = 0; j < kLevels; ++j) {
      const double d = std::abs(i - j);
      const double w = weights == KappaWeights::kLinear ? d : d * d;
      w_observed += w * observed[i][j];
      w_expected += w * row[i] * col[j] / n;
    }
  }
  if (w_expected == 0.0) return w_observed == 0.0 ? 1.0 : 0.0;
  return 1.0 - w_observed / w_expected;
}

HumanBaseline human_human_baseline(std::span<const AnnotationRecord> records,
                                   Rng& rng) {
  std::vector<double> group_a, group_b;
  group_a.reserve(records.size());
  group_b.reserve(records.size());
  std::bernoulli_distribution coin(0.5);
  for (const auto& rec : records) {
    for (int g : rec.grades) {
      if (g < 1 || g > 5) {
        throw std::invalid_argument("item '" + rec.item_id + "': grade " +
                                    std::to_string(g) + " outside 1..5");
      }
    }
    const bool swap = coin(rng);
    group_a.push_back(rec.grades[swap ? 1 : 0]);
    group_b.push_back(rec.grades[swap ? 0 : 1]);
  }
  return {spearman(group_a, group_b), pearson(group_a, group_b)};
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  const auto n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / n);
  return s;
}

AffineMap fit_to_human(std::span<const double> metric_scores,
                       std::span<const double> human_scores) {
  if (metric_scores.empty() || human_scores.empty()) {
    throw std::invalid_argument("normalization needs nonempty score lists");
  }
  const auto m = summarize(metric_scores);
  const auto h = summarize(human_scores);
  if (m.stddev == 0.0) throw std::invalid_argument("metric scores have zero variance");
  if (h.stddev == 0.0) throw std::invalid_argument("human scores have zero variance");
  AffineMap map;
  map.scale = h.stddev / m.stddev;
  map.offset = h.mean - map.scale * m.mean;
  return map;
}

std::vector<double> normalize_to_human(std::span<const double> metric_scores,
                                       std::span<const double> human_scores,
                                       double lo, double hi) {
  const auto map = fit_to_human(metric_scores, human_scores);
  std::vector<double> out;
  out.reserve(metric_scores.size());
  for (double v : metric_scores) out.push_back(std::clamp(map(v), lo, hi));
  return out;
}

double normalize_quality(int grade) {
  if (grade < 1 || grade > 5) {
    throw std::invalid_argument("grade " + std::to_string(grade) +
                                " outside 1..5");
  }
  return (grade - 1) / 4.0;
}

double normalize_quality(double mean_grade) {
  if (!(mean_grade >= 1.0 && mean_grade <= 5.0)) {
    throw std::invalid_argument("mean grade outside [1, 5]");
  }
  return (mean_grade - 1.0) / 4.0;
}

std::vector<double> jitter(std::span<const double> scores, double sigma,
                           Rng& rng) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("jitter sigma must be >= 0");
  std::vector<double> out(scores.begin(), scores.end());
  if (sigma == 0.0) return out;
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& v : out) v += noise(rng);
  return out;
}

}  // namespace qweval
